#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "bnoma/config.hpp"
#include "bnoma/rng.hpp"

namespace bnoma {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline double distance(const Vec2& a, const Vec2& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

// Minimum separation for every distance that feeds a pathloss term; keeps
// d^-zeta away from its singularity.
inline constexpr double kMinLinkDistance = 1.0;

// Distance actually used for pathloss: cross-node pairs can in rare draws
// land closer than the guard, in which case the guard distance is used.
inline double link_distance(const Vec2& a, const Vec2& b) {
  return std::max(distance(a, b), kMinLinkDistance);
}

// Node geometry for one realization. BS at the origin, two RSUs in the BS
// disk with non-overlapping service areas, two vehicles and one backscatter
// tag in each RSU disk.
struct Placement {
  Vec2 bs{0.0, 0.0};
  std::array<Vec2, 2> rsu{};
  std::array<std::array<Vec2, 2>, 2> vehicle{};  // [rsu][vehicle]
  std::array<Vec2, 2> tag{};

  double d_bs_rsu(int m) const { return link_distance(bs, rsu[m]); }
  double d_rsu_vehicle(int m, int i) const {
    return link_distance(rsu[m], vehicle[m][i]);
  }
  double d_rsu_tag(int m) const { return link_distance(rsu[m], tag[m]); }
  double d_tag_vehicle(int m, int i) const {
    return link_distance(tag[m], vehicle[m][i]);
  }
  double d_cross(int m, int i) const {
    return link_distance(rsu[1 - m], vehicle[m][i]);
  }
};

namespace detail {

// Uniform point in the annulus [kMinLinkDistance, radius] around a center;
// identical in distribution to disk sampling with resampling below the
// guard, but consumes exactly two uniforms whatever the radius. Fixed draw
// cost keeps random streams aligned across sweep values that share a seed.
inline Vec2 sample_in_ring(const Vec2& center, double radius, Rng& rng) {
  const double lo2 = kMinLinkDistance * kMinLinkDistance;
  const double hi2 = radius * radius;
  const double r = std::sqrt(lo2 + (hi2 - lo2) * rng.uniform());
  const double theta = 2.0 * M_PI * rng.uniform();
  return {center.x + r * std::cos(theta), center.y + r * std::sin(theta)};
}

}  // namespace detail

// Uniform placement. The RSUs are redrawn until their service areas are well
// separated; the separation depends only on the BS radius so the accepted
// RSU geometry is identical across rsu_radius sweep values.
inline Placement sample_placement(const NetworkConfig& cfg, Rng& rng) {
  if (!(cfg.bs_radius_m > kMinLinkDistance))
    throw ConfigError("bs_radius_m", "must exceed the 1 m link guard");
  if (!(cfg.rsu_radius_m > kMinLinkDistance))
    throw ConfigError("rsu_radius_m", "must exceed the 1 m link guard");

  const double separation = 0.8 * cfg.bs_radius_m;
  Placement p;
  do {
    p.rsu[0] = detail::sample_in_ring(p.bs, cfg.bs_radius_m, rng);
    p.rsu[1] = detail::sample_in_ring(p.bs, cfg.bs_radius_m, rng);
  } while (distance(p.rsu[0], p.rsu[1]) < separation);
  for (int m = 0; m < 2; ++m) {
    for (int i = 0; i < 2; ++i) {
      p.vehicle[m][i] = detail::sample_in_ring(p.rsu[m], cfg.rsu_radius_m, rng);
    }
    p.tag[m] = detail::sample_in_ring(p.rsu[m], cfg.rsu_radius_m, rng);
  }
  return p;
}

}  // namespace bnoma
