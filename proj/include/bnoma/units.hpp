#pragma once

#include <cmath>

namespace bnoma {

// dBm <-> watt conversions. All internal math runs in watts; dBm appears
// only at configuration and reporting boundaries.
inline double dbm_to_watt(double level_dbm) {
  return std::pow(10.0, (level_dbm - 30.0) / 10.0);
}

inline double watt_to_dbm(double power_w) {
  return 10.0 * std::log10(power_w) + 30.0;
}

}  // namespace bnoma
