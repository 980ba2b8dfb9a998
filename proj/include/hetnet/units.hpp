#pragma once

#include <cmath>
#include <numbers>

namespace hetnet::units {

inline constexpr double kSpeedOfLight = 299792458.0;

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watt_to_dbm(double watt) { return 10.0 * std::log10(watt) + 30.0; }

inline double kmh_to_mps(double kmh) { return kmh / 3.6; }

inline double wavelength_m(double carrier_hz) { return kSpeedOfLight / carrier_hz; }

/// SINR target for a deterministic rate requirement, 2^r - 1.
inline double sinr_for_rate(double rate_bps_hz) { return std::exp2(rate_bps_hz) - 1.0; }

}  // namespace hetnet::units
