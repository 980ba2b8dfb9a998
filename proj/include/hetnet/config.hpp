#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "hetnet/errors.hpp"
#include "hetnet/special_functions.hpp"
#include "hetnet/units.hpp"

namespace hetnet {

/// Distance-dependent average attenuation l(r) = 2 L / (1 + (r / cutoff)^exponent).
struct PathlossModel {
  double exponent = 3.5;
  double cutoff_m = 25.0;
  double ref_gain = units::db_to_linear(-86.5);

  void validate() const {
    require(exponent > 2.0, "pathloss exponent must be > 2");
    require(cutoff_m > 0.0, "pathloss cutoff must be > 0");
    require(ref_gain > 0.0, "reference attenuation must be > 0");
  }

  double operator()(double distance_m) const {
    return 2.0 * ref_gain / (1.0 + std::pow(std::abs(distance_m) / cutoff_m, exponent));
  }
};

/// Physical and protocol parameters of one scenario. Defaults reproduce the
/// reference deployment (128 antennas, 16 small cells, 128 macro users).
struct ScenarioConfig {
  int n_antennas = 128;
  double cell_side_m = 500.0;
  int n_sca = 16;
  double sca_pitch_m = 125.0;
  double small_cell_radius_m = 35.0;
  int n_mue = 128;
  double mue_rate_bps_hz = 1.5;
  double sca_backhaul_rate_bps_hz = 3.0;
  double sue_rate_bps_hz = 3.0;
  double noise_power_dbm = -104.0;
  double bandwidth_hz = 10e6;
  double pathloss_exp = 3.5;
  double cutoff_m = 25.0;
  double ref_atten_db = -86.5;
  double tau_floor_sq = 0.08;
  double speed_kmh = 15.0;
  double carrier_ghz = 2.4;
  double slot_ms = 1.0;
  bool correlated = false;
  double angular_spread_rad = std::numbers::pi / 12.0;
  // Unit in which sue_rate_bps_hz enters the ergodic-rate inversion.
  RateUnit sue_rate_map = RateUnit::Nats;
  // T_STC / T_LP for the space-time-coding fallback.
  double stc_time_ratio = 1.0;
  int geometry_redraw_trials = 10;

  PathlossModel pathloss() const {
    return PathlossModel{pathloss_exp, cutoff_m, units::db_to_linear(ref_atten_db)};
  }
  double noise_w() const { return units::dbm_to_watt(noise_power_dbm); }
  double wavelength_m() const { return units::wavelength_m(carrier_ghz * 1e9); }
  double cell_area_km2() const { return cell_side_m * cell_side_m * 1e-6; }
  int sca_grid_side() const {
    const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n_sca))));
    return side;
  }
  bool operator==(const ScenarioConfig&) const = default;
};

/// Throws InvalidArgument naming the offending field.
inline void validate(const ScenarioConfig& cfg) {
  require(cfg.n_antennas >= 1, "n_antennas must be >= 1");
  require(cfg.cell_side_m > 0.0, "cell_side_m must be > 0");
  require(cfg.n_sca >= 0, "n_sca must be >= 0");
  const int side = cfg.sca_grid_side();
  require(side * side == cfg.n_sca, "n_sca must be a perfect square (square SCA grid)");
  require(cfg.sca_pitch_m > 0.0, "sca_pitch_m must be > 0");
  require(cfg.n_sca == 0 || (side - 1) * cfg.sca_pitch_m < cfg.cell_side_m,
          "sca_pitch_m too large: SCA grid does not fit inside the cell");
  require(cfg.small_cell_radius_m >= 0.0, "small_cell_radius_m must be >= 0");
  require(cfg.n_mue >= 0, "n_mue must be >= 0");
  require(cfg.n_sca == 0 || cfg.n_mue % cfg.n_sca == 0,
          "n_mue must be divisible by n_sca (balanced MUE placement)");
  require(cfg.mue_rate_bps_hz >= 0.0, "mue_rate_bps_hz must be >= 0");
  require(cfg.sca_backhaul_rate_bps_hz >= 0.0, "sca_backhaul_rate_bps_hz must be >= 0");
  require(cfg.sue_rate_bps_hz >= 0.0, "sue_rate_bps_hz must be >= 0");
  require(std::isfinite(cfg.noise_power_dbm), "noise_power_dbm must be finite");
  require(cfg.bandwidth_hz > 0.0, "bandwidth_hz must be > 0");
  require(cfg.pathloss_exp > 2.0, "pathloss_exp must be > 2");
  require(cfg.cutoff_m > 0.0, "cutoff_m must be > 0");
  require(std::isfinite(cfg.ref_atten_db), "ref_atten_db must be finite");
  require(cfg.tau_floor_sq >= 0.0 && cfg.tau_floor_sq < 1.0, "tau_floor_sq must be in [0, 1)");
  require(cfg.speed_kmh >= 0.0, "speed_kmh must be >= 0");
  require(cfg.carrier_ghz > 0.0, "carrier_ghz must be > 0");
  require(cfg.slot_ms >= 0.0, "slot_ms must be >= 0");
  require(cfg.angular_spread_rad > 0.0, "angular_spread_rad must be > 0");
  require(cfg.stc_time_ratio >= 0.0, "stc_time_ratio must be >= 0");
  require(cfg.geometry_redraw_trials >= 1, "geometry_redraw_trials must be >= 1");
}

/// Squared CSI error from mobility: tau^2 = floor + 1 - J0^2(2 pi v T / lambda).
inline double tau_from_speed(double speed_mps, double wavelength_m, double slot_s,
                             double tau_floor_sq) {
  require(speed_mps >= 0.0 && wavelength_m > 0.0 && slot_s >= 0.0 && tau_floor_sq >= 0.0,
          "tau_from_speed: arguments must be nonnegative (wavelength positive)");
  const double j0 = std::cyl_bessel_j(0.0, 2.0 * std::numbers::pi * speed_mps * slot_s / wavelength_m);
  double tau_sq = tau_floor_sq + (1.0 - j0) * (1.0 + j0);
  tau_sq = std::clamp(tau_sq, 0.0, 1.0 - 1e-9);
  if (tau_sq >= 1.0 - 1e-9) {
    throw InvalidArgument("tau_from_speed: tau^2 reaches 1, the estimate is uncorrelated with the channel");
  }
  return tau_sq;
}

inline double mue_tau_sq(const ScenarioConfig& cfg) {
  return tau_from_speed(units::kmh_to_mps(cfg.speed_kmh), cfg.wavelength_m(), cfg.slot_ms * 1e-3,
                        cfg.tau_floor_sq);
}

}  // namespace hetnet
