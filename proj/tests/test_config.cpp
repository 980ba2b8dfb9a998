#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <string>

#include "hetnet/config.hpp"
#include "hetnet/config_io.hpp"
#include "hetnet/units.hpp"

using namespace hetnet;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const InvalidArgument& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(Pathloss, ReferencePointsAreExact) {
  const PathlossModel m = ScenarioConfig{}.pathloss();
  EXPECT_DOUBLE_EQ(m(25.0), units::db_to_linear(-86.5));
  EXPECT_DOUBLE_EQ(m(0.0), 2.0 * units::db_to_linear(-86.5));
  EXPECT_NEAR(units::linear_to_db(m(0.0)) - units::linear_to_db(m(25.0)), 3.0103, 1e-4);
}

TEST(Pathloss, FarFieldAsymptote) {
  const PathlossModel m = ScenarioConfig{}.pathloss();
  const double ratio = m(250.0) / m(25.0);
  const double far = 2.0 * std::pow(25.0 / 250.0, 3.5);
  EXPECT_LT(std::abs(ratio / far - 1.0), 5e-3);
}

TEST(Pathloss, StrictlyDecreasingAndPositive) {
  const PathlossModel m = ScenarioConfig{}.pathloss();
  double prev = m(0.0);
  for (double r = 0.5; r < 5000.0; r *= 1.1) {
    const double v = m(r);
    EXPECT_LT(v, prev);
    EXPECT_GT(v, 0.0);
    prev = v;
  }
}

TEST(Pathloss, RejectsInvalidModel) {
  EXPECT_THROW((PathlossModel{2.0, 25.0, 1e-9}.validate()), InvalidArgument);
  EXPECT_THROW((PathlossModel{3.5, 0.0, 1e-9}.validate()), InvalidArgument);
  EXPECT_THROW((PathlossModel{3.5, 25.0, 0.0}.validate()), InvalidArgument);
}

TEST(Mobility, FifteenKmhGivesPointOne) {
  const ScenarioConfig cfg;
  EXPECT_NEAR(cfg.wavelength_m(), 0.125, 1e-3);
  EXPECT_NEAR(mue_tau_sq(cfg), 0.1, 5e-3);
}

TEST(Mobility, FiftyKmhGivesPointThree) {
  ScenarioConfig cfg;
  cfg.speed_kmh = 50.0;
  EXPECT_NEAR(mue_tau_sq(cfg), 0.3, 5e-3);
}

TEST(Mobility, StationaryGivesFloor) {
  EXPECT_EQ(tau_from_speed(0.0, 0.125, 1e-3, 0.08), 0.08);
}

TEST(Mobility, BesselMatchesSeries) {
  const double x = 2.0 * std::numbers::pi * units::kmh_to_mps(15.0) * 1e-3 / 0.125;
  double j0 = 0.0, term = 1.0;
  for (int k = 0; k < 30; ++k) {
    j0 += term;
    term *= -(x * x / 4.0) / ((k + 1.0) * (k + 1.0));
  }
  EXPECT_NEAR(tau_from_speed(units::kmh_to_mps(15.0), 0.125, 1e-3, 0.08), 0.08 + 1.0 - j0 * j0, 1e-14);
}

TEST(Mobility, RejectsUncorrelatedEstimate) {
  EXPECT_THROW(tau_from_speed(0.0, 0.125, 1e-3, 1.0), InvalidArgument);
  // J0 = 0 at its first root: tau^2 = floor + 1 clamps and is rejected cleanly.
  const double root = 2.404825557695773;
  const double v = root * 0.125 / (2.0 * std::numbers::pi * 1e-3);
  EXPECT_THROW(tau_from_speed(v, 0.125, 1e-3, 0.08), InvalidArgument);
  EXPECT_THROW(tau_from_speed(-1.0, 0.125, 1e-3, 0.08), InvalidArgument);
}

TEST(ConfigDefaults, MatchReferenceTable) {
  const ScenarioConfig cfg;
  EXPECT_EQ(cfg.n_antennas, 128);
  EXPECT_EQ(cfg.n_sca, 16);
  EXPECT_EQ(cfg.sca_pitch_m, 125.0);
  EXPECT_EQ(cfg.small_cell_radius_m, 35.0);
  EXPECT_EQ(cfg.n_mue, 128);
  EXPECT_EQ(cfg.pathloss_exp, 3.5);
  EXPECT_EQ(cfg.noise_power_dbm, -104.0);
  EXPECT_EQ(cfg.bandwidth_hz, 10e6);
  EXPECT_EQ(cfg.tau_floor_sq, 0.08);
  EXPECT_NEAR(cfg.noise_w(), 3.981e-14, 1e-17);
  EXPECT_DOUBLE_EQ(cfg.cell_area_km2(), 0.25);
}

TEST(ParseConfig, EmptyGivesDefaults) {
  EXPECT_EQ(parse_config(""), ScenarioConfig{});
  EXPECT_EQ(parse_config("# only a comment\n\n   \n"), ScenarioConfig{});
}

TEST(ParseConfig, ReadsValuesAndComments) {
  const ScenarioConfig cfg = parse_config(
      "n_antennas = 256   # doubled\n"
      "speed_kmh=50\n"
      "correlated = true\n"
      "sue_rate_map = bits\n");
  EXPECT_EQ(cfg.n_antennas, 256);
  EXPECT_EQ(cfg.speed_kmh, 50.0);
  EXPECT_TRUE(cfg.correlated);
  EXPECT_EQ(cfg.sue_rate_map, RateUnit::Bits);
  EXPECT_NEAR(mue_tau_sq(parse_config("speed_kmh = 15")), 0.1, 5e-3);
}

TEST(ParseConfig, UnknownKeyNamesKeyAndLine) {
  const std::string e = error_of("n_antennas = 64\nantenas = 3\n");
  EXPECT_NE(e.find("line 2"), std::string::npos) << e;
  EXPECT_NE(e.find("antenas"), std::string::npos) << e;
}

TEST(ParseConfig, UnparsableValueNamesKeyAndLine) {
  const std::string e = error_of("\n\nbandwidth_hz = ten\n");
  EXPECT_NE(e.find("line 3"), std::string::npos) << e;
  EXPECT_NE(e.find("bandwidth_hz"), std::string::npos) << e;
  EXPECT_NE(error_of("n_sca = 4.5").find("n_sca"), std::string::npos);
  EXPECT_NE(error_of("correlated = maybe").find("correlated"), std::string::npos);
  EXPECT_NE(error_of("noise_power_dbm = nan").find("noise_power_dbm"), std::string::npos);
  EXPECT_NE(error_of("no equals sign").find("line 1"), std::string::npos);
}

TEST(ParseConfig, DuplicateKeyRejected) {
  const std::string e = error_of("n_sca = 16\nn_sca = 9\n");
  EXPECT_NE(e.find("duplicate"), std::string::npos) << e;
  EXPECT_NE(e.find("line 2"), std::string::npos) << e;
}

TEST(ParseConfig, DivisibilityViolationNamesRuleAndLine) {
  const std::string e = error_of("# balanced placement\nn_mue = 7\n");
  EXPECT_NE(e.find("divisible"), std::string::npos) << e;
  EXPECT_NE(e.find("n_mue"), std::string::npos) << e;
  EXPECT_NE(e.find("line 2"), std::string::npos) << e;
}

TEST(ParseConfig, InvariantViolationsNameKey) {
  EXPECT_NE(error_of("pathloss_exp = 2").find("pathloss_exp"), std::string::npos);
  EXPECT_NE(error_of("cutoff_m = -1").find("cutoff_m"), std::string::npos);
  EXPECT_NE(error_of("tau_floor_sq = 1").find("tau_floor_sq"), std::string::npos);
  EXPECT_NE(error_of("n_sca = 15\nn_mue = 30").find("perfect square"), std::string::npos);
  EXPECT_NE(error_of("sca_pitch_m = 600").find("sca_pitch_m"), std::string::npos);
  EXPECT_NE(error_of("speed_kmh = -3").find("speed_kmh"), std::string::npos);
  EXPECT_NE(error_of("angular_spread_rad = 0").find("angular_spread_rad"), std::string::npos);
}

TEST(ParseConfig, RoundTrip) {
  ScenarioConfig cfg;
  cfg.n_antennas = 64;
  cfg.n_sca = 9;
  cfg.n_mue = 27;
  cfg.sca_pitch_m = 100.0 / 3.0;
  cfg.noise_power_dbm = -104.12345678901234;
  cfg.ref_atten_db = -86.5 + 1e-13;
  cfg.correlated = true;
  cfg.angular_spread_rad = std::numbers::pi / 7.0;
  cfg.sue_rate_map = RateUnit::Bits;
  cfg.stc_time_ratio = 0.3;
  cfg.geometry_redraw_trials = 3;
  EXPECT_EQ(parse_config(serialize_config(cfg)), cfg);
  EXPECT_EQ(parse_config(serialize_config(ScenarioConfig{})), ScenarioConfig{});
}

TEST(ParseConfig, MissingFileReported) {
  EXPECT_THROW(load_config("/nonexistent/hetnet.cfg"), InvalidArgument);
}

TEST(Units, Conversions) {
  EXPECT_DOUBLE_EQ(units::dbm_to_watt(30.0), 1.0);
  EXPECT_NEAR(units::watt_to_dbm(units::dbm_to_watt(-104.0)), -104.0, 1e-12);
  EXPECT_DOUBLE_EQ(units::sinr_for_rate(1.5), std::exp2(1.5) - 1.0);
  EXPECT_DOUBLE_EQ(units::kmh_to_mps(36.0), 10.0);
}
