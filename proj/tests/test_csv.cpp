#include <gtest/gtest.h>

#include <limits>
#include <sstream>

#include "hetnet/csv.hpp"

using namespace hetnet;

namespace {

PointResult analytic(Architecture arch, double tau_sq, Scheme scheme = Scheme::RZF) {
  RunSettings run;
  run.arch = arch;
  run.scheme = scheme;
  run.tau_sq = tau_sq;
  run.trials = 0;
  run.geometries = 4;
  return evaluate_point(ScenarioConfig{}, run);
}

std::vector<std::string> fields(const std::string& row) {
  std::vector<std::string> out;
  std::stringstream ss(row);
  std::string f;
  while (std::getline(ss, f, ',')) out.push_back(f);
  if (!row.empty() && row.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

TEST(Csv, NumberFormatting) {
  EXPECT_EQ(csv::number(1.5), "1.5");
  EXPECT_EQ(csv::number(0.1), "0.1");
  EXPECT_EQ(csv::number(1.0 / 3.0), "0.3333333333");
  EXPECT_EQ(csv::number(6.2e-4), "0.00062");
  EXPECT_EQ(csv::number(std::numeric_limits<double>::quiet_NaN()), "nan");
  EXPECT_EQ(csv::number(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(csv::number(-std::numeric_limits<double>::infinity()), "-inf");
}

TEST(Csv, SweepHeader) {
  std::ostringstream os;
  csv::write_sweep(os, {});
  EXPECT_EQ(os.str(),
            "rate_bps_hz,arch,scheme,tau_sq,feasible,p_mue_ul_w,p_sca_ul_w,p_sue_ul_w,p_bs_dl_w,p_sca_dl_w,"
            "mc_sinr_relerr,area_tput_gbps_km2\n");
}

TEST(Csv, HetnetRowHasEveryColumn) {
  const auto f = fields(csv::sweep_row(analytic(Architecture::HetnetWireless, 0.1)));
  ASSERT_EQ(f.size(), 12u);
  EXPECT_EQ(f[0], "1.5");
  EXPECT_EQ(f[1], "hetnet");
  EXPECT_EQ(f[2], "rzf");
  EXPECT_EQ(f[3], "0.1");
  EXPECT_EQ(f[4], "true");
  for (int i = 5; i <= 9; ++i) EXPECT_FALSE(f[static_cast<std::size_t>(i)].empty()) << i;
  EXPECT_EQ(f[10], "nan");
  EXPECT_EQ(f[11], "4.8");
}

TEST(Csv, AbsentClassesAreEmpty) {
  const auto wired = fields(csv::sweep_row(analytic(Architecture::HetnetWired, 0.1)));
  ASSERT_EQ(wired.size(), 12u);
  EXPECT_EQ(wired[6], "");
  EXPECT_NE(wired[9], "");
  const auto mm = fields(csv::sweep_row(analytic(Architecture::MassiveMimo, 0.1)));
  ASSERT_EQ(mm.size(), 12u);
  EXPECT_EQ(mm[6], "");
  EXPECT_EQ(mm[9], "");
}

TEST(Csv, InfeasibleLinkIsNan) {
  const auto f = fields(csv::sweep_row(analytic(Architecture::HetnetWireless, 0.5, Scheme::ZF)));
  ASSERT_EQ(f.size(), 12u);
  EXPECT_EQ(f[4], "false");
  EXPECT_EQ(f[8], "nan");
}

TEST(Csv, SingleLinkRows) {
  const PointResult r = analytic(Architecture::HetnetWireless, 0.1);
  const auto ul = fields(csv::sweep_row(r, csv::Links::UplinkOnly));
  const auto dl = fields(csv::sweep_row(r, csv::Links::DownlinkOnly));
  ASSERT_EQ(ul.size(), 12u);
  ASSERT_EQ(dl.size(), 12u);
  EXPECT_EQ(ul[8], "");
  EXPECT_EQ(ul[9], "");
  EXPECT_NE(ul[5], "");
  EXPECT_EQ(dl[5], "");
  EXPECT_NE(dl[8], "");
}

TEST(Csv, RecordsHeaderAndRows) {
  std::ostringstream os;
  csv::write_records(os, {TrialRecord{3, 17, "MUE", 1.5, 1.25, 0.5}});
  EXPECT_EQ(os.str(), "trial,device_id,class,target_sinr,achieved_sinr,power_w\n3,17,MUE,1.5,1.25,0.5\n");
}

TEST(Csv, DeterministicAcrossThreads) {
  auto render = [](unsigned threads) {
    RunSettings run;
    run.tau_sq = 0.1;
    run.trials = 30;
    run.threads = threads;
    std::ostringstream os;
    csv::write_sweep(os, {evaluate_point(ScenarioConfig{}, run)});
    return os.str();
  };
  const std::string one = render(1);
  EXPECT_EQ(one, render(4));
  EXPECT_EQ(one, render(1));
}
