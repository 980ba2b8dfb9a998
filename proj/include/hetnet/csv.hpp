#pragma once

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "hetnet/geometry.hpp"
#include "hetnet/montecarlo.hpp"
#include "hetnet/scenarios.hpp"

namespace hetnet::csv {

/// Fixed-precision number formatting so identical runs emit identical bytes.
inline std::string number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline const char* kSweepHeader =
    "rate_bps_hz,arch,scheme,tau_sq,feasible,p_mue_ul_w,p_sca_ul_w,p_sue_ul_w,p_bs_dl_w,p_sca_dl_w,"
    "mc_sinr_relerr,area_tput_gbps_km2";

/// Which links a row reports.
enum class Links { Both, UplinkOnly, DownlinkOnly };

/// One sweep row. Classes absent from the architecture are left empty;
/// values of an infeasible link are written as nan.
inline std::string sweep_row(const PointResult& r, Links links = Links::Both) {
  const PowerSummary& s = r.summary;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const bool ul = links != Links::DownlinkOnly;
  const bool dl = links != Links::UplinkOnly;
  auto cell = [&](bool reported, bool present, bool feasible, double v) -> std::string {
    if (!reported || !present) return "";
    return number(feasible ? v : nan);
  };
  bool feasible = true;
  if (ul) feasible = feasible && s.ul_feasible;
  if (dl) feasible = feasible && s.dl_feasible;
  std::string out;
  out += number(r.rate) + ",";
  out += std::string(to_string(r.settings.arch)) + ",";
  out += std::string(to_string(r.settings.scheme)) + ",";
  out += number(r.tau_sq) + ",";
  out += std::string(feasible ? "true" : "false") + ",";
  out += cell(ul, s.n_mue > 0, s.ul_feasible, s.p_mue_ul) + ",";
  out += cell(ul, s.n_sca_ul > 0, s.ul_feasible, s.p_sca_ul) + ",";
  const bool sue_ul_needs_solver = s.n_sca_dl == 0;  // served by the BS, not by an SCA
  out += cell(ul, s.n_sue_ul > 0, !sue_ul_needs_solver || s.ul_feasible, s.p_sue_ul) + ",";
  out += cell(dl, true, s.dl_feasible, s.p_bs_dl) + ",";
  out += cell(dl, s.n_sca_dl > 0, s.ul_feasible, s.p_sca_dl) + ",";
  out += number(r.mc_sinr_relerr()) + ",";
  out += number(s.area_tput_gbps_km2);
  return out;
}

inline void write_sweep(std::ostream& os, const std::vector<PointResult>& rows, Links links = Links::Both) {
  os << kSweepHeader << "\n";
  for (const auto& r : rows) os << sweep_row(r, links) << "\n";
}

inline const char* kRecordHeader = "trial,device_id,class,target_sinr,achieved_sinr,power_w";

inline void write_records(std::ostream& os, const std::vector<TrialRecord>& records) {
  os << kRecordHeader << "\n";
  for (const auto& r : records) {
    os << r.trial << "," << r.device_id << "," << r.cls << "," << number(r.target_sinr) << ","
       << number(r.achieved_sinr) << "," << number(r.power_w) << "\n";
  }
}

inline const char* kGeometryHeader = "id,kind,x_m,y_m,group,serving_sca";

inline void write_geometry(std::ostream& os, const NetworkGeometry& g) {
  os << kGeometryHeader << "\n";
  auto row = [&](const Device& d) {
    const std::string serving = d.serving_sca >= 0 ? std::to_string(g.scas[static_cast<std::size_t>(d.serving_sca)].id) : "";
    os << d.id << "," << to_string(d.kind) << "," << number(d.pos.x) << "," << number(d.pos.y) << ","
       << to_string(d.group) << "," << serving << "\n";
  };
  row(g.bs);
  for (const auto& d : g.scas) row(d);
  for (const auto& d : g.mues) row(d);
  for (const auto& d : g.sues) row(d);
}

}  // namespace hetnet::csv
