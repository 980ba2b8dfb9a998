#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "hetnet/channel.hpp"
#include "hetnet/config.hpp"
#include "hetnet/dl_precoding.hpp"
#include "hetnet/geometry.hpp"
#include "hetnet/layout.hpp"
#include "hetnet/montecarlo.hpp"
#include "hetnet/parallel.hpp"
#include "hetnet/ul_solver.hpp"

namespace hetnet {

struct RunSettings {
  Architecture arch = Architecture::HetnetWireless;
  Scheme scheme = Scheme::RZF;
  std::optional<double> tau_sq;  // overrides the mobility-derived MUE tau^2
  std::size_t trials = 1000;     // Monte-Carlo trials; 0 = analytic only
  std::size_t geometries = 100;  // geometry draws when trials == 0
  std::uint64_t seed = 1;
  unsigned threads = 1;
  bool keep_records = false;
  Group band = Group::Red;
  int rho_grid_points = 64;
  double rho_grid_span = 30.0;
};

inline double effective_tau_sq(const ScenarioConfig& cfg, const RunSettings& run) {
  return run.tau_sq ? *run.tau_sq : mue_tau_sq(cfg);
}

/// Analytic solution for one geometry draw.
struct GeometryPoint {
  NetworkGeometry geom;
  BandLayout layout;
  UlSolution ul;
  DlSolution dl;
  std::string error;  // numeric failure (distinct from infeasibility)
  std::vector<CMatrix> roots;
};

/// Per-class average powers and accounting of one operating point.
struct PowerSummary {
  bool ul_feasible = true;
  bool dl_feasible = true;
  double p_mue_ul = 0.0;
  double p_sca_ul = 0.0;
  double p_sue_ul = 0.0;
  double p_bs_dl = 0.0;
  double p_sca_dl = 0.0;
  double n_mue = 0.0;     // per band, averaged over geometries
  double n_sca_ul = 0.0;
  double n_sue_ul = 0.0;
  double n_sca_dl = 0.0;
  double ul_total = 0.0;
  double dl_total = 0.0;
  double area_tput_gbps_km2 = 0.0;
  double sue_inr = 0.0;  // mean sum_k p_k l(x_{s,k}) / sigma^2
  double ul_tau_max = 1.0;
  double dl_tau_max = 1.0;
  std::size_t geometries = 0;
  std::string reason;
  bool feasible() const { return ul_feasible && dl_feasible; }
};

struct PointResult {
  double rate = 0.0;
  double tau_sq = 0.0;
  RunSettings settings;
  PowerSummary summary;
  McStats ul_mc;
  McStats dl_mc;
  bool has_mc = false;
  /// Mean over devices of |E[SINR]/gamma - 1|, pooled over UL and DL.
  double mc_sinr_relerr() const {
    if (!has_mc) return std::numeric_limits<double>::quiet_NaN();
    McStats both;
    both.merge(ul_mc);
    both.merge(dl_mc);
    return both.devices.empty() ? std::numeric_limits<double>::quiet_NaN() : both.sinr_bias();
  }
};

/// Replace the RZF regularizer and powers by a grid search over correlated
/// channel realizations.
inline void apply_correlated_rzf(GeometryPoint& gp, const ScenarioConfig& cfg, const RunSettings& run,
                                 std::uint64_t block, std::size_t realizations) {
  gp.roots = draw_correlation_roots(gp.layout, cfg.angular_spread_rad,
                                    substream_seed(run.seed, Stream::Angles, block));
  if (!gp.dl.feasible || gp.dl.scheme != Scheme::RZF || gp.layout.K() == 0) return;
  std::vector<ChannelSet> chans;
  for (std::size_t i = 0; i < realizations; ++i) {
    chans.push_back(draw_channels(gp.layout, substream_seed(run.seed, Stream::Synthetic, block * 1000003ULL + i),
                                  gp.roots));
  }
  CorrelatedRzfResult r;
  try {
    r = correlated_rzf(gp.layout, chans, log_grid(gp.dl.rho, run.rho_grid_span, run.rho_grid_points));
  } catch (const InvalidArgument& e) {
    gp.dl.feasible = false;
    gp.dl.reason = e.what();
    return;
  }
  gp.dl.rho = r.rho_best;
  gp.dl.device_power = r.device_power;
  gp.dl.total_power = r.total_power;
}

inline GeometryPoint solve_geometry(const ScenarioConfig& cfg, const RunSettings& run, std::uint64_t block) {
  GeometryPoint gp;
  gp.geom = build_network(cfg, substream_seed(run.seed, Stream::Geometry, block));
  gp.layout = build_architecture(run.arch, gp.geom, cfg, effective_tau_sq(cfg, run), run.band);
  try {
    gp.ul = solve_ul_fixed_point(make_ul_targets(gp.layout));
  } catch (const ConvergenceError& e) {
    gp.error = e.what();
    gp.ul.reason = e.what();
  }
  gp.dl = dl_asymptotic(make_dl_targets(gp.layout), run.scheme, cfg.stc_time_ratio);
  if (cfg.correlated) {
    const std::size_t per_block = static_cast<std::size_t>(cfg.geometry_redraw_trials);
    apply_correlated_rzf(gp, cfg, run, block, std::max<std::size_t>(per_block, 20));
  }
  return gp;
}

/// Class averages and totals over a set of geometry solutions.
inline PowerSummary summarize(const std::vector<GeometryPoint>& points, const ScenarioConfig& cfg) {
  PowerSummary s;
  s.geometries = points.size();
  double sum_mue = 0, sum_sca_ul = 0, sum_sue_ul = 0, sum_sca_dl = 0, sum_bs = 0, sum_inr = 0;
  double n_mue = 0, n_sca_ul = 0, n_sue_ul = 0, n_sca_dl = 0, n_inr = 0;
  double tput_bits = 0.0;
  std::string ul_reason, dl_reason;
  for (const auto& gp : points) {
    const BandLayout& lay = gp.layout;
    if (!gp.ul.feasible && s.ul_feasible) {
      s.ul_feasible = false;
      ul_reason = "UL: " + gp.ul.reason;
    }
    if (!gp.dl.feasible && s.dl_feasible) {
      s.dl_feasible = false;
      dl_reason = "DL: " + gp.dl.reason;
    }
    s.ul_tau_max = gp.ul.tau_max;
    s.dl_tau_max = gp.dl.tau_max;
    for (std::size_t k = 0; k < lay.K(); ++k) {
      const auto& d = lay.served[k];
      const double p = gp.ul.feasible ? gp.ul.device_power[k] : 0.0;
      switch (d.kind) {
        case DeviceKind::MUE: sum_mue += p; n_mue += 1; tput_bits += d.rate_bps_hz; break;
        case DeviceKind::SCA: sum_sca_ul += p; n_sca_ul += 1; break;
        case DeviceKind::SUE: sum_sue_ul += p; n_sue_ul += 1; tput_bits += d.rate_bps_hz; break;
        default: break;
      }
    }
    for (std::size_t l = 0; l < lay.S(); ++l) {
      const auto& link = lay.links[l];
      sum_sue_ul += link.target_sinr * lay.noise_w / link.access_gain;
      n_sue_ul += 1;
      tput_bits += link.rate;
      if (gp.ul.feasible) {
        sum_sca_dl += gp.ul.sca_dl_power[l];
        sum_inr += gp.ul.sue_interference[l] / lay.noise_w;
        n_inr += 1;
      }
      n_sca_dl += 1;
    }
    if (gp.dl.feasible) sum_bs += gp.dl.total_power;
  }
  const double g = static_cast<double>(std::max<std::size_t>(points.size(), 1));
  auto avg = [](double sum, double n) { return n > 0 ? sum / n : 0.0; };
  s.p_mue_ul = avg(sum_mue, n_mue);
  s.p_sca_ul = avg(sum_sca_ul, n_sca_ul);
  s.p_sue_ul = avg(sum_sue_ul, n_sue_ul);
  s.p_sca_dl = avg(sum_sca_dl, n_sca_dl);
  s.p_bs_dl = sum_bs / g;
  s.sue_inr = avg(sum_inr, n_inr);
  s.n_mue = n_mue / g;
  s.n_sca_ul = n_sca_ul / g;
  s.n_sue_ul = n_sue_ul / g;
  s.n_sca_dl = n_sca_dl / g;
  s.ul_total = s.n_mue * s.p_mue_ul + s.n_sca_ul * s.p_sca_ul + s.n_sue_ul * s.p_sue_ul;
  s.dl_total = s.p_bs_dl + s.n_sca_dl * s.p_sca_dl;
  s.area_tput_gbps_km2 = tput_bits / g * cfg.bandwidth_hz / cfg.cell_area_km2() * 1e-9;
  s.reason = ul_reason.empty() ? dl_reason : dl_reason.empty() ? ul_reason : ul_reason + "; " + dl_reason;
  return s;
}

/// Analytic powers (averaged over geometry draws) and, when trials > 0,
/// Monte-Carlo validation with a fresh geometry every `geometry_redraw_trials` trials.
inline PointResult evaluate_point(const ScenarioConfig& cfg, const RunSettings& run) {
  validate(cfg);
  PointResult out;
  out.rate = cfg.mue_rate_bps_hz;
  out.tau_sq = effective_tau_sq(cfg, run);
  out.settings = run;
  const std::size_t per_block = static_cast<std::size_t>(cfg.geometry_redraw_trials);
  const std::size_t blocks = run.trials > 0 ? (run.trials + per_block - 1) / per_block : run.geometries;
  require(blocks >= 1, "evaluate_point: need at least one geometry");

  std::vector<GeometryPoint> points(blocks);
  parallel_for(blocks, run.threads, [&](std::size_t b) { points[b] = solve_geometry(cfg, run, b); });
  out.summary = summarize(points, cfg);
  for (const auto& gp : points) {
    if (!gp.error.empty()) out.summary.reason = "UL numeric failure: " + gp.error;
  }
  if (run.trials == 0) return out;

  std::vector<McStats> ul(blocks), dl(blocks);
  const bool do_ul = out.summary.ul_feasible;
  const bool do_dl = out.summary.dl_feasible;
  parallel_for(blocks, run.threads, [&](std::size_t b) {
    McOptions opt;
    opt.seed = run.seed;
    opt.trial_offset = b * per_block;
    opt.trials = std::min(per_block, run.trials - b * per_block);
    opt.threads = 1;
    opt.keep_records = run.keep_records;
    opt.roots = points[b].roots.empty() ? nullptr : &points[b].roots;
    if (do_ul) ul[b] = run_ul_trials(points[b].layout, points[b].ul, opt);
    if (do_dl) dl[b] = run_dl_trials(points[b].layout, points[b].dl, opt);
  });
  for (std::size_t b = 0; b < blocks; ++b) {
    out.ul_mc.merge(ul[b]);
    out.dl_mc.merge(dl[b]);
  }
  out.ul_mc.seed = out.dl_mc.seed = run.seed;
  out.has_mc = do_ul || do_dl;
  return out;
}

/// One evaluate_point per MUE rate; failures are recorded, not propagated.
struct SweepEntry {
  PointResult result;
  std::string error;
};

inline std::vector<SweepEntry> rate_sweep(const ScenarioConfig& cfg, const RunSettings& run,
                                          const std::vector<double>& rates) {
  std::vector<SweepEntry> out;
  for (double r : rates) {
    require(r > 0.0, "rate_sweep: rates must be positive");
    ScenarioConfig c = cfg;
    c.mue_rate_bps_hz = r;
    SweepEntry e;
    e.result.rate = r;
    e.result.tau_sq = effective_tau_sq(cfg, run);
    e.result.settings = run;
    try {
      e.result = evaluate_point(c, run);
    } catch (const Error& ex) {
      e.error = ex.what();
      e.result.summary.ul_feasible = false;
      e.result.summary.dl_feasible = false;
      e.result.summary.reason = ex.what();
    }
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace hetnet
