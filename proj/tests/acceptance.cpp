// Acceptance gate: one PASS/FAIL line per criterion.
//   acceptance                 run every criterion
//   acceptance --only <id>     run one
//   acceptance --list          print the ids

#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hetnet/hetnet.hpp"
#include "oracles.hpp"

using namespace hetnet;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [miss]");
  }
};

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double rel(double got, double want) { return std::abs(got / want - 1.0); }

Verdict reference_powers() {
  Verdict v;
  RunSettings run;
  run.arch = Architecture::HetnetWireless;
  run.scheme = Scheme::RZF;
  run.tau_sq = 0.1;
  run.trials = 1000;
  run.threads = 0;
  const PointResult r = evaluate_point(ScenarioConfig{}, run);
  const PowerSummary& s = r.summary;
  auto near = [&](const char* name, double got, double want) {
    v.check(rel(got, want) <= 0.20, fmt("%s %.4g vs %.4g (%+.1f%%)", name, got, want, 100.0 * (got / want - 1.0)));
  };
  v.check(s.feasible(), "feasible");
  near("MUE UL", s.p_mue_ul, 0.083);
  near("SCA UL", s.p_sca_ul, 0.25);
  near("SUE UL", s.p_sue_ul, 8.5e-4);
  near("BS DL", s.p_bs_dl, 0.055);
  near("SCA DL", s.p_sca_dl, 0.75);
  near("UL total", s.ul_total, 5.52);
  near("DL total", s.dl_total, 6.05);
  v.detail += fmt("; realized BS DL %.4g, MC SINR bias %.3g", r.dl_mc.mean_radiated_power(), r.mc_sinr_relerr());
  return v;
}

// First crossing of tau_max^2 below `tau_sq` on a rate grid, refined by bisection.
double wall(const std::function<double(double)>& tau_max_sq, double tau_sq, double step) {
  double lo = step;
  for (double r = step; r < 6.0; r += step) {
    if (tau_max_sq(r) < tau_sq) {
      double hi = r;
      for (int i = 0; i < 80; ++i) {
        const double mid = 0.5 * (lo + hi);
        (tau_max_sq(mid) < tau_sq ? hi : lo) = mid;
      }
      return 0.5 * (lo + hi);
    }
    lo = r;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

Verdict feasibility_walls() {
  Verdict v;
  const double step = 0.05;
  const NetworkGeometry geom = build_network(ScenarioConfig{}, 1);
  auto layout = [&](double rate) {
    ScenarioConfig cfg;
    cfg.mue_rate_bps_hz = rate;
    return build_architecture(Architecture::HetnetWireless, geom, cfg, 0.3);
  };
  auto ul = [&](double r) { return std::pow(ul_feasibility(make_ul_targets(layout(r))).tau_max, 2); };
  auto zf = [&](double r) { return std::pow(dl_feasibility(make_dl_targets(layout(r)), Scheme::ZF).tau_max, 2); };
  auto rzf = [&](double r) { return std::pow(dl_feasibility(make_dl_targets(layout(r)), Scheme::RZF).tau_max, 2); };
  const double w_ul = wall(ul, 0.3, step), w_zf = wall(zf, 0.3, step), w_rzf = wall(rzf, 0.3, step);
  v.check(std::abs(w_ul - 1.5) <= step, fmt("MMSE wall %.4f vs 1.5", w_ul));
  v.check(std::abs(w_zf - 1.5) <= step, fmt("ZF wall %.4f vs 1.5", w_zf));
  v.check(std::abs(w_rzf - 1.75) <= step, fmt("RZF wall %.4f vs 1.75", w_rzf));
  const Feasibility below = dl_feasibility(make_dl_targets(layout(w_zf - step)), Scheme::ZF);
  const Feasibility above = dl_feasibility(make_dl_targets(layout(w_zf + step)), Scheme::ZF);
  v.check(below.feasible && !above.feasible, "ZF load test flips across the wall");
  return v;
}

Verdict rho_optimality() {
  Verdict v;
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int points = 4001;
  const double span = 100.0;
  int draws = 0, within = 0, attempts = 0;
  double worst_mu = 0.0;
  while (draws < 100 && attempts < 100000) {
    ++attempts;
    const int n = 128;
    const int k = 4 + static_cast<int>(u(gen) * 80);
    const int s = static_cast<int>(u(gen) * 20);
    if (k + s >= n) continue;
    DlTargets t;
    t.n_antennas = n;
    t.n_nulled = s;
    t.noise_w = 1e-13;
    for (int i = 0; i < k; ++i) {
      t.gamma.push_back(0.2 + 6.0 * u(gen));
      t.tau_sq.push_back(0.2 * u(gen));
      t.gain.push_back(1e-10 * (0.1 + u(gen)));
      t.is_mue.push_back(true);
    }
    const double gbar = t.gamma_bar();
    const double rho_star = optimal_rho(gbar, t.c(), t.c_s());
    if (!(rho_star > 0.0) || !std::isfinite(rzf_power_at(t, rho_star))) continue;
    ++draws;
    const double ratio = std::pow(span, 2.0 / (points - 1));
    double best = rho_star / span, best_p = std::numeric_limits<double>::infinity();
    for (int i = 0; i < points; ++i) {
      const double rho = rho_star / span * std::pow(ratio, i);
      const double p = rzf_power_at(t, rho);
      if (p < best_p) {
        best_p = p;
        best = rho;
      }
    }
    if (std::abs(std::log(best / rho_star)) <= std::log(ratio) * (1.0 + 1e-9)) ++within;
    worst_mu = std::max(worst_mu, rel(mu_fixed_point(t.c(), t.c_s(), rho_star), gbar));
  }
  v.check(draws == 100, fmt("%d draws", draws));
  v.check(within == draws, fmt("%d/%d grid minimizers within one step", within, draws));
  v.check(worst_mu <= 1e-12, fmt("max |mu/gbar - 1| = %.2e", worst_mu));
  return v;
}

Verdict zf_exact_nulling() {
  Verdict v;
  struct Case { int n, k, s; };
  double worst = 0.0;
  std::size_t trials = 0;
  for (Case c : {Case{64, 8, 4}, Case{64, 40, 8}, Case{64, 50, 7}, Case{128, 100, 15}, Case{256, 200, 30}}) {
    BandLayout lay;
    lay.n_antennas = c.n;
    lay.noise_w = 1e-13;
    for (int i = 0; i < c.k; ++i) {
      const double gamma = 0.5 + 0.1 * (i % 30);
      lay.served.push_back({i, DeviceKind::MUE, {}, 1e-10 * (1.0 + i % 7), 0.0, std::log2(1.0 + gamma), gamma});
    }
    for (int j = 0; j < c.s; ++j) {
      SmallCellLink l;
      l.backhaul_gain = 1e-9 * (1.0 + j % 3);
      l.cross_gain.assign(static_cast<std::size_t>(c.k), 1e-12);
      l.access_gain = 1e-7;
      lay.links.push_back(l);
    }
    std::vector<double> p;
    for (const auto& d : lay.served) p.push_back(d.target_sinr * lay.noise_w);
    for (std::uint64_t t = 0; t < 100; ++t, ++trials) {
      const ChannelSet ch = draw_channels(lay, substream_seed(7, Stream::Channel, trials));
      const ZfPrecoder zf = zf_precoder(ch.h_hat, projector(ch.h_nulled, c.n));
      const auto sinr = instantaneous_dl_sinr(ch.h, zf.v, p, lay.noise_w);
      for (std::size_t k = 0; k < sinr.size(); ++k) worst = std::max(worst, rel(sinr[k], lay.served[k].target_sinr));
    }
  }
  v.check(worst <= 1e-6, fmt("max |SINR/gamma - 1| = %.2e over %zu trials, K+S up to 0.9N", worst, trials));
  return v;
}

BandLayout synthetic(int n, double tau_sq) {
  const int k_mue = n / 2, k_sca = n / 16, s = n / 16;
  BandLayout lay;
  lay.n_antennas = n;
  lay.noise_w = 1e-13;
  const double g_mue = std::exp2(1.5) - 1.0, g_sca = std::exp2(3.0) - 1.0;
  for (int i = 0; i < k_mue; ++i)
    lay.served.push_back({i, DeviceKind::MUE, {}, 1e-10 * (0.5 + (i % 5) * 0.25), tau_sq, 1.5, g_mue});
  for (int i = 0; i < k_sca; ++i)
    lay.served.push_back({k_mue + i, DeviceKind::SCA, {}, 1e-9, 0.0, 3.0, g_sca});
  const double g_sue = invert_ergodic_rate(3.0, RateUnit::Nats);
  for (int j = 0; j < s; ++j) {
    SmallCellLink l;
    l.sca_id = 1000 + j;
    l.backhaul_gain = 1e-9;
    l.access_gain = 1e-7;
    l.rate = 3.0;
    l.target_sinr = g_sue;
    l.cross_gain.assign(lay.served.size(), 1e-13);
    lay.links.push_back(l);
  }
  return lay;
}

Verdict convergence() {
  Verdict v;
  std::vector<double> logn, ul_err, dl_err;
  for (int n : {32, 64, 128, 256}) {
    const BandLayout lay = synthetic(n, 0.1);
    McOptions opt;
    opt.trials = 1000;
    opt.seed = 11;
    opt.threads = 0;
    const UlSolution ul = solve_ul_fixed_point(make_ul_targets(lay));
    const DlSolution dl = rzf_asymptotic(make_dl_targets(lay));
    if (!ul.feasible || !dl.feasible) {
      v.check(false, fmt("N=%d infeasible", n));
      return v;
    }
    logn.push_back(std::log(n));
    ul_err.push_back(run_ul_trials(lay, ul, opt).sinr_bias());
    dl_err.push_back(run_dl_trials(lay, dl, opt).sinr_bias());
  }
  auto series = [](const std::vector<double>& e) {
    std::string s;
    for (double x : e) s += fmt("%s%.4f", s.empty() ? "" : "/", x);
    return s;
  };
  v.detail = "c=0.5625 c_S=0.0625 N=32/64/128/256";
  v.check(oracle::slope(logn, ul_err) < 0.0, "MMSE error " + series(ul_err) + fmt(" slope %.4f", oracle::slope(logn, ul_err)));
  v.check(oracle::slope(logn, dl_err) < 0.0, "RZF error " + series(dl_err) + fmt(" slope %.4f", oracle::slope(logn, dl_err)));
  v.check(ul_err[2] <= 0.10 && dl_err[2] <= 0.10, fmt("N=128 errors %.4f, %.4f <= 0.10", ul_err[2], dl_err[2]));
  return v;
}

Verdict nulling_residual() {
  Verdict v;
  const ScenarioConfig cfg;
  double worst = 0.0;
  int runs = 0;
  for (Scheme scheme : {Scheme::RZF, Scheme::ZF, Scheme::STC}) {
    for (double tau_sq : {0.0, 0.1, 0.3}) {
      for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const BandLayout lay = build_architecture(Architecture::HetnetWireless, build_network(cfg, seed), cfg, tau_sq);
        const DlSolution dl = dl_asymptotic(make_dl_targets(lay), scheme, cfg.stc_time_ratio);
        if (!dl.feasible) continue;
        McOptions opt;
        opt.trials = 50;
        opt.seed = seed;
        worst = std::max(worst, run_dl_trials(lay, dl, opt).max_nulling_residual);
        ++runs;
      }
    }
  }
  v.check(runs > 0, fmt("%d feasible scheme/tau/geometry runs", runs));
  v.check(worst < 1e-8, fmt("max normalized |H_S^H V| = %.2e", worst));
  return v;
}

Verdict interference_tradeoff() {
  Verdict v;
  const ScenarioConfig cfg;
  const PathlossModel m = cfg.pathloss();
  const double alpha = cfg.n_mue / (cfg.cell_side_m * cfg.cell_side_m);
  double worst = 0.0;
  for (double d = 0.5 * m.cutoff_m; d <= 50.0 * m.cutoff_m * (1.0 + 1e-12); d *= 1.1) {
    const double want = oracle::mean_interference(alpha, 0.083, m.exponent, m.cutoff_m, m.ref_gain, d);
    worst = std::max(worst, rel(expected_interference(alpha, 0.083, m, d), want));
  }
  v.check(worst < 1e-6, fmt("max rel error vs radial quadrature %.2e", worst));
  const double d = cfg.sca_pitch_m / 2.0 - cfg.small_cell_radius_m;
  const double inr = expected_interference(alpha, 0.083, m, d) / cfg.noise_w();
  v.check(rel(inr, 5.5e3) <= 0.05, fmt("E{I}/sigma^2 = %.4g at alpha=%.3g, p=0.083, d=%.1f vs 5.5e3", inr, alpha, d));
  return v;
}

Verdict special_functions() {
  Verdict v;
  double worst_rt = 0.0;
  for (double r : {0.5, 1.0, 3.0, 6.0}) {
    worst_rt = std::max(worst_rt, rel(ergodic_rate_nats(invert_ergodic_rate(r)) / std::numbers::ln2, r));
    worst_rt = std::max(worst_rt, rel(ergodic_rate_nats(invert_ergodic_rate(r, RateUnit::Nats)), r));
  }
  v.check(worst_rt <= 1e-9, fmt("rate round trip %.1e", worst_rt));
  double worst_e1 = 0.0;
  for (double z : {1e-6, 0.01, 0.5, 1.0, 2.0, 5.0, 10.0, 30.0}) worst_e1 = std::max(worst_e1, rel(exp_integral_e1(z), oracle::e1(z)));
  v.check(worst_e1 <= 1e-10, fmt("E1 vs quadrature %.1e", worst_e1));
  const double small = exp_integral_e1(1e-8) + std::log(1e-8) + detail::kEulerGamma;
  v.check(std::abs(small) <= 1e-6, fmt("E1(z)+ln z+gamma at 1e-8: %.1e", small));
  const double z = 200.0;
  const double large = z * scaled_exp_integral_e1(z) - 1.0;
  v.check(std::abs(large + 1.0 / z) <= 2.0 / (z * z) + 1e-12, fmt("z e^z E1(z) - 1 at 200: %.3e", large));
  const double g3 = invert_ergodic_rate(3.0);
  const double o3 = oracle::invert_rate_bits(3.0);
  v.check(rel(g3, o3) <= 1e-8, fmt("invert(3) = %.12g vs bisection %.12g", g3, o3));
  return v;
}

std::string sweep_csv(unsigned threads) {
  RunSettings run;
  run.tau_sq = 0.1;
  run.trials = 40;
  run.threads = threads;
  run.keep_records = true;
  std::vector<PointResult> rows;
  std::ostringstream rec;
  for (const auto& e : rate_sweep(ScenarioConfig{}, run, {1.0, 1.5, 3.0})) {
    rows.push_back(e.result);
    csv::write_records(rec, e.result.dl_mc.records);
  }
  std::ostringstream os;
  csv::write_sweep(os, rows);
  return os.str() + rec.str();
}

Verdict csv_determinism() {
  Verdict v;
  const std::string base = sweep_csv(1);
  v.check(base == sweep_csv(1), "rerun identical");
  v.check(base == sweep_csv(3), "3 threads identical");
  v.check(base == sweep_csv(8), "8 threads identical");
  v.detail += fmt("; %zu bytes", base.size());
  return v;
}

const std::vector<std::pair<const char*, Verdict (*)()>> kCriteria = {
    {"reference_powers", reference_powers},
    {"feasibility_walls", feasibility_walls},
    {"rho_optimality", rho_optimality},
    {"zf_exact_nulling", zf_exact_nulling},
    {"convergence", convergence},
    {"nulling_residual", nulling_residual},
    {"interference_tradeoff", interference_tradeoff},
    {"special_functions", special_functions},
    {"csv_determinism", csv_determinism},
};

}  // namespace

int main(int argc, char** argv) {
  std::string only;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
      only = argv[++i];
    } else if (std::strcmp(argv[i], "--list") == 0) {
      for (const auto& c : kCriteria) std::printf("%s\n", c.first);
      return 0;
    } else {
      std::fprintf(stderr, "usage: acceptance [--only <id>] [--list]\n");
      return 2;
    }
  }
  int failed = 0, ran = 0;
  for (const auto& [id, fn] : kCriteria) {
    if (!only.empty() && only != id) continue;
    ++ran;
    Verdict v;
    try {
      v = fn();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("error: ") + e.what();
    }
    std::printf("%s %s: %s\n", v.pass ? "PASS" : "FAIL", id, v.detail.c_str());
    std::fflush(stdout);
    if (!v.pass) ++failed;
  }
  if (ran == 0) {
    std::fprintf(stderr, "unknown criterion '%s'\n", only.c_str());
    return 2;
  }
  return failed ? 1 : 0;
}
