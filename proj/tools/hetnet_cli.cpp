// hetnet: large-system power analysis and Monte-Carlo validation of a
// reverse-TDD two-tier network with massive-MIMO wireless backhaul.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hetnet/hetnet.hpp"

namespace {

constexpr const char* kVersion = "1.0.0";

struct Options {
  std::string config_path;
  std::uint64_t seed = 1;
  std::optional<std::size_t> trials;
  std::string rates;
  std::optional<double> rate;
  std::string arch = "hetnet";
  std::string scheme = "rzf";
  std::optional<double> tau_sq;
  std::string out;
  std::string records;
  unsigned threads = 0;
  std::optional<double> density;
  std::optional<double> d;
  std::optional<double> power;
};

std::vector<double> parse_rates(const std::string& text) {
  std::vector<double> out;
  auto to_double = [&](const std::string& s) {
    double v = 0.0;
    if (!hetnet::detail::parse_double(hetnet::detail::trim(s), v)) {
      throw hetnet::InvalidArgument("--rates: cannot parse '" + s + "'");
    }
    return v;
  };
  const auto c1 = text.find(':');
  if (c1 == std::string::npos) {
    out.push_back(to_double(text));
  } else {
    const auto c2 = text.find(':', c1 + 1);
    if (c2 == std::string::npos) throw hetnet::InvalidArgument("--rates: expected start:stop:step");
    const double start = to_double(text.substr(0, c1));
    const double stop = to_double(text.substr(c1 + 1, c2 - c1 - 1));
    const double step = to_double(text.substr(c2 + 1));
    if (!(step > 0.0) || stop < start) throw hetnet::InvalidArgument("--rates: need step > 0 and stop >= start");
    const auto n = static_cast<long>(std::floor((stop - start) / step + 1e-9));
    for (long i = 0; i <= n; ++i) out.push_back(start + static_cast<double>(i) * step);
  }
  for (double r : out) {
    if (!(r > 0.0)) throw hetnet::InvalidArgument("--rates: rates must be positive");
  }
  return out;
}

std::string now_utc() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

class Output {
 public:
  Output(const Options& opt, std::string command, const hetnet::ScenarioConfig& cfg)
      : opt_(opt), command_(std::move(command)), cfg_(cfg), start_(std::chrono::steady_clock::now()) {}

  // Writes `body` to `path` (or stdout when empty) and records it.
  void emit(const std::string& path, const std::string& body) {
    if (path.empty()) {
      std::cout << body;
      return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw hetnet::InvalidArgument("cannot write '" + path + "'");
    f << body;
    outputs_.push_back(path);
  }

  void finish(std::size_t trials) {
    if (outputs_.empty()) return;
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    for (const auto& path : outputs_) {
      std::ofstream m(path + ".manifest");
      m << "tool = hetnet\n";
      m << "tool_version = " << kVersion << "\n";
      m << "command = " << command_ << "\n";
      m << "config_path = " << (opt_.config_path.empty() ? "(defaults)" : opt_.config_path) << "\n";
      m << "seed = " << opt_.seed << "\n";
      m << "trials = " << trials << "\n";
      m << "arch = " << opt_.arch << "\n";
      m << "scheme = " << opt_.scheme << "\n";
      if (opt_.tau_sq) m << "tau_sq = " << hetnet::csv::number(*opt_.tau_sq) << "\n";
      if (!opt_.rates.empty()) m << "rates = " << opt_.rates << "\n";
      m << "threads = " << opt_.threads << "\n";
      m << "output = " << path << "\n";
      for (const auto& other : outputs_) {
        if (other != path) m << "sibling_output = " << other << "\n";
      }
      m << "started_utc = " << started_ << "\n";
      m << "wall_clock_s = " << hetnet::csv::number(elapsed) << "\n";
      std::istringstream cfg(hetnet::serialize_config(cfg_));
      for (std::string line; std::getline(cfg, line);) m << "config." << line << "\n";
    }
  }

 private:
  const Options& opt_;
  std::string command_;
  hetnet::ScenarioConfig cfg_;
  std::chrono::steady_clock::time_point start_;
  std::string started_ = now_utc();
  std::vector<std::string> outputs_;
};

hetnet::RunSettings settings_from(const Options& opt, std::size_t default_trials) {
  hetnet::RunSettings run;
  run.arch = hetnet::parse_architecture(opt.arch);
  run.scheme = hetnet::parse_scheme(opt.scheme);
  run.tau_sq = opt.tau_sq;
  if (run.tau_sq && !(*run.tau_sq >= 0.0 && *run.tau_sq < 1.0)) {
    throw hetnet::InvalidArgument("--tau-sq must be in [0, 1)");
  }
  run.trials = opt.trials.value_or(default_trials);
  run.seed = opt.seed;
  run.threads = opt.threads;
  run.keep_records = !opt.records.empty();
  return run;
}

void print_summary(const hetnet::PointResult& r, hetnet::csv::Links links) {
  using hetnet::csv::number;
  const auto& s = r.summary;
  std::fprintf(stderr, "rate %s bit/s/Hz, tau^2 %s, %zu geometries\n", number(r.rate).c_str(),
               number(r.tau_sq).c_str(), s.geometries);
  if (links != hetnet::csv::Links::DownlinkOnly) {
    std::fprintf(stderr, "  UL %s, tau_max^2 %s\n", s.ul_feasible ? "feasible" : "infeasible",
                 number(s.ul_tau_max * s.ul_tau_max).c_str());
  }
  if (links != hetnet::csv::Links::UplinkOnly) {
    std::fprintf(stderr, "  DL %s, tau_max^2 %s\n", s.dl_feasible ? "feasible" : "infeasible",
                 number(s.dl_tau_max * s.dl_tau_max).c_str());
  }
  if (!s.reason.empty()) std::fprintf(stderr, "  %s\n", s.reason.c_str());
  if (s.feasible()) {
    std::fprintf(stderr, "  UL total %s W, DL total %s W, area throughput %s Gb/s/km^2\n",
                 number(s.ul_total).c_str(), number(s.dl_total).c_str(), number(s.area_tput_gbps_km2).c_str());
  }
  if (r.has_mc) {
    std::fprintf(stderr, "  MC: UL SINR bias %s (per-realization %s), DL SINR bias %s (per-realization %s)\n",
                 number(r.ul_mc.sinr_bias()).c_str(), number(r.ul_mc.per_realization_error()).c_str(),
                 number(r.dl_mc.sinr_bias()).c_str(), number(r.dl_mc.per_realization_error()).c_str());
    std::fprintf(stderr, "  MC: realized BS DL power %s W, max nulling residual %s, SUE ergodic rate %s bit/s/Hz (%s nat/s/Hz)\n",
                 number(r.dl_mc.mean_radiated_power()).c_str(), number(r.dl_mc.max_nulling_residual).c_str(),
                 number(r.ul_mc.sue_rate_bits()).c_str(), number(r.ul_mc.sue_rate_nats()).c_str());
  }
}

int run_points(const Options& opt, const hetnet::ScenarioConfig& cfg, const std::string& command,
               std::size_t default_trials, hetnet::csv::Links links, bool sweep) {
  const hetnet::RunSettings run = settings_from(opt, default_trials);
  std::vector<double> rates;
  if (sweep) {
    rates = opt.rates.empty() ? parse_rates("0.5:3.0:0.25") : parse_rates(opt.rates);
  } else {
    rates.push_back(opt.rate.value_or(cfg.mue_rate_bps_hz));
  }
  Output out(opt, command, cfg);
  std::vector<hetnet::PointResult> rows;
  std::vector<hetnet::TrialRecord> records;
  bool any_feasible = false;
  for (const auto& entry : hetnet::rate_sweep(cfg, run, rates)) {
    if (!entry.error.empty()) std::fprintf(stderr, "rate %g: %s\n", entry.result.rate, entry.error.c_str());
    const auto& s = entry.result.summary;
    const bool ok = links == hetnet::csv::Links::UplinkOnly    ? s.ul_feasible
                    : links == hetnet::csv::Links::DownlinkOnly ? s.dl_feasible
                                                                : s.feasible();
    any_feasible = any_feasible || ok;
    print_summary(entry.result, links);
    rows.push_back(entry.result);
    if (run.keep_records) {
      const auto& ul = entry.result.ul_mc.records;
      const auto& dl = entry.result.dl_mc.records;
      records.insert(records.end(), ul.begin(), ul.end());
      records.insert(records.end(), dl.begin(), dl.end());
    }
  }
  std::ostringstream body;
  hetnet::csv::write_sweep(body, rows, links);
  out.emit(opt.out, body.str());
  if (!opt.records.empty()) {
    std::ostringstream rec;
    hetnet::csv::write_records(rec, records);
    out.emit(opt.records, rec.str());
  }
  out.finish(run.trials);
  return any_feasible ? 0 : 1;
}

int run_tradeoff(const Options& opt, const hetnet::ScenarioConfig& cfg) {
  using hetnet::csv::number;
  const hetnet::PathlossModel model = cfg.pathloss();
  const double density = opt.density.value_or(cfg.n_mue / (cfg.cell_side_m * cfg.cell_side_m));
  const double d = opt.d.value_or(0.5 * cfg.sca_pitch_m - cfg.small_cell_radius_m);
  double p_bar = 0.0;
  if (opt.power) {
    p_bar = *opt.power;
  } else {
    hetnet::RunSettings run = settings_from(opt, 0);
    run.trials = 0;
    const auto point = hetnet::evaluate_point(cfg, run);
    if (!point.summary.ul_feasible) throw hetnet::InvalidArgument("tradeoff: UL infeasible, pass --power");
    p_bar = point.summary.p_mue_ul;
  }
  const double sigma2 = cfg.noise_w();
  const double closed = hetnet::expected_interference(density, p_bar, model, d);
  const double quad = hetnet::expected_interference_quadrature(density, p_bar, model, d);
  const double far = hetnet::expected_interference_far_field(density, p_bar, model, d);
  std::ostringstream body;
  body << "density_per_m2,p_bar_w,d_m,interference_w,interference_to_noise,quadrature_to_noise,far_field_to_noise\n";
  body << number(density) << "," << number(p_bar) << "," << number(d) << "," << number(closed) << ","
       << number(closed / sigma2) << "," << number(quad / sigma2) << "," << number(far / sigma2) << "\n";
  std::printf("E{I}/sigma^2 = %s (quadrature %s, far field %s)\n", number(closed / sigma2).c_str(),
              number(quad / sigma2).c_str(), number(far / sigma2).c_str());
  Output out(opt, "tradeoff", cfg);
  if (!opt.out.empty()) out.emit(opt.out, body.str());
  out.finish(0);
  return 0;
}

int run_geometry(const Options& opt, const hetnet::ScenarioConfig& cfg) {
  const auto geom = hetnet::build_network(cfg, hetnet::substream_seed(opt.seed, hetnet::Stream::Geometry, 0));
  std::ostringstream body;
  hetnet::csv::write_geometry(body, geom);
  Output out(opt, "geometry", cfg);
  out.emit(opt.out, body.str());
  out.finish(0);
  std::fprintf(stderr, "K = %zu served, S = %zu nulled, c = %s, c_S = %s\n", geom.served_count(),
               geom.nulled_count(), hetnet::csv::number(geom.c()).c_str(), hetnet::csv::number(geom.c_s()).c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Power analysis and Monte-Carlo validation for a massive-MIMO HetNet with wireless backhaul"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config_path, "key = value configuration file (defaults if omitted)");
    sub->add_option("--seed", opt.seed, "master random seed");
    sub->add_option("--out", opt.out, "output CSV path (stdout if omitted)");
    sub->add_option("--threads", opt.threads, "worker threads (0 = all cores)");
  };
  auto add_solver = [&](CLI::App* sub) {
    add_common(sub);
    sub->add_option("--arch", opt.arch, "hetnet, wired or mmimo")->check(CLI::IsMember({"hetnet", "wired", "mmimo"}));
    sub->add_option("--scheme", opt.scheme, "rzf, zf or stc")->check(CLI::IsMember({"rzf", "zf", "stc"}));
    sub->add_option("--tau-sq", opt.tau_sq, "MUE CSI error tau^2 (overrides the speed model)");
    sub->add_option("--rate", opt.rate, "MUE rate in bit/s/Hz (overrides the config)");
    sub->add_option("--trials", opt.trials, "Monte-Carlo trials (0 = analytic only)");
  };

  auto* solve_ul = app.add_subcommand("solve-ul", "asymptotic UL powers and feasibility");
  add_solver(solve_ul);
  auto* solve_dl = app.add_subcommand("solve-dl", "asymptotic DL powers and feasibility");
  add_solver(solve_dl);
  auto* mc = app.add_subcommand("montecarlo", "Monte-Carlo validation at one operating point");
  add_solver(mc);
  mc->add_option("--records", opt.records, "per-trial records CSV path");
  auto* sweep = app.add_subcommand("sweep", "rate sweep with Monte-Carlo validation");
  add_solver(sweep);
  sweep->add_option("--rates", opt.rates, "start:stop:step or a single rate");
  sweep->add_option("--records", opt.records, "per-trial records CSV path");
  auto* tradeoff = app.add_subcommand("tradeoff", "mean SUE interference versus MUE density and distance");
  add_common(tradeoff);
  tradeoff->add_option("--density", opt.density, "MUE density per m^2 (default n_mue / cell area)");
  tradeoff->add_option("--d", opt.d, "protected radius in m (default pitch / 2 - small-cell radius)");
  tradeoff->add_option("--power", opt.power, "MUE power in W (default: solved mean MUE UL power)");
  tradeoff->add_option("--tau-sq", opt.tau_sq, "MUE CSI error tau^2 used when solving for the power");
  auto* geometry = app.add_subcommand("geometry", "export one network snapshot");
  add_common(geometry);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    hetnet::ScenarioConfig cfg = opt.config_path.empty() ? hetnet::ScenarioConfig{} : hetnet::load_config(opt.config_path);
    if (opt.rate) {
      cfg.mue_rate_bps_hz = *opt.rate;
      hetnet::validate(cfg);
    }
    if (solve_ul->parsed()) return run_points(opt, cfg, "solve-ul", 0, hetnet::csv::Links::UplinkOnly, false);
    if (solve_dl->parsed()) return run_points(opt, cfg, "solve-dl", 0, hetnet::csv::Links::DownlinkOnly, false);
    if (mc->parsed()) return run_points(opt, cfg, "montecarlo", 1000, hetnet::csv::Links::Both, false);
    if (sweep->parsed()) return run_points(opt, cfg, "sweep", 1000, hetnet::csv::Links::Both, true);
    if (tradeoff->parsed()) return run_tradeoff(opt, cfg);
    if (geometry->parsed()) return run_geometry(opt, cfg);
  } catch (const hetnet::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
