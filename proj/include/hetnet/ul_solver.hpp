#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "hetnet/errors.hpp"
#include "hetnet/layout.hpp"

namespace hetnet {

/// Inputs of the uplink large-system analysis for one band.
struct UlTargets {
  int n_antennas = 0;
  double noise_w = 0.0;
  // Served set R (MUEs and SCAs, or SUEs in the massive-MIMO baseline).
  std::vector<double> gamma;
  std::vector<double> tau_sq;
  std::vector<double> gain;
  std::vector<bool> is_mue;
  // Nulled SCAs and their SUEs.
  std::vector<double> sue_gamma;
  std::vector<double> backhaul_gain;
  std::vector<double> access_gain;
  std::vector<std::vector<double>> cross_gain;  // [s][k]

  std::size_t K() const { return gamma.size(); }
  std::size_t S() const { return sue_gamma.size(); }
  double c() const { return static_cast<double>(K()) / n_antennas; }
  double c_s() const { return static_cast<double>(S()) / n_antennas; }

  void validate() const {
    require(n_antennas >= 1, "UlTargets: N must be >= 1");
    require(noise_w > 0.0, "UlTargets: noise power must be > 0");
    require(tau_sq.size() == K() && gain.size() == K() && is_mue.size() == K(),
            "UlTargets: per-device vectors must have equal length");
    require(backhaul_gain.size() == S() && access_gain.size() == S() && cross_gain.size() == S(),
            "UlTargets: per-link vectors must have equal length");
    for (std::size_t k = 0; k < K(); ++k) {
      require(gamma[k] >= 0.0, "UlTargets: gamma must be >= 0");
      require(tau_sq[k] >= 0.0 && tau_sq[k] < 1.0, "UlTargets: tau^2 must be in [0, 1)");
      require(gain[k] > 0.0, "UlTargets: pathloss must be > 0");
      require(is_mue[k] || tau_sq[k] == 0.0, "UlTargets: SCA channels must be perfectly known");
    }
    for (std::size_t s = 0; s < S(); ++s) {
      require(sue_gamma[s] >= 0.0 && backhaul_gain[s] > 0.0 && access_gain[s] > 0.0,
              "UlTargets: invalid small-cell link");
      require(cross_gain[s].size() == K(), "UlTargets: cross-gain row must have K entries");
    }
    require(c() + c_s() < 1.0, "UlTargets: c + c_S must be < 1");
  }
};

inline UlTargets make_ul_targets(const BandLayout& layout) {
  UlTargets t;
  t.n_antennas = layout.n_antennas;
  t.noise_w = layout.noise_w;
  for (const auto& d : layout.served) {
    t.gamma.push_back(d.target_sinr);
    t.tau_sq.push_back(d.tau_sq);
    t.gain.push_back(d.gain);
    t.is_mue.push_back(d.kind == DeviceKind::MUE);
  }
  for (const auto& l : layout.links) {
    t.sue_gamma.push_back(l.target_sinr);
    t.backhaul_gain.push_back(l.backhaul_gain);
    t.access_gain.push_back(l.access_gain);
    t.cross_gain.push_back(l.cross_gain);
  }
  return t;
}

struct Feasibility {
  bool feasible = false;
  double lhs = 0.0;
  double rhs = 0.0;
  double tau_max = 1.0;  // uniform-tau bound on the MUE CSI error
};

/// Load-based feasibility of MMSE power control, plus the uniform-tau bound
/// (1 + gbar_M c / (1 - c - c_S))^{-1/2} with gbar_M = (1/K) sum over MUEs of gamma.
inline Feasibility ul_feasibility(const UlTargets& t) {
  Feasibility f;
  const double n = t.n_antennas;
  double gbar_m = 0.0;
  for (std::size_t k = 0; k < t.K(); ++k) {
    f.lhs += t.gamma[k] * t.tau_sq[k] / (1.0 - t.tau_sq[k]) / n;
    if (t.is_mue[k]) gbar_m += t.gamma[k];
  }
  if (t.K() > 0) gbar_m /= static_cast<double>(t.K());
  f.rhs = 1.0 - t.c() - t.c_s();
  f.feasible = f.rhs > 0.0 && f.lhs < f.rhs;
  f.tau_max = f.rhs > 0.0 ? 1.0 / std::sqrt(1.0 + gbar_m * t.c() / f.rhs) : 0.0;
  return f;
}

/// Sum of p_k l(x_{s,k}): the mean interference a SUE receives from the served set.
inline double sue_interference(const std::vector<double>& powers, const std::vector<double>& cross_gain) {
  require(powers.size() == cross_gain.size(), "sue_interference: size mismatch");
  double sum = 0.0;
  for (std::size_t k = 0; k < powers.size(); ++k) {
    require(powers[k] >= 0.0 && cross_gain[k] >= 0.0, "sue_interference: inputs must be nonnegative");
    sum += powers[k] * cross_gain[k];
  }
  return sum;
}

/// DL power of nulled SCA s meeting its SUE's mean-SINR target given (xi, delta).
inline double sca_dl_power(const UlTargets& t, std::size_t s, double xi, double delta) {
  require(xi > 0.0 && delta > 0.0, "sca_dl_power: xi and delta must be > 0");
  const double gamma_s = t.sue_gamma[s];
  if (gamma_s == 0.0) return 0.0;
  double weighted = 0.0;
  for (std::size_t k = 0; k < t.K(); ++k) {
    weighted += t.gamma[k] / (1.0 - t.tau_sq[k]) * t.cross_gain[s][k] / t.gain[k];
  }
  return gamma_s / t.access_gain[s] * (t.noise_w + weighted / (xi * delta));
}

struct UlOptions {
  double damping = 0.5;
  double tolerance = 1e-10;
  int max_iterations = 500000;
  double delta_floor = 1e-9;
  double power_cap_w = 1e6;
};

struct UlSolution {
  double xi = 0.0;
  double delta = 0.0;
  std::vector<double> device_power;   // served set, asymptotic UL powers
  std::vector<double> sca_dl_power;   // nulled SCAs, DL powers towards their SUEs
  std::vector<double> sue_target_sinr;
  std::vector<double> sue_interference;  // mean interference at each SUE
  bool feasible = false;
  std::string reason;
  int iterations = 0;
  double residual_xi = 0.0;
  double residual_delta = 0.0;
  double tau_max = 1.0;
};

namespace detail {

struct UlMap {
  double x;      // xi * sigma^2 after one application
  double delta;  // delta after one application
};

// One application of the coupled (xi, delta) equations; `weighted[s]` is
// sum_k gamma_k / (1 - tau_k^2) l_{s,k} / l_k.
inline UlMap ul_map(const UlTargets& t, const std::vector<double>& weighted, double xi, double delta) {
  const double n = t.n_antennas;
  const double sigma2 = t.noise_w;
  const double x = xi * sigma2;
  double load = 0.0, e = 0.0, d = 0.0;
  for (std::size_t k = 0; k < t.K(); ++k) {
    const double g = t.gamma[k];
    const double tt = 1.0 - t.tau_sq[k];
    const double den = delta * tt + g;
    load += g / den;
    e += g * delta * tt / (den * den);
    d += g * t.tau_sq[k] / (delta * tt) + g * delta * tt * tt / (den * den);
  }
  double load_s = 0.0, curv_s = 0.0;
  for (std::size_t s = 0; s < t.S(); ++s) {
    const double p_s = t.sue_gamma[s] / t.access_gain[s] * (sigma2 + weighted[s] / (xi * delta));
    const double q = p_s * t.backhaul_gain[s] * xi;
    load_s += q / (1.0 + q);
    curv_s += q / ((1.0 + q) * (1.0 + q));
  }
  UlMap m;
  m.x = 1.0 - (load + load_s) / n;
  m.delta = (x + (e + curv_s) / n) / (x + (d + curv_s) / n);
  return m;
}

}  // namespace detail

/// Solve the uplink deterministic-equivalent fixed point by damped Picard
/// iteration on (xi, delta), returning MMSE UL powers p_k = gamma_k / (xi delta l_k (1 - tau_k^2))
/// and the nulled SCAs' DL powers.
inline UlSolution solve_ul_fixed_point(const UlTargets& t, const UlOptions& opt = {}) {
  t.validate();
  UlSolution sol;
  sol.sue_target_sinr = t.sue_gamma;
  const Feasibility f = ul_feasibility(t);
  sol.tau_max = f.tau_max;
  if (!f.feasible) {
    sol.reason = "load condition violated: " + std::to_string(f.lhs) + " >= " + std::to_string(f.rhs);
    return sol;
  }

  std::vector<double> weighted(t.S(), 0.0);
  for (std::size_t s = 0; s < t.S(); ++s) {
    for (std::size_t k = 0; k < t.K(); ++k) {
      weighted[s] += t.gamma[k] / (1.0 - t.tau_sq[k]) * t.cross_gain[s][k] / t.gain[k];
    }
  }

  const double sigma2 = t.noise_w;
  double xi = 1.0 / sigma2;
  double delta = 1.0;
  bool converged = false;
  int it = 0;
  for (; it < opt.max_iterations; ++it) {
    const detail::UlMap m = detail::ul_map(t, weighted, xi, delta);
    if (!(m.x > 0.0) || !(m.delta > opt.delta_floor)) {
      sol.reason = "fixed point collapsed (delta -> 0)";
      sol.iterations = it + 1;
      return sol;
    }
    const double xi_next = (1.0 - opt.damping) * xi + opt.damping * m.x / sigma2;
    const double delta_next = (1.0 - opt.damping) * delta + opt.damping * m.delta;
    const double dxi = std::abs(xi_next - xi) / xi;
    const double ddelta = std::abs(delta_next - delta) / delta;
    xi = xi_next;
    delta = delta_next;
    if (dxi < opt.tolerance && ddelta < opt.tolerance) {
      converged = true;
      ++it;
      break;
    }
  }
  sol.iterations = it;
  sol.xi = xi;
  sol.delta = delta;
  const detail::UlMap m = detail::ul_map(t, weighted, xi, delta);
  sol.residual_xi = std::abs(m.x / sigma2 - xi) / xi;
  sol.residual_delta = std::abs(m.delta - delta) / delta;
  if (!converged) {
    throw ConvergenceError("solve_ul_fixed_point: no convergence after " + std::to_string(it) +
                           " iterations (residual xi " + std::to_string(sol.residual_xi) +
                           ", delta " + std::to_string(sol.residual_delta) + ")");
  }

  sol.device_power.resize(t.K());
  for (std::size_t k = 0; k < t.K(); ++k) {
    sol.device_power[k] = t.gamma[k] / (xi * delta * t.gain[k] * (1.0 - t.tau_sq[k]));
  }
  sol.sca_dl_power.resize(t.S());
  sol.sue_interference.resize(t.S());
  for (std::size_t s = 0; s < t.S(); ++s) {
    sol.sca_dl_power[s] = sca_dl_power(t, s, xi, delta);
    sol.sue_interference[s] = sue_interference(sol.device_power, t.cross_gain[s]);
  }
  double worst = 0.0;
  for (double p : sol.device_power) worst = std::max(worst, p);
  for (double p : sol.sca_dl_power) worst = std::max(worst, p);
  if (!(delta > opt.delta_floor) || !(worst <= opt.power_cap_w)) {
    sol.reason = "required power exceeds cap";
    return sol;
  }
  sol.feasible = true;
  return sol;
}

}  // namespace hetnet
