#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hetnet/channel.hpp"
#include "hetnet/errors.hpp"
#include "hetnet/layout.hpp"
#include "hetnet/ul_solver.hpp"

namespace hetnet {

enum class Scheme { RZF, ZF, STC };

inline const char* to_string(Scheme s) {
  switch (s) {
    case Scheme::RZF: return "rzf";
    case Scheme::ZF: return "zf";
    case Scheme::STC: return "stc";
  }
  return "?";
}

inline Scheme parse_scheme(const std::string& s) {
  if (s == "rzf") return Scheme::RZF;
  if (s == "zf") return Scheme::ZF;
  if (s == "stc") return Scheme::STC;
  throw InvalidArgument("unknown scheme '" + s + "' (expected rzf, zf or stc)");
}

/// Inputs of the downlink large-system analysis for one band.
struct DlTargets {
  int n_antennas = 0;
  int n_nulled = 0;
  double noise_w = 0.0;
  std::vector<double> gamma;
  std::vector<double> tau_sq;
  std::vector<double> gain;
  std::vector<bool> is_mue;

  std::size_t K() const { return gamma.size(); }
  double c() const { return static_cast<double>(K()) / n_antennas; }
  double c_s() const { return static_cast<double>(n_nulled) / n_antennas; }

  /// (1/K) sum gamma_k / ((1 - tau_k^2) l_k)
  double A() const {
    double s = 0.0;
    for (std::size_t k = 0; k < K(); ++k) s += gamma[k] / ((1.0 - tau_sq[k]) * gain[k]);
    return K() ? s / static_cast<double>(K()) : 0.0;
  }
  /// (1/K) sum gamma_k tau_k^2 / (1 - tau_k^2)
  double B() const {
    double s = 0.0;
    for (std::size_t k = 0; k < K(); ++k) s += gamma[k] * tau_sq[k] / (1.0 - tau_sq[k]);
    return K() ? s / static_cast<double>(K()) : 0.0;
  }
  double gamma_bar() const {
    double s = 0.0;
    for (double g : gamma) s += g;
    return K() ? s / static_cast<double>(K()) : 0.0;
  }
  /// MUE targets summed and divided by K (not by the MUE count).
  double gamma_bar_mue() const {
    double s = 0.0;
    for (std::size_t k = 0; k < K(); ++k) if (is_mue[k]) s += gamma[k];
    return K() ? s / static_cast<double>(K()) : 0.0;
  }

  void validate() const {
    require(n_antennas >= 1 && n_nulled >= 0, "DlTargets: invalid antenna or nulled count");
    require(noise_w > 0.0, "DlTargets: noise power must be > 0");
    require(tau_sq.size() == K() && gain.size() == K() && is_mue.size() == K(),
            "DlTargets: per-device vectors must have equal length");
    for (std::size_t k = 0; k < K(); ++k) {
      require(gamma[k] >= 0.0 && gain[k] > 0.0, "DlTargets: invalid gamma or pathloss");
      require(tau_sq[k] >= 0.0 && tau_sq[k] < 1.0, "DlTargets: tau^2 must be in [0, 1)");
    }
    require(c() + c_s() < 1.0, "DlTargets: c + c_S must be < 1");
  }
};

inline DlTargets make_dl_targets(const BandLayout& layout) {
  DlTargets t;
  t.n_antennas = layout.n_antennas;
  t.n_nulled = static_cast<int>(layout.S());
  t.noise_w = layout.noise_w;
  for (const auto& d : layout.served) {
    t.gamma.push_back(d.target_sinr);
    t.tau_sq.push_back(d.tau_sq);
    t.gain.push_back(d.gain);
    t.is_mue.push_back(d.kind == DeviceKind::MUE);
  }
  return t;
}

/// Power-minimizing RZF regularizer (1 - c_S)/gbar - c/(1 + gbar).
inline double optimal_rho(double gamma_bar, double c, double c_s) {
  require(gamma_bar > 0.0, "optimal_rho: gamma_bar must be > 0");
  return (1.0 - c_s) / gamma_bar - c / (1.0 + gamma_bar);
}

/// Positive root of rho mu^2 + (c + rho - (1 - c_S)) mu - (1 - c_S) = 0.
inline double mu_fixed_point(double c, double c_s, double rho) {
  require(rho > 0.0, "mu_fixed_point: rho must be > 0");
  const double a = rho;
  const double b = c + rho - (1.0 - c_s);
  const double q = 1.0 - c_s;
  const double disc = std::sqrt(b * b + 4.0 * a * q);
  return b > 0.0 ? 2.0 * q / (b + disc) : (disc - b) / (2.0 * a);
}

/// Asymptotic RZF total power at an arbitrary regularizer; +inf when the
/// denominator is not positive.
inline double rzf_power_at(const DlTargets& t, double rho) {
  const double c = t.c();
  const double mu = mu_fixed_point(c, t.c_s(), rho);
  const double m2 = (1.0 + mu) * (1.0 + mu);
  const double den = mu * (c + rho * m2) - c * (t.gamma_bar() + t.B() * m2);
  if (!(den > 0.0)) return std::numeric_limits<double>::infinity();
  return c * t.noise_w * m2 * t.A() / den;
}

/// Per-device RZF allocation for total power P at fixed point mu.
inline std::vector<double> rzf_device_powers(const DlTargets& t, double mu, double total_power) {
  std::vector<double> p(t.K());
  const double m2 = (1.0 + mu) * (1.0 + mu);
  for (std::size_t k = 0; k < t.K(); ++k) {
    const double tt = 1.0 - t.tau_sq[k];
    p[k] = t.gamma[k] / (t.gain[k] * mu * mu) *
           (total_power * (tt + t.tau_sq[k] * m2) + t.noise_w * m2 / t.gain[k]) / tt;
  }
  return p;
}

/// Total power implied by a per-device allocation: c mu / (c + rho (1+mu)^2) (1/K) sum p_k l_k.
inline double rzf_power_from_devices(const DlTargets& t, double mu, double rho,
                                     const std::vector<double>& powers) {
  const double c = t.c();
  double s = 0.0;
  for (std::size_t k = 0; k < t.K(); ++k) s += powers[k] * t.gain[k];
  s /= static_cast<double>(t.K());
  return c * mu / (c + rho * (1.0 + mu) * (1.0 + mu)) * s;
}

struct DlSolution {
  Scheme scheme = Scheme::RZF;
  double rho = 0.0;
  double mu = 0.0;
  double total_power = 0.0;
  std::vector<double> device_power;
  bool feasible = false;
  double tau_max = 1.0;
  std::string reason;
  // Space-time-coded users (STC scheme only).
  std::vector<double> stc_power;
  double stc_time_ratio = 0.0;
  double r_avg = 0.0;
  double energy_t2 = 0.0;
};

/// Scheme feasibility and the uniform-tau CSI bound.
inline Feasibility dl_feasibility(const DlTargets& t, Scheme scheme) {
  Feasibility f;
  const double c = t.c();
  const double cs = t.c_s();
  const double gbar = t.gamma_bar();
  const double gbar_m = t.gamma_bar_mue();
  if (scheme == Scheme::RZF) {
    if (!(gbar > 0.0)) {
      f.feasible = true;
      return f;
    }
    const double rho = optimal_rho(gbar, c, cs);
    f.lhs = c * t.B();
    f.rhs = rho * gbar;
    f.feasible = rho > 0.0 && f.lhs < f.rhs;
    f.tau_max = rho > 0.0 ? 1.0 / std::sqrt(1.0 + (c / rho) * (gbar_m / gbar)) : 0.0;
  } else {
    f.lhs = c * t.B();
    f.rhs = 1.0 - cs - c;
    f.feasible = f.lhs < f.rhs;
    f.tau_max = f.rhs > 0.0 ? 1.0 / std::sqrt(1.0 + gbar_m * c / f.rhs) : 0.0;
  }
  return f;
}

inline DlSolution rzf_asymptotic(const DlTargets& t) {
  t.validate();
  DlSolution sol;
  sol.scheme = Scheme::RZF;
  const Feasibility f = dl_feasibility(t, Scheme::RZF);
  sol.tau_max = f.tau_max;
  const double gbar = t.gamma_bar();
  if (!(gbar > 0.0)) {
    sol.feasible = true;
    sol.device_power.assign(t.K(), 0.0);
    return sol;
  }
  sol.rho = optimal_rho(gbar, t.c(), t.c_s());
  if (!f.feasible) {
    sol.reason = sol.rho > 0.0 ? "CSI error too large for RZF" : "no positive regularizer";
    return sol;
  }
  sol.mu = mu_fixed_point(t.c(), t.c_s(), sol.rho);
  sol.total_power = t.c() * t.noise_w * t.A() / (sol.rho * gbar - t.c() * t.B());
  sol.device_power = rzf_device_powers(t, gbar, sol.total_power);
  const double check = rzf_power_from_devices(t, gbar, sol.rho, sol.device_power);
  if (std::abs(check - sol.total_power) > 1e-8 * sol.total_power) {
    throw ConvergenceError("rzf_asymptotic: per-device allocation inconsistent with total power");
  }
  sol.feasible = true;
  return sol;
}

inline DlSolution zf_asymptotic(const DlTargets& t) {
  t.validate();
  DlSolution sol;
  sol.scheme = Scheme::ZF;
  const Feasibility f = dl_feasibility(t, Scheme::ZF);
  sol.tau_max = f.tau_max;
  if (!f.feasible) {
    sol.reason = "CSI error too large for ZF";
    return sol;
  }
  sol.total_power = t.c() * t.noise_w * t.A() / (1.0 - t.c_s() - t.c() * (t.B() + 1.0));
  sol.device_power.resize(t.K());
  for (std::size_t k = 0; k < t.K(); ++k) {
    sol.device_power[k] = t.gamma[k] / (1.0 - t.tau_sq[k]) *
                          (t.noise_w + t.tau_sq[k] * t.gain[k] * sol.total_power);
  }
  sol.feasible = true;
  return sol;
}

/// Uniform-STC power gamma sigma^2 / ((1 - c_S) l).
inline double stc_power(double gamma, double gain, double c_s, double noise_w) {
  require(c_s < 1.0 && gain > 0.0, "stc_power: requires c_S < 1 and positive pathloss");
  return gamma * noise_w / ((1.0 - c_s) * gain);
}

struct StcSchedule {
  double r_avg = 0.0;     // bit/s/Hz averaged over T2
  double energy_t2 = 0.0; // energy over T2 with T2 = 1
};

/// Average spectral efficiency and energy of a slot split into a linear
/// precoding part (ZF over `lp`) and `stc_gamma.size()` users served one at a
/// time by STC. `t_lp + t_stc` is normalized to 1.
inline StcSchedule stc_schedule(double t_lp, double t_stc, const DlTargets& lp,
                                const std::vector<double>& stc_gamma, const std::vector<double>& stc_gain) {
  require(t_lp >= 0.0 && t_stc >= 0.0 && t_lp + t_stc > 0.0, "stc_schedule: invalid time split");
  require(stc_gamma.size() == stc_gain.size(), "stc_schedule: size mismatch");
  const double t2 = t_lp + t_stc;
  StcSchedule out;
  for (double g : lp.gamma) out.r_avg += t_lp / t2 * std::log2(1.0 + g);
  if (!stc_gamma.empty()) {
    for (double g : stc_gamma) out.r_avg += t_stc / (t2 * static_cast<double>(stc_gamma.size())) * std::log2(1.0 + g);
  }
  if (lp.K() > 0) {
    const double den = 1.0 - lp.c_s() - lp.c() * (lp.B() + 1.0);
    require(den > 0.0, "stc_schedule: linear-precoding part infeasible");
    out.energy_t2 += lp.c() * lp.noise_w * lp.A() * t_lp / den;
  }
  for (std::size_t k = 0; k < stc_gamma.size(); ++k) {
    out.energy_t2 += t_stc * stc_power(stc_gamma[k], stc_gain[k], lp.c_s(), lp.noise_w);
  }
  return out;
}

/// STC fallback: MUEs are served one at a time with uniform STC inside the
/// nulled subspace, the remaining devices by ZF. `total_power` is the average
/// power over the slot.
inline DlSolution stc_asymptotic(const DlTargets& t, double stc_time_ratio) {
  t.validate();
  DlTargets lp = t;
  lp.gamma.clear();
  lp.tau_sq.clear();
  lp.gain.clear();
  lp.is_mue.clear();
  std::vector<double> g_stc, l_stc;
  for (std::size_t k = 0; k < t.K(); ++k) {
    if (t.is_mue[k]) {
      g_stc.push_back(t.gamma[k]);
      l_stc.push_back(t.gain[k]);
    } else {
      lp.gamma.push_back(t.gamma[k]);
      lp.tau_sq.push_back(t.tau_sq[k]);
      lp.gain.push_back(t.gain[k]);
      lp.is_mue.push_back(false);
    }
  }
  DlSolution sol;
  sol.scheme = Scheme::STC;
  sol.stc_time_ratio = stc_time_ratio;
  const DlSolution zf = zf_asymptotic(lp);
  if (!zf.feasible) {
    sol.reason = zf.reason;
    return sol;
  }
  const double t_lp = 1.0 / (1.0 + stc_time_ratio);
  const double t_stc = stc_time_ratio / (1.0 + stc_time_ratio);
  const StcSchedule sched = stc_schedule(t_lp, t_stc, lp, g_stc, l_stc);
  sol.r_avg = sched.r_avg;
  sol.energy_t2 = sched.energy_t2;
  sol.total_power = sched.energy_t2;
  sol.device_power.assign(t.K(), 0.0);
  std::size_t j = 0;
  for (std::size_t k = 0; k < t.K(); ++k) {
    if (t.is_mue[k]) {
      sol.device_power[k] = stc_power(t.gamma[k], t.gain[k], t.c_s(), t.noise_w);
    } else {
      sol.device_power[k] = zf.device_power[j++];
    }
  }
  sol.stc_power = sol.device_power;
  sol.feasible = true;
  return sol;
}

inline DlSolution dl_asymptotic(const DlTargets& t, Scheme scheme, double stc_time_ratio = 1.0) {
  switch (scheme) {
    case Scheme::RZF: return rzf_asymptotic(t);
    case Scheme::ZF: return zf_asymptotic(t);
    case Scheme::STC: return stc_asymptotic(t, stc_time_ratio);
  }
  throw InvalidArgument("dl_asymptotic: unknown scheme");
}

// ---------------------------------------------------------------------------
// Instantaneous precoding

/// Orthogonal projector onto the null space of H^H: I - H (H^H H)^{-1} H^H.
inline CMatrix projector(const CMatrix& h_nulled, Eigen::Index n) {
  CMatrix t = CMatrix::Identity(n, n);
  if (h_nulled.cols() == 0) return t;
  require(h_nulled.rows() == n, "projector: row count must equal N");
  require(h_nulled.cols() < n, "projector: needs S < N");
  const CMatrix gram = h_nulled.adjoint() * h_nulled;
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(gram, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 1e-12 * hi)) throw SingularMatrixError("projector: nulled channels are rank deficient");
  t -= h_nulled * gram.ldlt().solve(h_nulled.adjoint());
  return t;
}

/// RZF precoder V = T (U Lambda^{-1} U^H + N rho I)^{-1} U with U = T H_hat,
/// evaluated as T U (U^H U + N rho Lambda)^{-1} Lambda.
inline CMatrix rzf_precoder(const CMatrix& h_hat, const Eigen::VectorXd& gains, const CMatrix& t,
                            double rho) {
  require(rho > 0.0, "rzf_precoder: rho must be > 0");
  require(gains.size() == h_hat.cols(), "rzf_precoder: one pathloss per column");
  const double n = static_cast<double>(h_hat.rows());
  const CMatrix u = t * h_hat;
  CMatrix m = u.adjoint() * u;
  for (Eigen::Index k = 0; k < m.rows(); ++k) m(k, k) += n * rho * gains[k];
  Eigen::LLT<CMatrix> llt(m);
  if (llt.info() != Eigen::Success) throw SingularMatrixError("rzf_precoder: singular regularized Gram matrix");
  const CMatrix lambda = gains.cast<cdouble>().asDiagonal();
  return t * (u * llt.solve(lambda));
}

struct ZfPrecoder {
  CMatrix v;
  double condition = 1.0;
  bool ill_conditioned = false;
};

/// ZF precoder V = T H_hat (H_hat^H T H_hat)^{-1}.
inline ZfPrecoder zf_precoder(const CMatrix& h_hat, const CMatrix& t, double warn_condition = 1e10) {
  const CMatrix u = t * h_hat;
  const CMatrix gram = h_hat.adjoint() * u;
  ZfPrecoder out;
  if (gram.rows() == 0) {
    out.v = CMatrix(h_hat.rows(), 0);
    return out;
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(gram, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || !(hi / lo < 1e15)) throw SingularMatrixError("zf_precoder: H^H T H is singular");
  out.condition = hi / lo;
  out.ill_conditioned = out.condition > warn_condition;
  out.v = u * gram.ldlt().solve(CMatrix::Identity(gram.rows(), gram.cols()));
  return out;
}

/// DL SINR_k = p_k |h_k^H v_k|^2 / (sum_{i != k} p_i |h_k^H v_i|^2 + sigma^2).
inline std::vector<double> instantaneous_dl_sinr(const CMatrix& h, const CMatrix& v,
                                                 const std::vector<double>& powers, double noise_w) {
  require(h.cols() == v.cols() && h.rows() == v.rows(), "instantaneous_dl_sinr: shape mismatch");
  require(static_cast<Eigen::Index>(powers.size()) == v.cols(), "instantaneous_dl_sinr: one power per column");
  const Eigen::MatrixXd gain = (h.adjoint() * v).cwiseAbs2();
  std::vector<double> sinr(powers.size());
  for (Eigen::Index k = 0; k < gain.rows(); ++k) {
    double interference = noise_w;
    for (Eigen::Index i = 0; i < gain.cols(); ++i) {
      if (i != k) interference += powers[static_cast<std::size_t>(i)] * gain(k, i);
    }
    sinr[static_cast<std::size_t>(k)] = powers[static_cast<std::size_t>(k)] * gain(k, k) / interference;
  }
  return sinr;
}

/// Radiated power sum_k p_k ||v_k||^2.
inline double radiated_power(const CMatrix& v, const std::vector<double>& powers) {
  double total = 0.0;
  for (Eigen::Index k = 0; k < v.cols(); ++k) total += powers[static_cast<std::size_t>(k)] * v.col(k).squaredNorm();
  return total;
}

/// max |h_s^H v_k| / (||h_s|| ||v_k||) over nulled SCAs and precoder columns.
inline double nulling_residual(const CMatrix& h_nulled, const CMatrix& v) {
  double worst = 0.0;
  for (Eigen::Index s = 0; s < h_nulled.cols(); ++s) {
    const double hs = h_nulled.col(s).norm();
    for (Eigen::Index k = 0; k < v.cols(); ++k) {
      const double vk = v.col(k).norm();
      if (hs == 0.0 || vk == 0.0) continue;
      worst = std::max(worst, std::abs(h_nulled.col(s).dot(v.col(k))) / (hs * vk));
    }
  }
  return worst;
}

}  // namespace hetnet
