#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hetnet/channel.hpp"
#include "hetnet/dl_precoding.hpp"
#include "hetnet/layout.hpp"
#include "hetnet/parallel.hpp"
#include "hetnet/random.hpp"
#include "hetnet/ul_solver.hpp"

namespace hetnet {

/// MMSE receiver G = (sum p_k h_hat_k h_hat_k^H + sum p_s h_s h_s^H + N sigma^2 I)^{-1} H_hat.
inline CMatrix mmse_receiver(const CMatrix& h_hat, const CMatrix& h_nulled, const std::vector<double>& powers,
                             const std::vector<double>& nulled_powers, double noise_w) {
  const Eigen::Index n = h_hat.rows();
  require(static_cast<Eigen::Index>(powers.size()) == h_hat.cols(), "mmse_receiver: one power per device");
  require(static_cast<Eigen::Index>(nulled_powers.size()) == h_nulled.cols(), "mmse_receiver: one power per SCA");
  CMatrix cov = CMatrix::Identity(n, n) * (static_cast<double>(n) * noise_w);
  for (Eigen::Index k = 0; k < h_hat.cols(); ++k) {
    cov.selfadjointView<Eigen::Lower>().rankUpdate(h_hat.col(k), powers[static_cast<std::size_t>(k)]);
  }
  for (Eigen::Index s = 0; s < h_nulled.cols(); ++s) {
    cov.selfadjointView<Eigen::Lower>().rankUpdate(h_nulled.col(s), nulled_powers[static_cast<std::size_t>(s)]);
  }
  Eigen::LLT<CMatrix, Eigen::Lower> llt(cov);
  if (llt.info() != Eigen::Success) throw SingularMatrixError("mmse_receiver: covariance not positive definite");
  return llt.solve(h_hat);
}

/// UL SINR of each column of G, with per-antenna noise N sigma^2.
inline std::vector<double> instantaneous_ul_sinr(const CMatrix& g, const CMatrix& h, const CMatrix& h_nulled,
                                                 const std::vector<double>& powers,
                                                 const std::vector<double>& nulled_powers, double noise_w) {
  const double n = static_cast<double>(h.rows());
  const Eigen::MatrixXd own = (g.adjoint() * h).cwiseAbs2();
  const Eigen::MatrixXd other = (g.adjoint() * h_nulled).cwiseAbs2();
  std::vector<double> sinr(powers.size());
  for (Eigen::Index k = 0; k < g.cols(); ++k) {
    double interference = n * noise_w * g.col(k).squaredNorm();
    for (Eigen::Index i = 0; i < own.cols(); ++i) {
      if (i != k) interference += powers[static_cast<std::size_t>(i)] * own(k, i);
    }
    for (Eigen::Index s = 0; s < other.cols(); ++s) interference += nulled_powers[static_cast<std::size_t>(s)] * other(k, s);
    sinr[static_cast<std::size_t>(k)] = powers[static_cast<std::size_t>(k)] * own(k, k) / interference;
  }
  return sinr;
}

/// SUE SINR p_s |h_s|^2 / (sigma^2 + sum_k p_k |h_{s,k}|^2); also returns the
/// interference sum through `interference`.
inline double sue_sinr(cdouble access, const CMatrix& cross, Eigen::Index s, double sca_power,
                       const std::vector<double>& powers, double noise_w, double* interference = nullptr) {
  double i_sum = 0.0;
  for (Eigen::Index k = 0; k < cross.cols(); ++k) i_sum += powers[static_cast<std::size_t>(k)] * std::norm(cross(s, k));
  if (interference) *interference = i_sum;
  return sca_power * std::norm(access) / (noise_w + i_sum);
}

struct TrialRecord {
  std::uint64_t trial = 0;
  int device_id = 0;
  std::string cls;
  double target_sinr = 0.0;
  double achieved_sinr = 0.0;
  double power_w = 0.0;
};

/// Running statistics of one device over the trials of one geometry.
struct DeviceStats {
  int device_id = 0;
  std::string cls;
  double target_sinr = 0.0;
  double power_w = 0.0;  // allocated (asymptotic) power
  std::size_t n = 0;
  double sum_sinr = 0.0;
  double sum_ratio = 0.0;
  double sum_abs_err = 0.0;
  double sum_ratio_sq = 0.0;

  void add(double sinr) {
    const double r = target_sinr > 0.0 ? sinr / target_sinr : 0.0;
    ++n;
    sum_sinr += sinr;
    sum_ratio += r;
    sum_ratio_sq += r * r;
    sum_abs_err += std::abs(r - 1.0);
  }
  double mean_sinr() const { return n ? sum_sinr / static_cast<double>(n) : 0.0; }
  double mean_ratio() const { return n ? sum_ratio / static_cast<double>(n) : 0.0; }
};

/// Aggregated Monte-Carlo outcome. Device entries are appended per geometry,
/// so a device redrawn in a later geometry appears again.
struct McStats {
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  std::vector<DeviceStats> devices;
  double sum_radiated_power = 0.0;
  double max_nulling_residual = 0.0;
  std::size_t ill_conditioned_trials = 0;
  // SUE side (UL runs).
  std::vector<DeviceStats> sues;
  double sum_sue_rate_nats = 0.0;
  double sum_sue_inr = 0.0;  // empirical interference-to-noise, summed over SUE samples
  std::size_t sue_samples = 0;
  std::vector<TrialRecord> records;

  double mean_radiated_power() const { return trials ? sum_radiated_power / static_cast<double>(trials) : 0.0; }
  double sue_rate_nats() const { return sue_samples ? sum_sue_rate_nats / static_cast<double>(sue_samples) : 0.0; }
  double sue_rate_bits() const { return sue_rate_nats() / std::numbers::ln2; }
  double mean_sue_inr() const { return sue_samples ? sum_sue_inr / static_cast<double>(sue_samples) : 0.0; }

  /// Mean over devices of |E_trials[SINR] / gamma - 1|.
  double sinr_bias() const {
    double s = 0.0;
    std::size_t m = 0;
    for (const auto& d : devices) {
      if (d.target_sinr <= 0.0 || d.n == 0) continue;
      s += std::abs(d.mean_sinr() / d.target_sinr - 1.0);
      ++m;
    }
    return m ? s / static_cast<double>(m) : 0.0;
  }
  /// Mean over devices and trials of |SINR / gamma - 1|.
  double per_realization_error() const {
    double s = 0.0;
    std::size_t m = 0;
    for (const auto& d : devices) {
      if (d.target_sinr <= 0.0) continue;
      s += d.sum_abs_err;
      m += d.n;
    }
    return m ? s / static_cast<double>(m) : 0.0;
  }

  void merge(const McStats& other) {
    trials += other.trials;
    devices.insert(devices.end(), other.devices.begin(), other.devices.end());
    sues.insert(sues.end(), other.sues.begin(), other.sues.end());
    sum_radiated_power += other.sum_radiated_power;
    max_nulling_residual = std::max(max_nulling_residual, other.max_nulling_residual);
    ill_conditioned_trials += other.ill_conditioned_trials;
    sum_sue_rate_nats += other.sum_sue_rate_nats;
    sum_sue_inr += other.sum_sue_inr;
    sue_samples += other.sue_samples;
    records.insert(records.end(), other.records.begin(), other.records.end());
  }
};

struct McOptions {
  std::size_t trials = 1000;
  std::uint64_t seed = 1;
  std::uint64_t trial_offset = 0;  // global index of the first trial (substream selection)
  unsigned threads = 1;
  bool keep_records = false;
  const std::vector<CMatrix>* roots = nullptr;  // correlation roots of served devices
};

inline std::string ul_class(DeviceKind k) { return std::string(to_string(k)) + "_UL"; }
inline std::string dl_class(DeviceKind k) {
  return k == DeviceKind::SCA ? "SCA_BH_DL" : std::string(to_string(k)) + "_DL";
}

inline ChannelSet trial_channels(const BandLayout& layout, const McOptions& opt, std::size_t t) {
  static const std::vector<CMatrix> none;
  return draw_channels(layout, substream_seed(opt.seed, Stream::Channel, opt.trial_offset + t),
                       opt.roots ? *opt.roots : none);
}

struct UlTrial {
  std::vector<double> sinr;
  std::vector<double> sue_sinr;
  std::vector<double> sue_interference;
};

inline UlTrial ul_trial(const BandLayout& layout, const UlSolution& ul, const ChannelSet& ch) {
  UlTrial out;
  const CMatrix g = mmse_receiver(ch.h_hat, ch.h_nulled, ul.device_power, ul.sca_dl_power, layout.noise_w);
  out.sinr = instantaneous_ul_sinr(g, ch.h, ch.h_nulled, ul.device_power, ul.sca_dl_power, layout.noise_w);
  for (Eigen::Index s = 0; s < ch.access.size(); ++s) {
    double interference = 0.0;
    out.sue_sinr.push_back(sue_sinr(ch.access[s], ch.cross, s, ul.sca_dl_power[static_cast<std::size_t>(s)],
                                    ul.device_power, layout.noise_w, &interference));
    out.sue_interference.push_back(interference);
  }
  return out;
}

/// Uplink trials on a fixed layout: MMSE SINRs of the served set and SUE SINRs.
inline McStats run_ul_trials(const BandLayout& layout, const UlSolution& ul, const McOptions& opt) {
  require(ul.feasible, "run_ul_trials: UL solution is infeasible");
  require(opt.trials >= 1, "run_ul_trials: trials must be >= 1");
  std::vector<UlTrial> results(opt.trials);
  parallel_for(opt.trials, opt.threads, [&](std::size_t t) {
    results[t] = ul_trial(layout, ul, trial_channels(layout, opt, t));
  });
  McStats st;
  st.trials = opt.trials;
  st.seed = opt.seed;
  for (std::size_t k = 0; k < layout.K(); ++k) {
    const auto& d = layout.served[k];
    st.devices.push_back({d.device_id, ul_class(d.kind), d.target_sinr, ul.device_power[k]});
  }
  for (std::size_t s = 0; s < layout.S(); ++s) {
    const auto& l = layout.links[s];
    st.sues.push_back({l.sue_id, "SUE_ACCESS_DL", l.target_sinr, ul.sca_dl_power[s]});
  }
  for (std::size_t t = 0; t < opt.trials; ++t) {
    const UlTrial& r = results[t];
    for (std::size_t k = 0; k < r.sinr.size(); ++k) {
      st.devices[k].add(r.sinr[k]);
      if (opt.keep_records) {
        const auto& d = st.devices[k];
        st.records.push_back({opt.trial_offset + t, d.device_id, d.cls, d.target_sinr, r.sinr[k], d.power_w});
      }
    }
    for (std::size_t s = 0; s < r.sue_sinr.size(); ++s) {
      st.sues[s].add(r.sue_sinr[s]);
      st.sum_sue_rate_nats += std::log1p(r.sue_sinr[s]);
      st.sum_sue_inr += r.sue_interference[s] / layout.noise_w;
      ++st.sue_samples;
      if (opt.keep_records) {
        const auto& d = st.sues[s];
        st.records.push_back({opt.trial_offset + t, d.device_id, d.cls, d.target_sinr, r.sue_sinr[s], d.power_w});
      }
    }
  }
  return st;
}

struct DlTrial {
  std::vector<double> sinr;
  std::vector<double> radiated;  // per-device p_k ||v_k||^2 (average over the slot for STC)
  double total_power = 0.0;
  double nulling = 0.0;
  bool ill_conditioned = false;
};

inline Eigen::VectorXd served_gains(const BandLayout& layout) {
  Eigen::VectorXd g(static_cast<Eigen::Index>(layout.K()));
  for (std::size_t k = 0; k < layout.K(); ++k) g[static_cast<Eigen::Index>(k)] = layout.served[k].gain;
  return g;
}

/// One DL realization: build T and the scheme's precoder from the estimates,
/// evaluate SINRs with the true channels.
inline DlTrial dl_trial(const BandLayout& layout, const DlSolution& dl, const ChannelSet& ch) {
  const Eigen::Index n = layout.n_antennas;
  const CMatrix t = projector(ch.h_nulled, n);
  DlTrial out;
  const std::vector<double>& p = dl.device_power;
  auto finish = [&](const CMatrix& v, const std::vector<double>& powers) {
    out.sinr = instantaneous_dl_sinr(ch.h, v, powers, layout.noise_w);
    out.radiated.resize(powers.size());
    for (Eigen::Index k = 0; k < v.cols(); ++k) {
      out.radiated[static_cast<std::size_t>(k)] = powers[static_cast<std::size_t>(k)] * v.col(k).squaredNorm();
    }
    out.total_power = radiated_power(v, powers);
    out.nulling = nulling_residual(ch.h_nulled, v);
  };
  switch (dl.scheme) {
    case Scheme::RZF: {
      finish(rzf_precoder(ch.h_hat, served_gains(layout), t, dl.rho), p);
      break;
    }
    case Scheme::ZF: {
      const ZfPrecoder zf = zf_precoder(ch.h_hat, t);
      out.ill_conditioned = zf.ill_conditioned;
      finish(zf.v, p);
      break;
    }
    case Scheme::STC: {
      std::vector<Eigen::Index> lp_idx, stc_idx;
      for (std::size_t k = 0; k < layout.K(); ++k) {
        (layout.served[k].kind == DeviceKind::MUE ? stc_idx : lp_idx).push_back(static_cast<Eigen::Index>(k));
      }
      const double t_lp = 1.0 / (1.0 + dl.stc_time_ratio);
      const double t_stc = 1.0 - t_lp;
      out.sinr.assign(layout.K(), 0.0);
      out.radiated.assign(layout.K(), 0.0);
      if (!lp_idx.empty()) {
        CMatrix h_lp(n, static_cast<Eigen::Index>(lp_idx.size())), hh_lp(n, h_lp.cols());
        std::vector<double> p_lp;
        for (Eigen::Index j = 0; j < h_lp.cols(); ++j) {
          h_lp.col(j) = ch.h.col(lp_idx[static_cast<std::size_t>(j)]);
          hh_lp.col(j) = ch.h_hat.col(lp_idx[static_cast<std::size_t>(j)]);
          p_lp.push_back(p[static_cast<std::size_t>(lp_idx[static_cast<std::size_t>(j)])]);
        }
        const ZfPrecoder zf = zf_precoder(hh_lp, t);
        out.ill_conditioned = zf.ill_conditioned;
        const std::vector<double> s = instantaneous_dl_sinr(h_lp, zf.v, p_lp, layout.noise_w);
        for (std::size_t j = 0; j < lp_idx.size(); ++j) {
          const auto k = static_cast<std::size_t>(lp_idx[j]);
          out.sinr[k] = s[j];
          out.radiated[k] = t_lp * p_lp[j] * zf.v.col(static_cast<Eigen::Index>(j)).squaredNorm();
          out.total_power += out.radiated[k];
        }
        out.nulling = nulling_residual(ch.h_nulled, zf.v);
      }
      for (Eigen::Index k : stc_idx) {
        const auto ku = static_cast<std::size_t>(k);
        const double gain = (t * ch.h.col(k)).squaredNorm();
        out.sinr[ku] = p[ku] * gain / (static_cast<double>(n) * layout.noise_w);
        out.radiated[ku] = t_stc * p[ku] * t.trace().real() / static_cast<double>(n);
        out.total_power += out.radiated[ku];
      }
      if (!stc_idx.empty()) out.nulling = std::max(out.nulling, nulling_residual(ch.h_nulled, t));
      break;
    }
  }
  return out;
}

/// Downlink trials on a fixed layout.
inline McStats run_dl_trials(const BandLayout& layout, const DlSolution& dl, const McOptions& opt) {
  require(dl.feasible, "run_dl_trials: DL solution is infeasible");
  require(opt.trials >= 1, "run_dl_trials: trials must be >= 1");
  std::vector<DlTrial> results(opt.trials);
  parallel_for(opt.trials, opt.threads, [&](std::size_t t) {
    results[t] = dl_trial(layout, dl, trial_channels(layout, opt, t));
  });
  McStats st;
  st.trials = opt.trials;
  st.seed = opt.seed;
  for (std::size_t k = 0; k < layout.K(); ++k) {
    const auto& d = layout.served[k];
    st.devices.push_back({d.device_id, dl_class(d.kind), d.target_sinr, dl.device_power[k]});
  }
  for (std::size_t t = 0; t < opt.trials; ++t) {
    const DlTrial& r = results[t];
    st.sum_radiated_power += r.total_power;
    st.max_nulling_residual = std::max(st.max_nulling_residual, r.nulling);
    st.ill_conditioned_trials += r.ill_conditioned;
    for (std::size_t k = 0; k < r.sinr.size(); ++k) {
      st.devices[k].add(r.sinr[k]);
      if (opt.keep_records) {
        const auto& d = st.devices[k];
        st.records.push_back({opt.trial_offset + t, d.device_id, d.cls, d.target_sinr, r.sinr[k], r.radiated[k]});
      }
    }
  }
  return st;
}

struct CorrelatedRzfResult {
  double rho_best = 0.0;
  double total_power = std::numeric_limits<double>::infinity();
  std::vector<double> device_power;
  std::vector<double> rho_grid;
  std::vector<double> power_grid;  // +inf where no positive allocation exists
  double max_nulling_residual = 0.0;
};

/// Log-spaced grid of `points` values over [center / span, center * span].
inline std::vector<double> log_grid(double center, double span, int points) {
  require(center > 0.0 && span >= 1.0 && points >= 2, "log_grid: invalid arguments");
  std::vector<double> g(static_cast<std::size_t>(points));
  const double lo = std::log(center / span);
  const double hi = std::log(center * span);
  for (int i = 0; i < points; ++i) g[static_cast<std::size_t>(i)] = std::exp(lo + (hi - lo) * i / (points - 1));
  return g;
}

/// Grid search of the RZF regularizer for correlated channels. For every rho
/// the powers solve p_k a_kk = gamma_k (sum_{i != k} p_i a_ki + sigma^2) with
/// a_ki = E|h_k^H v_i|^2 over the realizations; the total E[sum p_k ||v_k||^2]
/// is minimized over the grid.
inline CorrelatedRzfResult correlated_rzf(const BandLayout& layout, const std::vector<ChannelSet>& realizations,
                                          const std::vector<double>& rho_grid, unsigned threads = 1) {
  require(!realizations.empty(), "correlated_rzf: no realizations");
  require(!rho_grid.empty(), "correlated_rzf: empty rho grid");
  const auto kk = static_cast<Eigen::Index>(layout.K());
  const Eigen::VectorXd gains = served_gains(layout);
  CorrelatedRzfResult out;
  out.rho_grid = rho_grid;
  out.power_grid.assign(rho_grid.size(), std::numeric_limits<double>::infinity());
  std::vector<std::vector<double>> powers(rho_grid.size());
  std::vector<double> residual(rho_grid.size(), 0.0);
  std::vector<CMatrix> projectors;
  for (const auto& ch : realizations) projectors.push_back(projector(ch.h_nulled, layout.n_antennas));
  parallel_for(rho_grid.size(), threads, [&](std::size_t r) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(kk, kk);
    Eigen::VectorXd norms = Eigen::VectorXd::Zero(kk);
    for (std::size_t i = 0; i < realizations.size(); ++i) {
      const CMatrix v = rzf_precoder(realizations[i].h_hat, gains, projectors[i], rho_grid[r]);
      a += (realizations[i].h.adjoint() * v).cwiseAbs2();
      norms += v.colwise().squaredNorm().transpose();
      residual[r] = std::max(residual[r], nulling_residual(realizations[i].h_nulled, v));
    }
    const double inv = 1.0 / static_cast<double>(realizations.size());
    a *= inv;
    norms *= inv;
    Eigen::MatrixXd m(kk, kk);
    Eigen::VectorXd rhs(kk);
    for (Eigen::Index k = 0; k < kk; ++k) {
      const double g = layout.served[static_cast<std::size_t>(k)].target_sinr;
      for (Eigen::Index i = 0; i < kk; ++i) m(k, i) = i == k ? a(k, k) : -g * a(k, i);
      rhs[k] = g * layout.noise_w;
    }
    const Eigen::VectorXd p = m.partialPivLu().solve(rhs);
    if ((p.array() >= 0.0).all() && p.allFinite()) {
      out.power_grid[r] = p.dot(norms);
      powers[r].assign(p.data(), p.data() + p.size());
    }
  });
  for (std::size_t r = 0; r < rho_grid.size(); ++r) {
    out.max_nulling_residual = std::max(out.max_nulling_residual, residual[r]);
    if (out.power_grid[r] < out.total_power) {
      out.total_power = out.power_grid[r];
      out.rho_best = rho_grid[r];
      out.device_power = powers[r];
    }
  }
  if (!std::isfinite(out.total_power)) throw InvalidArgument("correlated_rzf: no feasible regularizer on the grid");
  return out;
}

}  // namespace hetnet
