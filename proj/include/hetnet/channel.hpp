#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "hetnet/layout.hpp"
#include "hetnet/quadrature.hpp"
#include "hetnet/random.hpp"

namespace hetnet {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using cdouble = std::complex<double>;

/// One small-scale fading realization of a band.
struct ChannelSet {
  CMatrix h;         // N x K true BS <-> served channels
  CMatrix h_hat;     // N x K estimates
  CMatrix h_nulled;  // N x S BS <-> nulled SCA channels (known at the BS)
  CVector access;    // S, SCA -> own SUE
  CMatrix cross;     // S x K, served device k -> SUE s
};

/// Draw a realization: entries of each BS channel are CN(0, l), the estimate is
/// sqrt(1 - tau^2) h + tau sqrt(l) w with independent w, scalar links are CN(0, l).
/// `roots`, when non-empty, holds one correlation square root per served device.
inline ChannelSet draw_channels(const BandLayout& layout, std::uint64_t seed,
                                const std::vector<CMatrix>& roots = {}) {
  const int n = layout.n_antennas;
  const auto k_count = static_cast<Eigen::Index>(layout.K());
  const auto s_count = static_cast<Eigen::Index>(layout.S());
  require(roots.empty() || roots.size() == layout.K(), "draw_channels: one correlation root per device");
  for (const auto& link : layout.links) {
    require(link.cross_gain.size() == layout.K(), "draw_channels: cross-gain row must have K entries");
  }
  Rng rng(seed);
  ChannelSet ch;
  ch.h.resize(n, k_count);
  ch.h_hat.resize(n, k_count);
  CVector z(n), w(n);
  for (Eigen::Index k = 0; k < k_count; ++k) {
    const ServedDevice& d = layout.served[static_cast<std::size_t>(k)];
    for (int i = 0; i < n; ++i) z[i] = complex_normal(rng);
    for (int i = 0; i < n; ++i) w[i] = complex_normal(rng);
    const double amp = std::sqrt(d.gain);
    const double tau = std::sqrt(d.tau_sq);
    CVector est = std::sqrt(1.0 - d.tau_sq) * z + tau * w;
    if (!roots.empty()) {
      const CMatrix& r = roots[static_cast<std::size_t>(k)];
      ch.h.col(k) = amp * (r * z);
      ch.h_hat.col(k) = amp * (r * est);
    } else {
      ch.h.col(k) = amp * z;
      ch.h_hat.col(k) = d.tau_sq == 0.0 ? ch.h.col(k) : CVector(amp * est);
    }
  }
  ch.h_nulled.resize(n, s_count);
  for (Eigen::Index s = 0; s < s_count; ++s) {
    const double amp = std::sqrt(layout.links[static_cast<std::size_t>(s)].backhaul_gain);
    for (int i = 0; i < n; ++i) ch.h_nulled(i, s) = amp * complex_normal(rng);
  }
  ch.access.resize(s_count);
  ch.cross.resize(s_count, k_count);
  for (Eigen::Index s = 0; s < s_count; ++s) {
    const SmallCellLink& link = layout.links[static_cast<std::size_t>(s)];
    ch.access[s] = std::sqrt(link.access_gain) * complex_normal(rng);
    for (Eigen::Index k = 0; k < k_count; ++k) {
      ch.cross(s, k) = std::sqrt(link.cross_gain[static_cast<std::size_t>(k)]) * complex_normal(rng);
    }
  }
  return ch;
}

/// Lag-m coefficient (1/dphi) * integral of exp(i pi m cos(phi)) over the arc
/// [theta - dphi/2, theta + dphi/2]. Composite Simpson with Richardson checks,
/// starting from 256 panels.
inline cdouble correlation_coefficient(double theta, double dphi, int lag, double tol = 1e-11) {
  require(dphi > 0.0, "correlation_matrix: angular spread must be > 0");
  if (lag == 0) return 1.0;
  auto f = [&](double phi) {
    const double arg = std::numbers::pi * lag * std::cos(phi);
    return cdouble(std::cos(arg), std::sin(arg));
  };
  const double a = theta - 0.5 * dphi;
  const double b = theta + 0.5 * dphi;
  int panels = 256;
  cdouble coarse = quadrature::simpson(f, a, b, panels);
  for (int level = 0; level < 12; ++level) {
    panels *= 2;
    const cdouble fine = quadrature::simpson(f, a, b, panels);
    const cdouble delta = (fine - coarse) / 15.0;
    if (std::abs(delta) <= tol) return (fine + delta) / dphi;
    coarse = fine;
  }
  throw ConvergenceError("correlation_matrix: quadrature did not converge for lag " +
                         std::to_string(lag));
}

/// Toeplitz Hermitian correlation matrix of a uniform linear array for a
/// departure angle theta and angular spread dphi.
inline CMatrix correlation_matrix(double theta, double dphi, int n) {
  require(n >= 1, "correlation_matrix: N must be >= 1");
  std::vector<cdouble> lag(static_cast<std::size_t>(n));
  for (int m = 0; m < n; ++m) lag[static_cast<std::size_t>(m)] = correlation_coefficient(theta, dphi, m);
  CMatrix theta_m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int l = 0; l < n; ++l) {
      const int m = i - l;
      theta_m(i, l) = m >= 0 ? lag[static_cast<std::size_t>(m)] : std::conj(lag[static_cast<std::size_t>(-m)]);
    }
  }
  return theta_m;
}

/// Hermitian square root, negative eigenvalues (round-off) clamped to zero.
inline CMatrix hermitian_sqrt(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(m);
  if (eig.info() != Eigen::Success) throw ConvergenceError("hermitian_sqrt: eigen-decomposition failed");
  const Eigen::VectorXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * root.asDiagonal() * eig.eigenvectors().adjoint();
}

/// Correlation roots for every served device, departure angles uniform in [0, 2 pi).
inline std::vector<CMatrix> draw_correlation_roots(const BandLayout& layout, double dphi,
                                                   std::uint64_t seed) {
  Rng rng(seed);
  std::vector<CMatrix> roots;
  roots.reserve(layout.K());
  for (std::size_t k = 0; k < layout.K(); ++k) {
    const double theta = uniform(rng, 0.0, 2.0 * std::numbers::pi);
    roots.push_back(hermitian_sqrt(correlation_matrix(theta, dphi, layout.n_antennas)));
  }
  return roots;
}

}  // namespace hetnet
