#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "hetnet/errors.hpp"

namespace hetnet::quadrature {

namespace detail {

// Gauss-Kronrod 7/15 nodes and weights on [-1, 1].
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double value;
  double error;
};

template <typename F>
Panel gauss_kronrod_15(F&& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    const double sum = f(center - dx) + f(center + dx);
    kronrod += kKronrodWeights[j] * sum;
    // Gauss nodes are the odd-indexed Kronrod nodes.
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * sum;
  }
  return {kronrod * half, std::abs((kronrod - gauss) * half)};
}

template <typename F>
double adaptive(F& f, double a, double b, double abs_tol, double rel_tol, int depth,
                double whole) {
  const Panel panel = gauss_kronrod_15(f, a, b);
  if (panel.error <= std::max(abs_tol, rel_tol * std::abs(whole))) return panel.value;
  if (depth <= 0) {
    throw ConvergenceError("adaptive quadrature: recursion limit reached on [" +
                           std::to_string(a) + ", " + std::to_string(b) + "]");
  }
  const double mid = 0.5 * (a + b);
  return adaptive(f, a, mid, 0.5 * abs_tol, rel_tol, depth - 1, whole) +
         adaptive(f, mid, b, 0.5 * abs_tol, rel_tol, depth - 1, whole);
}

}  // namespace detail

/// Adaptive Gauss-Kronrod (7/15) integration of f over [a, b].
template <typename F>
double integrate(F&& f, double a, double b, double rel_tol = 1e-12, double abs_tol = 0.0,
                 int max_depth = 48) {
  const double estimate = detail::gauss_kronrod_15(f, a, b).value;
  return detail::adaptive(f, a, b, abs_tol, rel_tol, max_depth, estimate);
}

/// Integral of f over [a, inf) for a > 0, using r = a / t on t in (0, 1].
template <typename F>
double integrate_to_infinity(F&& f, double a, double rel_tol = 1e-12) {
  require(a > 0.0, "integrate_to_infinity: lower limit must be positive");
  auto mapped = [&](double t) {
    if (t <= 0.0) return 0.0;
    const double r = a / t;
    return f(r) * a / (t * t);
  };
  return integrate(mapped, 0.0, 1.0, rel_tol);
}

/// Composite Simpson rule with `panels` (even) subintervals.
template <typename F>
auto simpson(F&& f, double a, double b, int panels) {
  require(panels >= 2 && panels % 2 == 0, "simpson: panel count must be even and >= 2");
  const double h = (b - a) / panels;
  auto sum = f(a) + f(b);
  for (int i = 1; i < panels; ++i) {
    sum += (i % 2 == 1 ? 4.0 : 2.0) * f(a + i * h);
  }
  return sum * (h / 3.0);
}

}  // namespace hetnet::quadrature
