#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

#include "hetnet/errors.hpp"

namespace hetnet {

namespace detail {

inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

// Power series, accurate for 0 < z <= 1.
inline double e1_series(double z) {
  double term = 1.0;
  double sum = 0.0;
  for (int k = 1; k < 200; ++k) {
    term *= -z / k;
    const double add = term / k;
    sum += add;
    if (std::abs(add) < 1e-17 * std::abs(sum)) break;
  }
  return -kEulerGamma - std::log(z) - sum;
}

// Modified Lentz evaluation of e^z E1(z), for z > 1.
inline double scaled_e1_fraction(double z) {
  constexpr double tiny = 1e-300;
  double b = z + 1.0;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -static_cast<double>(i) * i;
    b += 2.0;
    d = 1.0 / (an * d + b);
    c = b + an / c;
    const double del = c * d;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) return h;
  }
  throw ConvergenceError("exp_integral_e1: continued fraction did not converge");
}

}  // namespace detail

/// Exponential integral E1(z) for z > 0.
inline double exp_integral_e1(double z) {
  require(z > 0.0 && std::isfinite(z), "exp_integral_e1: argument must be positive and finite");
  if (z <= 1.0) return detail::e1_series(z);
  return std::exp(-z) * detail::scaled_e1_fraction(z);
}

/// e^z E1(z) without overflow for large z.
inline double scaled_exp_integral_e1(double z) {
  require(z > 0.0 && std::isfinite(z), "scaled_exp_integral_e1: argument must be positive and finite");
  if (z <= 1.0) return std::exp(z) * detail::e1_series(z);
  return detail::scaled_e1_fraction(z);
}

/// Unit in which an ergodic rate target is expressed.
enum class RateUnit { Bits, Nats };

/// Ergodic capacity E[ln(1 + g|h|^2)] of a Rayleigh link with mean SINR g, in nats.
inline double ergodic_rate_nats(double sinr) {
  require(sinr >= 0.0, "ergodic_rate_nats: SINR must be nonnegative");
  if (sinr == 0.0) return 0.0;
  return scaled_exp_integral_e1(1.0 / sinr);
}

/// Solve e^{1/g} E1(1/g) = target for g, where target is `rate` converted to nats.
///
/// The left side is increasing in g and bracketed by ln(1+2g)/2 < f(g) < ln(1+g),
/// so bisection on that bracket converges; a Newton polish follows.
inline double invert_ergodic_rate(double rate, RateUnit unit = RateUnit::Bits) {
  require(rate >= 0.0 && std::isfinite(rate), "invert_ergodic_rate: rate must be nonnegative");
  if (rate == 0.0) return 0.0;
  const double target = unit == RateUnit::Bits ? rate * std::numbers::ln2 : rate;
  require(target < 300.0, "invert_ergodic_rate: rate too large");
  double lo = std::expm1(target);
  double hi = 0.5 * std::expm1(2.0 * target);
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (ergodic_rate_nats(mid) < target) lo = mid; else hi = mid;
  }
  double g = 0.5 * (lo + hi);
  for (int it = 0; it < 3; ++it) {
    const double x = 1.0 / g;
    const double f = scaled_exp_integral_e1(x);
    const double slope = (1.0 / x - f) * x * x;
    if (!(slope > 0.0)) break;
    const double next = g - (f - target) / slope;
    if (!(next > lo * (1 - 1e-12) && next < hi * (1 + 1e-12))) break;
    g = next;
  }
  return g;
}

/// Gauss series of 2F1(a, b; c; z); nullopt when the series does not settle.
inline std::optional<double> hyp2f1_series(double a, double b, double c, double z,
                                           int max_terms = 200000) {
  if (std::abs(z) >= 1.0) return std::nullopt;
  double term = 1.0;
  double sum = 1.0;
  for (int n = 0; n < max_terms; ++n) {
    term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * z;
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) return sum;
    if (!std::isfinite(sum)) return std::nullopt;
  }
  return std::nullopt;
}

/// Gauss hypergeometric 2F1(a, b; c; z) for real z < 1.
///
/// Direct series for |z| <= 1/2, Pfaff transformation onto z/(z-1) for z < -1/2.
/// Returns nullopt where the series route does not converge.
inline std::optional<double> hyp2f1(double a, double b, double c, double z) {
  require(z < 1.0, "hyp2f1: only real z < 1 is supported");
  if (z >= -0.5) return hyp2f1_series(a, b, c, z);
  const double w = z / (z - 1.0);
  auto inner = hyp2f1_series(a, c - b, c, w);
  if (!inner) return std::nullopt;
  return std::pow(1.0 - z, -a) * *inner;
}

}  // namespace hetnet
