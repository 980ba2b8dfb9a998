#pragma once

#include <cmath>
#include <numbers>
#include <optional>

#include "hetnet/config.hpp"
#include "hetnet/quadrature.hpp"
#include "hetnet/special_functions.hpp"

namespace hetnet {

/// Mean interference at a receiver from transmitters of density alpha and
/// power p_bar spread uniformly outside a disc of radius d, by radial quadrature
/// of p_bar l(r) alpha 2 pi r over r >= d.
inline double expected_interference_quadrature(double alpha, double p_bar, const PathlossModel& model, double d) {
  require(d > 0.0, "expected_interference: d must be > 0");
  model.validate();
  if (alpha == 0.0 || p_bar == 0.0) return 0.0;
  auto integrand = [&](double r) { return p_bar * model(r) * alpha * 2.0 * std::numbers::pi * r; };
  return quadrature::integrate_to_infinity(integrand, d, 1e-13);
}

/// Far-field form 4 pi alpha p_bar L cutoff^beta / ((beta - 2) d^(beta - 2)).
inline double expected_interference_far_field(double alpha, double p_bar, const PathlossModel& model, double d) {
  const double beta = model.exponent;
  return 4.0 * std::numbers::pi * alpha * p_bar * model.ref_gain / (beta - 2.0) *
         std::pow(model.cutoff_m, beta) / std::pow(d, beta - 2.0);
}

/// Closed form through 2F1(1, 1 - 2/beta; 2 - 2/beta; -(cutoff/d)^beta); falls
/// back to quadrature when the hypergeometric series does not converge.
inline double expected_interference(double alpha, double p_bar, const PathlossModel& model, double d) {
  require(d > 0.0, "expected_interference: d must be > 0");
  require(alpha >= 0.0 && p_bar >= 0.0, "expected_interference: density and power must be >= 0");
  model.validate();
  if (alpha == 0.0 || p_bar == 0.0) return 0.0;
  const double beta = model.exponent;
  const double z = -std::pow(model.cutoff_m / d, beta);
  const std::optional<double> f = hyp2f1(1.0, 1.0 - 2.0 / beta, 2.0 - 2.0 / beta, z);
  if (!f) return expected_interference_quadrature(alpha, p_bar, model, d);
  return expected_interference_far_field(alpha, p_bar, model, d) * *f;
}

}  // namespace hetnet
