#pragma once

#include <cstdint>
#include <span>

#include "cag/vec.hpp"

namespace cag {

// Spherical quadratic lower model
//   phi_k(x) = phi_star + (gamma / 2) * ||x - v||^2
// maintained alongside the iterates. f(x_k) <= phi_star certifies the
// accelerated convergence rate (see nesterov_bound).
struct EstimateState {
  double gamma = 0.0;
  Vector v;
  double phi_star = 0.0;
  double L = 0.0;
  double ell = 0.0;
};

struct ThetaGamma {
  double theta = 0.0;
  double gamma_next = 0.0;
};

// phi_0(x) = f0 + (L/2)||x - x0||^2.
EstimateState init_estimate(double f0, std::span<const double> x0, double L, double ell = 0.0);

// Positive root of L t^2 + (gamma - ell) t - gamma = 0 and
// gamma_next = (1 - t) gamma + t ell. Verifies t^2 / (2 gamma_next) = 1/(2L)
// to 1e-12 relative and throws InvalidState otherwise.
ThetaGamma compute_theta_gamma(double L, double ell, double gamma);

// Relative residual |t^2/(2 gamma_next) - 1/(2L)| / (1/(2L)).
double theta_identity_residual(double L, const ThetaGamma& tg);

// Mixes the linearization of f at bar_x into the model with weight theta.
EstimateState advance_estimate(const EstimateState& state, const ThetaGamma& tg,
                               std::span<const double> bar_x, double bar_f,
                               std::span<const double> bar_g);

// L * min((1 - sqrt(ell/L))^k, 4/(k+2)^2) * dist0_sq.
double nesterov_bound(double L, double ell, std::int64_t k, double dist0_sq);

}  // namespace cag
