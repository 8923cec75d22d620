#include "cag/estimate_sequence.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "cag/errors.hpp"

namespace cag {

namespace {
constexpr double kIdentityTolerance = 1e-12;
}

EstimateState init_estimate(double f0, std::span<const double> x0, double L, double ell) {
  if (!(L > 0.0)) throw std::invalid_argument("init_estimate: L must be positive");
  return EstimateState{L, Vector(x0.begin(), x0.end()), f0, L, ell};
}

ThetaGamma compute_theta_gamma(double L, double ell, double gamma) {
  if (!(gamma > 0.0)) throw InvalidState("compute_theta_gamma: gamma must be positive");
  if (!(L > 0.0) || ell < 0.0 || ell > L) {
    throw std::invalid_argument("compute_theta_gamma: need L > 0 and 0 <= ell <= L");
  }
  // a = L, b = gamma - ell, c = -gamma. Roots have opposite signs since c < 0;
  // pick the cancellation-free expression for the positive one.
  const double b = gamma - ell;
  const double sqrt_disc = std::sqrt(b * b + 4.0 * L * gamma);
  double theta = b >= 0.0 ? (2.0 * gamma) / (b + sqrt_disc) : (sqrt_disc - b) / (2.0 * L);
  // One Newton step on the residual tightens the last couple of ulps.
  const double residual = (L * theta + b) * theta - gamma;
  theta -= residual / (2.0 * L * theta + b);
  theta = std::min(theta, 1.0);

  ThetaGamma tg{theta, (1.0 - theta) * gamma + theta * ell};
  const double rel = theta_identity_residual(L, tg);
  if (!(rel <= kIdentityTolerance)) {
    std::ostringstream msg;
    msg << "theta/gamma identity violated: relative residual " << rel << " (L=" << L
        << ", ell=" << ell << ", gamma=" << gamma << ")";
    throw InvalidState(msg.str());
  }
  return tg;
}

double theta_identity_residual(double L, const ThetaGamma& tg) {
  const double target = 1.0 / (2.0 * L);
  const double lhs = tg.theta * tg.theta / (2.0 * tg.gamma_next);
  return std::abs(lhs - target) / target;
}

EstimateState advance_estimate(const EstimateState& state, const ThetaGamma& tg,
                               std::span<const double> bar_x, double bar_f,
                               std::span<const double> bar_g) {
  const double theta = tg.theta;
  const double gamma = state.gamma;
  const double gamma_next = tg.gamma_next;
  const double ell = state.ell;

  // Cross terms use the old center.
  Vector diff = combine(1.0, state.v, -1.0, bar_x);  // v - bar_x
  const double dist_sq = squared_norm(diff);
  const double g_dot_diff = dot(bar_g, diff);
  const double g_sq = squared_norm(bar_g);

  EstimateState next;
  next.L = state.L;
  next.ell = ell;
  next.gamma = gamma_next;

  const double inv = 1.0 / gamma_next;
  // [(1-t) gamma v + t ell bar_x - t bar_g] / gamma_next
  next.v = combine((1.0 - theta) * gamma * inv, state.v, theta * ell * inv, bar_x);
  axpy(-theta * inv, bar_g, next.v);

  next.phi_star = (1.0 - theta) * state.phi_star + theta * bar_f -
                  theta * theta / (2.0 * gamma_next) * g_sq +
                  theta * (1.0 - theta) * gamma / gamma_next *
                      (ell * dist_sq / 2.0 + g_dot_diff);
  return next;
}

double nesterov_bound(double L, double ell, std::int64_t k, double dist0_sq) {
  if (k < 0) throw std::invalid_argument("nesterov_bound: k must be nonnegative");
  const double ratio = std::clamp(ell / L, 0.0, 1.0);
  const double geometric = std::pow(1.0 - std::sqrt(ratio), static_cast<double>(k));
  const double kk = static_cast<double>(k) + 2.0;
  const double sublinear = 4.0 / (kk * kk);
  return L * std::min(geometric, sublinear) * dist0_sq;
}

}  // namespace cag
