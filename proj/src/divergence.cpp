#include "convbandit/divergence.hpp"

#include <cmath>
#include <string>

namespace convbandit {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(std::string("divergence: ") + what);
}

}  // namespace

double bernoulli_kl(double p, double q) {
  require(p >= 0.0 && p <= 1.0, "p must lie in [0, 1]");
  require(q >= 0.0 && q <= 1.0, "q must lie in [0, 1]");
  if (p == q) return 0.0;
  if (q == 0.0 || q == 1.0) {
    throw InfiniteDivergenceError("bernoulli_kl(p, q) is infinite for q in {0, 1} with p != q");
  }
  double v = 0.0;
  if (p > 0.0) v += p * std::log(p / q);
  if (p < 1.0) v += (1.0 - p) * std::log((1.0 - p) / (1.0 - q));
  // Mathematically nonnegative; clip the odd -1e-18 from cancellation.
  return v < 0.0 ? 0.0 : v;
}

double poisson_kl(double p, double q) {
  require(p >= 0.0, "p must be nonnegative");
  require(q > 0.0, "q must be positive");
  if (p == 0.0) return q;
  double v = p * std::log(p / q) + q - p;
  return v < 0.0 ? 0.0 : v;
}

double klucb_invert(double theta_hat, double n_eff, double budget) {
  require(n_eff > 0.0, "n_eff must be positive");
  require(budget >= 0.0, "budget must be nonnegative");
  require(theta_hat >= 0.0, "theta_hat must be nonnegative");
  if (theta_hat >= 1.0) return 1.0;
  if (budget == 0.0) return theta_hat;
  if (n_eff * poisson_kl(theta_hat, 1.0) <= budget) return 1.0;

  // Invariant: n_eff * d(lo) <= budget < n_eff * d(hi).
  double lo = theta_hat;
  double hi = 1.0;
  for (int it = 0; it < 64 && hi - lo > 1e-13; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (n_eff * poisson_kl(theta_hat, mid) <= budget) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

}  // namespace convbandit
