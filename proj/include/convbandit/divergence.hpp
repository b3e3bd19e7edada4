#pragma once

#include <stdexcept>

namespace convbandit {

/// Thrown when a Kullback-Leibler divergence is infinite (absolute-continuity
/// failure, e.g. d(p, 0) or d(p, 1) with p in the open interval). Raised as a
/// distinct condition instead of returning a huge float.
class InfiniteDivergenceError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Bernoulli KL divergence d(p, q) = p log(p/q) + (1-p) log((1-p)/(1-q)),
/// in nats, with the convention 0 log 0 = 0.
///
/// Requires p in [0,1] and q in [0,1]; throws InfiniteDivergenceError when
/// q is 0 or 1 with p != q.
double bernoulli_kl(double p, double q);

/// Poisson KL divergence d_pois(p, q) = p log(p/q) + q - p, in nats, with
/// 0 log 0 = 0 (so d_pois(0, q) = q). Requires p >= 0 and q > 0.
double poisson_kl(double p, double q);

/// Largest q in [theta_hat, 1] with n_eff * d_pois(theta_hat, q) <= budget.
///
/// Solved by bisection (d_pois(theta_hat, .) is strictly increasing to the
/// right of theta_hat) with a hard cap of 64 iterations; the bracket is
/// narrowed until its width is below 1e-13, which keeps the residual
/// |n_eff * d_pois(theta_hat, U) - budget| under 1e-9 even for effective
/// counts as large as 1e4. Returns 1 when the cap binds, and min(theta_hat, 1)
/// when budget == 0. Inputs theta_hat >= 1 return 1 (the search interval is
/// empty; 1 is the maximally optimistic admissible value).
///
/// Requires n_eff > 0 and budget >= 0.
double klucb_invert(double theta_hat, double n_eff, double budget);

}  // namespace convbandit
