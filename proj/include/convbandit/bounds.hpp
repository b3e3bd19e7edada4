#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace convbandit {

/// Asymptotic regret constants for one instance, all reported as
/// coefficients of log T (nats). Lower-tail remainders are out of scope.
struct BoundReport {
  std::string setting;  // "censored" or "uncensored"
  double tau_m = 1.0;   // disclosure probability at the censoring window
  double lower_bound = 0.0;
  std::vector<double> lower_per_arm;  // 0 for the best arm

  struct UpperConstants {
    double epsilon = 0.1;
    double eta = 0.1;
    double ucb = 0.0;
    /// KL-UCB leading constant with the 1/(1 - tau_m * best_rate) factor.
    double klucb = 0.0;
    /// Alternate (looser) form with the 1/(1 - best_rate) factor.
    double klucb_alt = 0.0;
    std::vector<double> ucb_per_arm;
    std::vector<double> klucb_per_arm;
  };
  std::optional<UpperConstants> upper;

  std::string to_json() const;
};

/// Censored-setting lower bound: sum over suboptimal arms of
/// tau_m * gap_k / d(tau_m * theta_k, tau_m * theta_star), with d the
/// Bernoulli KL divergence. Requires a unique best arm and tau_m in (0, 1].
BoundReport lower_bound_censored(std::span<const double> theta, double tau_m);

/// Uncensored-setting lower bound: sum of gap_k / d(theta_k, theta_star).
/// Coincides exactly with the censored bound at tau_m = 1.
BoundReport lower_bound_uncensored(std::span<const double> theta);

/// Lower bound plus the leading constants of the UCB and KL-UCB regret
/// guarantees: per suboptimal arm, (1 + epsilon) / (2 tau_m gap_k) for UCB
/// and (1 + eta) tau_m gap_k / ((1 - tau_m theta_star) d(tau_m theta_k,
/// tau_m theta_star)) for KL-UCB (the alternate form divides by
/// 1 - theta_star instead).
BoundReport upper_bound_constants(std::span<const double> theta, double tau_m, double epsilon,
                                  double eta);

}  // namespace convbandit
