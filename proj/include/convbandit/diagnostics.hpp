#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "convbandit/environment.hpp"

namespace convbandit {

struct CheckResult {
  bool pass = false;
  std::string detail;
};

/// Verifies (1-q) * d(p,q) <= d_pois(p,q) <= d(p,q) over the whole grid
/// p, q in {step, 2*step, ..., 1-step} with p < q.
CheckResult check_divergence_sandwich(double step = 0.001);

/// Verifies the censored lower bound is monotone in the disclosure
/// probability -- nonincreasing in tau_m on tau in {0.1, ..., 1.0}, since
/// harsher censoring makes the problem harder -- over random instances, and
/// that it coincides exactly with the uncensored bound at tau_m = 1.
CheckResult check_bound_monotonicity(int instances = 100, std::uint64_t seed = 5);

struct OracleEquivalenceOptions {
  int configs = 1000;
  std::int64_t length = 2000;
  std::uint64_t seed = 7;
  double tolerance = 1e-9;
  int threads = 0;  // 0 -> hardware count
};

/// Drives random pull sequences (random arm count, geometric delay mean, and
/// censor window per configuration) and checks, at every round and for every
/// arm, that the incremental decay path and the windowed buffer path both
/// match a direct weighted-sum evaluation of the delay-corrected pull count.
CheckResult check_estimator_oracle(const OracleEquivalenceOptions& options = {});

/// Random grid over (theta_hat, n_eff, budget): whenever the inverted index
/// is below 1 the divergence budget is met to 1e-6, and the index is
/// monotone in the budget and in 1/n_eff.
CheckResult check_kl_inversion(int points = 1000, std::uint64_t seed = 11);

struct ConcentrationOptions {
  BanditInstance instance;  // schedule is fixed round-robin over its arms
  std::int64_t t = 1000;    // decision round at which the indices are evaluated
  double beta = 5.0;
  int replications = 10000;
  std::uint64_t seed = 13;
};

/// Monte-Carlo check of the index coverage guarantees under a fixed
/// (non-adaptive) design: the frequency of the true rate exceeding the UCB
/// index is compared against beta * e * log(t) * exp(-beta), and the
/// frequency of the KL-UCB index falling at or below the true rate against
/// e * ceil(beta * log(t)) * exp(-beta). Envelopes above 1 make the check
/// vacuous, which is reported as such.
struct ConcentrationReport {
  double beta = 0.0;
  std::int64_t t = 0;
  int replications = 0;
  double ucb_envelope = 0.0;
  double klucb_envelope = 0.0;
  bool ucb_vacuous = false;
  bool klucb_vacuous = false;
  double ucb_violation_freq = 0.0;    // worst arm
  double klucb_violation_freq = 0.0;  // worst arm
  bool pass = false;

  std::string detail() const;
};

ConcentrationReport check_concentration(const ConcentrationOptions& options);

struct UnbiasednessOptions {
  BanditInstance instance;  // fixed round-robin schedule over the full horizon
  int replications = 10000;
  std::uint64_t seed = 17;
  std::vector<std::int64_t> checkpoints;  // rounds observed; empty -> {horizon}
};

/// Monte-Carlo check that the delay-corrected estimate is conditionally
/// unbiased under a fixed schedule: at every checkpoint, the mean of
/// conversions / effective count over the replications must sit within
/// 3 standard errors of the true rate for every arm.
struct UnbiasednessReport {
  std::vector<double> theta;
  std::vector<std::int64_t> checkpoints;
  std::vector<std::vector<double>> mean_estimate;   // [checkpoint][arm]
  std::vector<std::vector<double>> standard_error;  // [checkpoint][arm]
  bool pass = false;

  std::string detail() const;
};

UnbiasednessReport check_unbiasedness(const UnbiasednessOptions& options);

}  // namespace convbandit
