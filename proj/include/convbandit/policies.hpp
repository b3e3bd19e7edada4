#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "convbandit/environment.hpp"
#include "convbandit/estimators.hpp"

namespace convbandit {

/// Delay-corrected UCB index: theta_hat + sqrt(pulls / n_eff) *
/// sqrt(beta / (2 n_eff)). With n_eff == pulls this is the classical index;
/// the ratio inflates the radius by how much of the feedback is still in
/// flight. Requires n_eff > 0 (callers route arms with no effective count to
/// an unbounded index).
double ucb_index(double theta_hat, double pulls, double n_eff, double beta);

/// Delay-corrected KL-UCB index: largest q in [theta_hat, 1] with
/// n_eff * d_pois(theta_hat, q) <= beta. Estimates at or above 1 (possible
/// early in a run) return 1, the maximally optimistic admissible value.
double klucb_index(double theta_hat, double n_eff, double beta);

struct DiscardingIndices {
  double ucb = 0.0;
  double klucb = 0.0;
};

/// Benchmark indices computed from fully resolved feedback only: with s_old
/// disclosures attributable to the n_old pulls older than the censoring
/// window, the estimate is s_old / (tau_m * n_old) and both indices use the
/// effective count tau_m * n_old. Empty when n_old == 0 (callers fall back
/// to round-robin).
std::optional<DiscardingIndices> discarding_indices(std::int64_t s_old, std::int64_t n_old,
                                                    double tau_m, double beta);

/// Online delay-distribution estimate for the delay-agnostic policies.
///
/// Uncensored: stochastic-approximation estimate of the mean delay with step
/// 1/n^gamma in the observation count n, initialized at 1 before the first
/// observation; the plug-in decay mu/(1+mu) feeds the geometric fast path.
/// Censored: a histogram of observed delays over {0..m}; cumulative counts
/// normalized by the observation total estimate cdf(s)/cdf(m).
struct AgnosticState {
  double gamma = 0.7;
  double mean_delay_estimate = 1.0;
  std::int64_t observations = 0;
  std::vector<std::int64_t> delay_histogram;  // size m+1 in the censored setting

  double plug_in_decay() const {
    return mean_delay_estimate / (1.0 + mean_delay_estimate);
  }
};

void agnostic_update_uncensored(AgnosticState& state, std::int64_t observed_delay);

/// Requires 0 <= observed_delay <= m (the censored environment guarantees
/// disclosed delays never exceed the window).
void agnostic_update_censored(AgnosticState& state, std::int64_t observed_delay);

enum class PolicyVariant {
  kDelayedUcb,
  kDelayedKlucb,
  kDiscardingUcb,
  kDiscardingKlucb,
  kAgnosticDelayedKlucb,
  kOracle,
  kUniform,
};

PolicyVariant policy_variant_from_string(const std::string& name);
std::string to_string(PolicyVariant variant);

struct PolicyConfig {
  PolicyVariant variant = PolicyVariant::kDelayedKlucb;
  double epsilon = 0.1;  // exploration budget is (1 + epsilon) * log t
  double gamma = 0.7;    // agnostic stochastic-approximation exponent, in [0.5, 1]
  std::optional<bool> censored;                // setting override; default = instance's
  std::optional<std::int64_t> censor_window;   // m override when the setting is censored
  std::string label;                           // empty -> derived from variant + setting

  void validate() const;
};

/// The instance this policy's replications actually face: the config's
/// setting override applied to the base instance.
BanditInstance effective_instance(const BanditInstance& base, const PolicyConfig& config);

/// Display label, e.g. "d-klucb" (censored) / "ud-klucb" (uncensored).
std::string policy_label(const PolicyConfig& config, const BanditInstance& effective);

/// Builds a fresh policy for one replication against `instance` (which must
/// already have the config's setting applied).
std::unique_ptr<Policy> make_policy(const PolicyConfig& config, const BanditInstance& instance);

/// Delay-corrected optimistic policy (UCB, KL-UCB, or the delay-agnostic
/// KL-UCB variant). Plays each arm once, then the argmax of the index with
/// budget (1 + epsilon) * log t; arms with zero effective count beat any
/// finite index, and ties go to the lowest arm id.
class DelayedIndexPolicy : public Policy {
 public:
  DelayedIndexPolicy(const BanditInstance& instance, const PolicyConfig& config);

  int select_arm(std::int64_t round) override;
  void observe(int arm_played, const FeedbackBatch& feedback) override;

  const ArmStats& stats() const { return stats_; }
  const AgnosticState& agnostic_state() const { return agnostic_; }

  /// Current delay-weighted pull counts, one per arm (agnostic variants use
  /// their plug-in weights).
  std::vector<double> effective_counts() const;

 private:
  enum class CountPath { kGeometricDecay, kWindowScan, kAgnosticDecay, kAgnosticWindow };

  void fill_effective_counts(std::vector<double>& out) const;

  const BanditInstance* instance_;
  bool use_kl_ = true;
  double epsilon_ = 0.1;
  CountPath path_ = CountPath::kGeometricDecay;
  ArmStats stats_;
  double decay_ = 0.0;                  // known geometric decay
  std::vector<double> weight_by_age_;   // known windowed weights
  double tail_weight_ = 1.0;
  AgnosticState agnostic_;
  mutable std::vector<double> scratch_weights_;  // agnostic window rebuild
};

/// Benchmark that ignores everything younger than the censoring window, so
/// all retained feedback is fully resolved. Stays in round-robin until every
/// arm has at least one pull older than the window.
class DiscardingPolicy : public Policy {
 public:
  DiscardingPolicy(const BanditInstance& instance, const PolicyConfig& config);

  int select_arm(std::int64_t round) override;
  void observe(int arm_played, const FeedbackBatch& feedback) override;

  std::int64_t old_pulls(int arm) const { return n_old_[static_cast<std::size_t>(arm)]; }
  std::int64_t old_conversions(int arm) const { return s_old_[static_cast<std::size_t>(arm)]; }

 private:
  void fold_through(std::int64_t round);

  int arms_;
  std::int64_t window_;
  double epsilon_;
  double tau_m_;
  bool use_kl_;
  std::vector<std::int64_t> s_old_;
  std::vector<std::int64_t> n_old_;
  std::vector<int> action_by_round_;
  std::vector<std::int64_t> disclosures_by_round_;
  std::int64_t folded_ = 0;
};

/// Always plays a best arm (lowest id among maximizers of the true rates).
class OraclePolicy : public Policy {
 public:
  explicit OraclePolicy(const BanditInstance& instance);
  int select_arm(std::int64_t) override { return best_arm_; }
  void observe(int, const FeedbackBatch&) override {}

 private:
  int best_arm_;
};

/// Deterministic uniform baseline: cycles through the arms.
class UniformPolicy : public Policy {
 public:
  explicit UniformPolicy(int arms) : arms_(arms) {}
  int select_arm(std::int64_t round) override {
    return static_cast<int>((round - 1) % arms_);
  }
  void observe(int, const FeedbackBatch&) override {}

 private:
  int arms_;
};

}  // namespace convbandit
