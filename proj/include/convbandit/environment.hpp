#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "convbandit/delay_model.hpp"
#include "convbandit/rng.hpp"

namespace convbandit {

/// A bandit problem: per-arm conversion rates, a shared delay distribution,
/// an optional censoring window m (conversions delayed by more than m rounds
/// are never disclosed), and a horizon. Immutable and shareable.
struct BanditInstance {
  std::vector<double> theta;
  DelayDistribution delays = DelayDistribution::point_mass(0);
  std::optional<std::int64_t> censor_window;
  std::int64_t horizon = 0;

  int arms() const { return static_cast<int>(theta.size()); }
  bool censored() const { return censor_window.has_value(); }
  double best_rate() const;

  void validate() const;
  std::string describe() const;

  /// Parses {"theta": [...], "delay": {...}, "censor_window": int|null,
  /// "horizon": int}. Unknown keys are rejected.
  static BanditInstance from_json(const std::string& text);
};

/// One revealed conversion: the round the arm was pulled and the arm id.
struct Disclosure {
  std::int64_t pull_time = 0;
  int arm = 0;
};

/// Everything revealed to the learner at one round. The integer reward is
/// the number of disclosures.
struct FeedbackBatch {
  std::int64_t round = 0;
  std::vector<Disclosure> disclosures;

  std::int64_t reward() const { return static_cast<std::int64_t>(disclosures.size()); }
};

/// Pending conversions bucketed by disclosure round. Entries past the
/// horizon are dropped at scheduling time (they can never be revealed within
/// the run); every kept entry is handed out exactly once, at its due round.
class DisclosureQueue {
 public:
  explicit DisclosureQueue(std::int64_t horizon);

  void schedule(std::int64_t due, Disclosure d);
  std::vector<Disclosure> take_due(std::int64_t round);

  /// Number of conversions scheduled within the horizon so far.
  std::int64_t scheduled_count() const { return scheduled_; }

 private:
  std::int64_t horizon_;
  std::int64_t scheduled_ = 0;
  std::vector<std::vector<Disclosure>> buckets_;  // indexed by due round
};

/// The closed-loop simulator. Each step draws a conversion indicator and a
/// delay for the chosen arm, schedules the disclosure (unless censored), and
/// returns everything due at the current round -- including a same-round
/// disclosure when the drawn delay is zero. Non-conversions never enter the
/// queue, so the learner cannot tell them apart from long delays.
///
/// Single-consumer mutable state; distinct replications use distinct
/// environments.
class Environment {
 public:
  Environment(const BanditInstance& instance, Rng rng);

  /// Plays `action` at the current round. Throws std::logic_error past the
  /// horizon.
  FeedbackBatch step(int action);

  std::int64_t round() const { return t_; }  // next round to be played, 1-based
  bool done() const { return t_ > instance_->horizon; }
  const BanditInstance& instance() const { return *instance_; }

  /// Conversions scheduled for disclosure within the horizon so far.
  std::int64_t conversions_scheduled() const { return queue_.scheduled_count(); }

 private:
  const BanditInstance* instance_;
  Rng rng_;
  DisclosureQueue queue_;
  std::int64_t t_ = 1;
};

/// Delay-weighted pseudo-regret of an action sequence over horizon
/// T = actions.size(): sum over rounds s of (best rate - played rate) times
/// the probability the reward of round s would have been disclosed by T.
/// Censored instances cap that probability at cdf(m). Deterministic in the
/// actions; no sampling involved.
double pseudo_regret(const BanditInstance& instance, std::span<const int> actions);

/// Arm-selection strategy driven by the closed loop: the policy choosing the
/// action of round t has observed all feedback disclosed through round t-1.
class Policy {
 public:
  virtual ~Policy() = default;

  /// Chooses the arm for the given 1-based round.
  virtual int select_arm(std::int64_t round) = 0;

  /// Feeds back the played arm and the disclosures of the same round.
  virtual void observe(int arm_played, const FeedbackBatch& feedback) = 0;
};

struct TracePoint {
  std::int64_t t = 0;
  double cum_pseudo_regret = 0.0;
  std::int64_t cum_reward = 0;
};

/// Checkpointed trajectory of one replication, with the metadata needed to
/// reproduce it.
struct RegretTrace {
  std::uint64_t seed = 0;
  std::string policy;
  std::string instance_id;
  std::vector<TracePoint> points;
};

/// Runs policy against a fresh environment for the full horizon. The
/// cumulative pseudo-regret at a checkpoint t is the pseudo-regret of the
/// action prefix with horizon t (disclosure weights re-evaluated for that
/// horizon, not a running sum of per-round gaps). Bit-reproducible given
/// (instance, policy construction, seed).
RegretTrace run_trace(const BanditInstance& instance, Policy& policy, std::uint64_t seed,
                      std::span<const std::int64_t> checkpoints, std::string policy_label = "");

}  // namespace convbandit
