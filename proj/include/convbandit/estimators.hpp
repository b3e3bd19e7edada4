#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "convbandit/delay_model.hpp"

namespace convbandit {

/// One step of the exponential-decay accumulator behind the fast geometric
/// effective count: o' = decay * (o + pulled). With pulls recorded every
/// round, o tracks sum over past pulls of decay^(elapsed+1), and the
/// delay-weighted pull count is pulls - o.
inline double geometric_update(double o, bool pulled, double decay) {
  return decay * (o + (pulled ? 1.0 : 0.0));
}

/// Conversion-rate estimate s / n_eff; empty when n_eff is zero (callers
/// treat such arms as maximally optimistic). The ratio can exceed 1 early in
/// a run, since the delay-weighted count never exceeds the raw pull count.
inline std::optional<double> conversion_rate_estimate(double s, double n_eff) {
  if (n_eff <= 0.0) return std::nullopt;
  return s / n_eff;
}

/// Per-arm running statistics for delay-corrected estimation.
///
/// Tracks, for each arm: the raw pull count, the disclosed-conversion count,
/// and the exponential-decay accumulator for the geometric fast path. When
/// constructed with a positive window (the censoring threshold m, or the CDF
/// table length for tabulated delays), a shared recency buffer additionally
/// keeps the arm ids of the last `window` pulls; entries evicted from the
/// buffer move into a per-arm "old pull" count whose delay weight has
/// saturated.
///
/// Convention: statistics queried between rounds reflect everything observed
/// so far, and a pull recorded j rounds ago has had j disclosure
/// opportunities, so its weight is cdf(j) with age j counted from 0 for the
/// most recent pull.
///
/// Owned by a single replication; not thread-safe.
class ArmStats {
 public:
  ArmStats(int num_arms, std::int64_t window);

  /// Records a pull: increments the pull count and pushes the arm into the
  /// recency buffer (evicting the oldest entry into its arm's old count once
  /// the buffer is full). Does not touch the decay accumulators.
  void record_pull(int arm);

  /// record_pull plus apply_decay in one call, for constant-decay use.
  void record_pull(int arm, double decay);

  /// Advances every arm's decay accumulator by one round:
  /// o_k <- decay * (o_k + 1{k == pulled_arm}).
  void apply_decay(int pulled_arm, double decay);

  /// Records a disclosed conversion credited to `arm`.
  void record_disclosure(int arm);

  int arms() const { return static_cast<int>(pulls_.size()); }
  std::int64_t window() const { return window_; }

  std::int64_t pull_count(int arm) const { return pulls_[static_cast<std::size_t>(arm)]; }
  std::int64_t conversion_count(int arm) const { return conversions_[static_cast<std::size_t>(arm)]; }
  double decay_accumulator(int arm) const { return decay_acc_[static_cast<std::size_t>(arm)]; }
  std::int64_t old_pull_count(int arm) const { return old_pulls_[static_cast<std::size_t>(arm)]; }
  std::int64_t buffer_fill() const { return fill_; }

  /// Arm id of the buffered pull with the given age (0 = most recent).
  int buffered_arm(std::int64_t age) const;

  /// Fast geometric effective count: pulls - decay accumulator.
  double effective_count_geometric(int arm) const {
    const auto k = static_cast<std::size_t>(arm);
    return static_cast<double>(pulls_[k]) - decay_acc_[k];
  }

  /// Windowed effective counts for all arms in one buffer scan: buffered
  /// pulls contribute weight_by_age[age], evicted pulls contribute
  /// tail_weight each. weight_by_age must have at least `window` entries.
  void effective_counts_windowed(std::span<const double> weight_by_age, double tail_weight,
                                 std::span<double> out) const;

  /// Censored effective count of one arm: up to `window` most recent pulls
  /// weighted by the delay CDF at their age, older pulls by cdf(window).
  double effective_count_censored(int arm, const DelayDistribution& delays) const;

 private:
  std::int64_t window_ = 0;
  std::vector<std::int64_t> pulls_;
  std::vector<std::int64_t> conversions_;
  std::vector<std::int64_t> old_pulls_;
  std::vector<double> decay_acc_;
  std::vector<int> ring_;
  std::int64_t fill_ = 0;
  std::int64_t next_ = 0;
};

/// Brute-force delay-weighted pull count: sum of cdf(now - 1 - s) over the
/// recorded pull times s of one arm (all strictly before `now`). This is the
/// reference path the incremental implementations are checked against.
double effective_count_reference(std::span<const std::int64_t> pull_times, std::int64_t now,
                                 const DelayDistribution& delays);

/// Censored variant: every weight is capped at cdf(censor_window).
double effective_count_reference_censored(std::span<const std::int64_t> pull_times,
                                          std::int64_t now, const DelayDistribution& delays,
                                          std::int64_t censor_window);

}  // namespace convbandit
