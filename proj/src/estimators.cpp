#include "convbandit/estimators.hpp"

#include <algorithm>
#include <stdexcept>

namespace convbandit {

ArmStats::ArmStats(int num_arms, std::int64_t window)
    : window_(window),
      pulls_(static_cast<std::size_t>(num_arms), 0),
      conversions_(static_cast<std::size_t>(num_arms), 0),
      old_pulls_(static_cast<std::size_t>(num_arms), 0),
      decay_acc_(static_cast<std::size_t>(num_arms), 0.0) {
  if (num_arms < 1) throw std::invalid_argument("ArmStats: need at least one arm");
  if (window < 0) throw std::invalid_argument("ArmStats: window must be >= 0");
  ring_.resize(static_cast<std::size_t>(window), -1);
}

void ArmStats::record_pull(int arm) {
  pulls_[static_cast<std::size_t>(arm)] += 1;
  if (window_ == 0) return;
  if (fill_ == window_) {
    old_pulls_[static_cast<std::size_t>(ring_[static_cast<std::size_t>(next_)])] += 1;
  } else {
    fill_ += 1;
  }
  ring_[static_cast<std::size_t>(next_)] = arm;
  next_ = (next_ + 1) % window_;
}

void ArmStats::record_pull(int arm, double decay) {
  record_pull(arm);
  apply_decay(arm, decay);
}

void ArmStats::apply_decay(int pulled_arm, double decay) {
  for (std::size_t k = 0; k < decay_acc_.size(); ++k) {
    decay_acc_[k] = geometric_update(decay_acc_[k], static_cast<int>(k) == pulled_arm, decay);
  }
}

void ArmStats::record_disclosure(int arm) {
  conversions_[static_cast<std::size_t>(arm)] += 1;
}

int ArmStats::buffered_arm(std::int64_t age) const {
  if (age < 0 || age >= fill_) throw std::out_of_range("ArmStats::buffered_arm");
  const std::int64_t idx = (next_ - 1 - age + 2 * window_) % window_;
  return ring_[static_cast<std::size_t>(idx)];
}

void ArmStats::effective_counts_windowed(std::span<const double> weight_by_age,
                                         double tail_weight, std::span<double> out) const {
  for (std::size_t k = 0; k < pulls_.size(); ++k) {
    out[k] = tail_weight * static_cast<double>(old_pulls_[k]);
  }
  // One pass over the buffer covers every arm; slot ages run from 0 (just
  // pulled) to fill-1.
  std::int64_t idx = next_ - 1;
  for (std::int64_t age = 0; age < fill_; ++age) {
    if (idx < 0) idx += window_;
    out[static_cast<std::size_t>(ring_[static_cast<std::size_t>(idx)])] += weight_by_age[static_cast<std::size_t>(age)];
    --idx;
  }
}

double ArmStats::effective_count_censored(int arm, const DelayDistribution& delays) const {
  double total = delays.cdf(window_) * static_cast<double>(old_pull_count(arm));
  std::int64_t idx = next_ - 1;
  for (std::int64_t age = 0; age < fill_; ++age) {
    if (idx < 0) idx += window_;
    if (ring_[static_cast<std::size_t>(idx)] == arm) total += delays.cdf(age);
    --idx;
  }
  return total;
}

double effective_count_reference(std::span<const std::int64_t> pull_times, std::int64_t now,
                                 const DelayDistribution& delays) {
  double total = 0.0;
  for (std::int64_t s : pull_times) total += delays.cdf(now - 1 - s);
  return total;
}

double effective_count_reference_censored(std::span<const std::int64_t> pull_times,
                                          std::int64_t now, const DelayDistribution& delays,
                                          std::int64_t censor_window) {
  double total = 0.0;
  for (std::int64_t s : pull_times) {
    total += delays.cdf(std::min(now - 1 - s, censor_window));
  }
  return total;
}

}  // namespace convbandit
