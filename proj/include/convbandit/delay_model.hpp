#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "convbandit/rng.hpp"

namespace convbandit {

/// Distribution of the disclosure delay of a conversion, on {0, 1, 2, ...}.
///
/// Two kinds are supported:
///  - geometric(mean): parameterized by the exact mean mu > 0, with per-step
///    decay rho = mu / (1 + mu), so that survival(d) = rho^(d+1) and the mean
///    round-trips exactly;
///  - tabulated(cdf, tail_survival): an explicit nondecreasing CDF table, with
///    constant survival mass beyond the last entry (default 0, i.e. the CDF
///    jumps to 1 one step past the table). A positive tail mass means the
///    conversion is never disclosed with that probability.
///
/// Immutable after construction; shareable across threads.
class DelayDistribution {
 public:
  enum class Kind { kGeometric, kTabulated };

  /// sample() result standing for "never disclosed" (only reachable for
  /// tabulated distributions with positive tail survival).
  static constexpr std::int64_t kNever = std::numeric_limits<std::int64_t>::max();

  static DelayDistribution geometric(double mean);
  static DelayDistribution tabulated(std::vector<double> cdf, double tail_survival = 0.0);
  /// Deterministic delay: P(D = d) = 1.
  static DelayDistribution point_mass(std::int64_t d);

  /// Parses {"geometric": {"mean": m}} or
  /// {"tabulated": {"cdf": [...], "tail_survival": s}} from a JSON string.
  static DelayDistribution from_json(const std::string& text);

  Kind kind() const { return kind_; }

  /// P(D <= d).
  double cdf(std::int64_t d) const;

  /// P(D > d); always exactly 1 - cdf(d).
  double survival(std::int64_t d) const { return 1.0 - cdf(d); }

  /// E[D]. Geometric distributions return the construction-time mean exactly;
  /// tabulated distributions sum survival over the table. Throws
  /// std::domain_error when the tail survival mass is positive (infinite mean).
  double mean() const;

  /// Inverse-CDF sample. Identical seed and call sequence produce identical
  /// draws. May return kNever for tabulated distributions with tail mass.
  std::int64_t sample(Rng& rng) const;

  /// Geometric decay rho = mu / (1 + mu); only valid for geometric kind.
  double geometric_decay() const;

  /// Number of table entries; only valid for tabulated kind.
  std::int64_t table_length() const;

  double tail_survival() const { return tail_survival_; }

  std::string describe() const;

 private:
  DelayDistribution() = default;

  Kind kind_ = Kind::kGeometric;
  double mean_ = 0.0;              // geometric only
  double decay_ = 0.0;             // geometric only
  double log_decay_ = 0.0;         // geometric only
  std::vector<double> cdf_table_;  // tabulated only
  double tail_survival_ = 0.0;     // tabulated only
};

}  // namespace convbandit
