#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "convbandit/environment.hpp"
#include "convbandit/policies.hpp"

namespace convbandit {

/// Configuration or input-file problem; the message names the offending key.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A full experiment: one instance, a list of policies (each may override
/// the censoring setting), R seeded replications per policy, and a
/// checkpoint grid.
struct ExperimentConfig {
  BanditInstance instance;
  std::vector<PolicyConfig> policies;
  std::int64_t replications = 1;
  std::uint64_t master_seed = 0;
  std::int64_t checkpoint_stride = 0;  // 0 -> horizon / 100, at least 1
  std::string out_dir;

  void validate() const;

  /// stride, 2*stride, ... with the final checkpoint forced at the horizon.
  std::vector<std::int64_t> checkpoints() const;

  static ExperimentConfig from_json(const std::string& text);
  static ExperimentConfig load_file(const std::string& path);
};

struct PolicyAggregate {
  std::string label;
  std::vector<std::int64_t> checkpoints;
  std::vector<double> mean;  // arithmetic mean over exactly R traces
  std::vector<double> sd;    // sample standard deviation (n-1 denominator)
  std::vector<double> se;    // sd / sqrt(R)
  std::int64_t runs = 0;
};

struct ExperimentResult {
  std::vector<std::string> labels;
  std::vector<std::int64_t> checkpoints;
  std::vector<std::vector<RegretTrace>> traces;  // [policy][run]
  std::vector<PolicyAggregate> aggregates;

  const PolicyAggregate& aggregate_for(const std::string& label) const;

  /// Raw rows, canonical order (policy, run, checkpoint), header
  /// policy,run,checkpoint_t,cum_pseudo_regret,cum_reward.
  std::string raw_csv() const;

  /// Aggregate rows, header policy,checkpoint_t,mean,sd,se,runs.
  std::string aggregate_csv() const;
};

/// Runs every (policy, replication) pair; the child seed of pair (p, r) is
/// child_seed(master_seed, p, r). Replications execute concurrently on up to
/// `threads` workers (0 picks the hardware count); outputs are canonical and
/// bit-identical regardless of thread count.
ExperimentResult run_experiment(const ExperimentConfig& config, int threads = 0);

/// Writes raw.csv and aggregate.csv under `dir` (created if missing).
void write_outputs(const ExperimentResult& result, const std::string& dir);

/// Minimal SVG line chart of mean regret per policy.
struct SeriesPoint {
  std::int64_t t = 0;
  double value = 0.0;
};
using Series = std::pair<std::string, std::vector<SeriesPoint>>;

std::string render_lines_svg(const std::vector<Series>& series, const std::string& title);
std::vector<Series> aggregate_series(const ExperimentResult& result);
std::vector<Series> parse_aggregate_csv(const std::string& text);

/// Locale-independent shortest round-trip formatting used by all CSV output.
std::string format_double(double v);

}  // namespace convbandit
