#include "convbandit/policies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "convbandit/divergence.hpp"

namespace convbandit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Strict-greater scan: ties and the all-equal case resolve to the lowest id.
int argmax_lowest(const std::vector<double>& values) {
  int best = 0;
  for (int k = 1; k < static_cast<int>(values.size()); ++k) {
    if (values[static_cast<std::size_t>(k)] > values[static_cast<std::size_t>(best)]) best = k;
  }
  return best;
}

}  // namespace

double ucb_index(double theta_hat, double pulls, double n_eff, double beta) {
  if (!(n_eff > 0.0)) throw std::invalid_argument("ucb_index: n_eff must be positive");
  if (beta < 0.0) throw std::invalid_argument("ucb_index: beta must be nonnegative");
  return theta_hat + std::sqrt(pulls / n_eff) * std::sqrt(beta / (2.0 * n_eff));
}

double klucb_index(double theta_hat, double n_eff, double beta) {
  if (theta_hat >= 1.0) return 1.0;
  return klucb_invert(theta_hat, n_eff, beta);
}

std::optional<DiscardingIndices> discarding_indices(std::int64_t s_old, std::int64_t n_old,
                                                    double tau_m, double beta) {
  if (n_old <= 0) return std::nullopt;
  if (!(tau_m > 0.0 && tau_m <= 1.0)) {
    throw std::invalid_argument("discarding_indices: tau_m must lie in (0, 1]");
  }
  const double n_eff = tau_m * static_cast<double>(n_old);
  const double theta_m = static_cast<double>(s_old) / n_eff;
  DiscardingIndices out;
  out.ucb = theta_m + std::sqrt(beta / (2.0 * n_eff));
  out.klucb = klucb_index(theta_m, n_eff, beta);
  return out;
}

void agnostic_update_uncensored(AgnosticState& state, std::int64_t observed_delay) {
  if (observed_delay < 0) {
    throw std::invalid_argument("agnostic_update_uncensored: negative delay");
  }
  state.observations += 1;
  const double alpha = std::pow(static_cast<double>(state.observations), -state.gamma);
  state.mean_delay_estimate = (1.0 - alpha) * state.mean_delay_estimate +
                              alpha * static_cast<double>(observed_delay);
}

void agnostic_update_censored(AgnosticState& state, std::int64_t observed_delay) {
  const auto m = static_cast<std::int64_t>(state.delay_histogram.size()) - 1;
  if (observed_delay < 0 || observed_delay > m) {
    throw std::invalid_argument(
        "agnostic_update_censored: delay outside [0, m]; impossible under censoring");
  }
  state.observations += 1;
  state.delay_histogram[static_cast<std::size_t>(observed_delay)] += 1;
}

PolicyVariant policy_variant_from_string(const std::string& name) {
  if (name == "delayed_ucb") return PolicyVariant::kDelayedUcb;
  if (name == "delayed_klucb") return PolicyVariant::kDelayedKlucb;
  if (name == "discarding_ucb") return PolicyVariant::kDiscardingUcb;
  if (name == "discarding_klucb") return PolicyVariant::kDiscardingKlucb;
  if (name == "agnostic_delayed_klucb") return PolicyVariant::kAgnosticDelayedKlucb;
  if (name == "oracle") return PolicyVariant::kOracle;
  if (name == "uniform") return PolicyVariant::kUniform;
  throw std::invalid_argument("unknown policy variant '" + name + "'");
}

std::string to_string(PolicyVariant variant) {
  switch (variant) {
    case PolicyVariant::kDelayedUcb: return "delayed_ucb";
    case PolicyVariant::kDelayedKlucb: return "delayed_klucb";
    case PolicyVariant::kDiscardingUcb: return "discarding_ucb";
    case PolicyVariant::kDiscardingKlucb: return "discarding_klucb";
    case PolicyVariant::kAgnosticDelayedKlucb: return "agnostic_delayed_klucb";
    case PolicyVariant::kOracle: return "oracle";
    case PolicyVariant::kUniform: return "uniform";
  }
  throw std::logic_error("unreachable");
}

void PolicyConfig::validate() const {
  if (!(epsilon > 0.0)) throw std::invalid_argument("PolicyConfig: epsilon must be positive");
  if (!(gamma >= 0.5 && gamma <= 1.0)) {
    throw std::invalid_argument("PolicyConfig: gamma must lie in [0.5, 1]");
  }
  if (censor_window && *censor_window < 1) {
    throw std::invalid_argument("PolicyConfig: m must be >= 1");
  }
}

BanditInstance effective_instance(const BanditInstance& base, const PolicyConfig& config) {
  config.validate();
  BanditInstance inst = base;
  if (config.censored.has_value()) {
    if (*config.censored) {
      if (config.censor_window) {
        inst.censor_window = *config.censor_window;
      } else if (!inst.censor_window) {
        throw std::invalid_argument(
            "PolicyConfig: censored setting requested but no censor window given");
      }
    } else {
      inst.censor_window.reset();
    }
  } else if (config.censor_window) {
    inst.censor_window = *config.censor_window;
  }
  inst.validate();
  return inst;
}

std::string policy_label(const PolicyConfig& config, const BanditInstance& effective) {
  if (!config.label.empty()) return config.label;
  const bool cens = effective.censored();
  switch (config.variant) {
    case PolicyVariant::kDelayedUcb: return cens ? "d-ucb" : "ud-ucb";
    case PolicyVariant::kDelayedKlucb: return cens ? "d-klucb" : "ud-klucb";
    case PolicyVariant::kDiscardingUcb: return "disc-ucb";
    case PolicyVariant::kDiscardingKlucb: return "disc-klucb";
    case PolicyVariant::kAgnosticDelayedKlucb: return cens ? "d-klucb-est" : "ud-klucb-est";
    case PolicyVariant::kOracle: return "oracle";
    case PolicyVariant::kUniform: return "uniform";
  }
  throw std::logic_error("unreachable");
}

std::unique_ptr<Policy> make_policy(const PolicyConfig& config, const BanditInstance& instance) {
  config.validate();
  instance.validate();
  switch (config.variant) {
    case PolicyVariant::kDelayedUcb:
    case PolicyVariant::kDelayedKlucb:
    case PolicyVariant::kAgnosticDelayedKlucb:
      return std::make_unique<DelayedIndexPolicy>(instance, config);
    case PolicyVariant::kDiscardingUcb:
    case PolicyVariant::kDiscardingKlucb:
      return std::make_unique<DiscardingPolicy>(instance, config);
    case PolicyVariant::kOracle:
      return std::make_unique<OraclePolicy>(instance);
    case PolicyVariant::kUniform:
      return std::make_unique<UniformPolicy>(instance.arms());
  }
  throw std::logic_error("unreachable");
}

DelayedIndexPolicy::DelayedIndexPolicy(const BanditInstance& instance, const PolicyConfig& config)
    : instance_(&instance),
      epsilon_(config.epsilon),
      stats_(instance.arms(), 0) {
  const bool agnostic = config.variant == PolicyVariant::kAgnosticDelayedKlucb;
  use_kl_ = config.variant != PolicyVariant::kDelayedUcb;
  agnostic_.gamma = config.gamma;

  const bool censored = instance.censored();
  if (agnostic) {
    if (censored) {
      path_ = CountPath::kAgnosticWindow;
      const std::int64_t m = *instance.censor_window;
      stats_ = ArmStats(instance.arms(), m);
      agnostic_.delay_histogram.assign(static_cast<std::size_t>(m) + 1, 0);
      scratch_weights_.assign(static_cast<std::size_t>(m), 0.0);
    } else {
      path_ = CountPath::kAgnosticDecay;
    }
    return;
  }

  std::int64_t window = 0;
  if (censored) {
    window = *instance.censor_window;
  } else if (instance.delays.kind() == DelayDistribution::Kind::kTabulated) {
    // Tabulated weights saturate past the table, so a window of that length
    // plus a constant tail weight is exact.
    window = instance.delays.table_length();
  }
  if (window > 0) {
    path_ = CountPath::kWindowScan;
    stats_ = ArmStats(instance.arms(), window);
    weight_by_age_.resize(static_cast<std::size_t>(window));
    for (std::int64_t age = 0; age < window; ++age) {
      weight_by_age_[static_cast<std::size_t>(age)] = instance.delays.cdf(age);
    }
    tail_weight_ = instance.delays.cdf(window);
  } else {
    path_ = CountPath::kGeometricDecay;
    decay_ = instance.delays.geometric_decay();
  }
}

void DelayedIndexPolicy::fill_effective_counts(std::vector<double>& out) const {
  const auto arms = static_cast<std::size_t>(stats_.arms());
  out.resize(arms);
  switch (path_) {
    case CountPath::kGeometricDecay:
    case CountPath::kAgnosticDecay:
      for (std::size_t k = 0; k < arms; ++k) {
        out[k] = stats_.effective_count_geometric(static_cast<int>(k));
      }
      return;
    case CountPath::kWindowScan:
      stats_.effective_counts_windowed(weight_by_age_, tail_weight_, out);
      return;
    case CountPath::kAgnosticWindow: {
      if (agnostic_.observations == 0) {
        std::fill(out.begin(), out.end(), 0.0);  // no plug-in weights yet
        return;
      }
      // Plug-in weights cdf_hat(age) = (cumulative delay counts) / n_d; the
      // tail weight is 1 by construction since every observed delay is <= m.
      const double n_d = static_cast<double>(agnostic_.observations);
      std::int64_t cum = 0;
      for (std::size_t age = 0; age < scratch_weights_.size(); ++age) {
        cum += agnostic_.delay_histogram[age];
        scratch_weights_[age] = static_cast<double>(cum) / n_d;
      }
      stats_.effective_counts_windowed(scratch_weights_, 1.0, out);
      return;
    }
  }
}

int DelayedIndexPolicy::select_arm(std::int64_t round) {
  const int arms = stats_.arms();
  if (round <= arms) return static_cast<int>(round - 1);
  if (path_ == CountPath::kAgnosticWindow && agnostic_.observations == 0) {
    return static_cast<int>((round - 1) % arms);  // no plug-in weights yet
  }

  const double beta = (1.0 + epsilon_) * std::log(static_cast<double>(round));
  std::vector<double> eff;
  fill_effective_counts(eff);

  std::vector<double> index(static_cast<std::size_t>(arms));
  for (int k = 0; k < arms; ++k) {
    const auto ks = static_cast<std::size_t>(k);
    const auto estimate =
        conversion_rate_estimate(static_cast<double>(stats_.conversion_count(k)), eff[ks]);
    if (!estimate) {
      index[ks] = kInf;  // no effective observations: maximally optimistic
    } else if (use_kl_) {
      index[ks] = klucb_index(*estimate, eff[ks], beta);
    } else {
      index[ks] = ucb_index(*estimate, static_cast<double>(stats_.pull_count(k)), eff[ks], beta);
    }
  }
  return argmax_lowest(index);
}

void DelayedIndexPolicy::observe(int arm_played, const FeedbackBatch& feedback) {
  stats_.record_pull(arm_played);
  for (const Disclosure& d : feedback.disclosures) {
    stats_.record_disclosure(d.arm);
    if (path_ == CountPath::kAgnosticDecay) {
      agnostic_update_uncensored(agnostic_, feedback.round - d.pull_time);
    } else if (path_ == CountPath::kAgnosticWindow) {
      agnostic_update_censored(agnostic_, feedback.round - d.pull_time);
    }
  }
  if (path_ == CountPath::kGeometricDecay) {
    stats_.apply_decay(arm_played, decay_);
  } else if (path_ == CountPath::kAgnosticDecay) {
    stats_.apply_decay(arm_played, agnostic_.plug_in_decay());
  }
}

std::vector<double> DelayedIndexPolicy::effective_counts() const {
  std::vector<double> out;
  fill_effective_counts(out);
  return out;
}

DiscardingPolicy::DiscardingPolicy(const BanditInstance& instance, const PolicyConfig& config)
    : arms_(instance.arms()),
      epsilon_(config.epsilon),
      use_kl_(config.variant == PolicyVariant::kDiscardingKlucb) {
  if (!instance.censored()) {
    throw std::invalid_argument("DiscardingPolicy: requires a censored setting");
  }
  window_ = *instance.censor_window;
  tau_m_ = instance.delays.cdf(window_);
  if (!(tau_m_ > 0.0)) {
    throw std::invalid_argument("DiscardingPolicy: cdf(m) must be positive");
  }
  s_old_.assign(static_cast<std::size_t>(arms_), 0);
  n_old_.assign(static_cast<std::size_t>(arms_), 0);
}

void DiscardingPolicy::fold_through(std::int64_t round) {
  // Pull rounds s <= round - 1 - m are fully resolved: every disclosure they
  // will ever produce has arrived by round s + m.
  while (folded_ < round - 1 - window_ &&
         folded_ < static_cast<std::int64_t>(action_by_round_.size())) {
    const auto idx = static_cast<std::size_t>(folded_);
    n_old_[static_cast<std::size_t>(action_by_round_[idx])] += 1;
    s_old_[static_cast<std::size_t>(action_by_round_[idx])] += disclosures_by_round_[idx];
    ++folded_;
  }
}

int DiscardingPolicy::select_arm(std::int64_t round) {
  fold_through(round);
  if (round <= arms_) return static_cast<int>(round - 1);
  const bool warm =
      std::any_of(n_old_.begin(), n_old_.end(), [](std::int64_t n) { return n == 0; });
  if (warm) return static_cast<int>((round - 1) % arms_);

  const double beta = (1.0 + epsilon_) * std::log(static_cast<double>(round));
  std::vector<double> index(static_cast<std::size_t>(arms_));
  for (int k = 0; k < arms_; ++k) {
    const auto ks = static_cast<std::size_t>(k);
    const auto both = discarding_indices(s_old_[ks], n_old_[ks], tau_m_, beta);
    index[ks] = use_kl_ ? both->klucb : both->ucb;
  }
  return argmax_lowest(index);
}

void DiscardingPolicy::observe(int arm_played, const FeedbackBatch& feedback) {
  action_by_round_.push_back(arm_played);
  disclosures_by_round_.push_back(0);
  for (const Disclosure& d : feedback.disclosures) {
    disclosures_by_round_[static_cast<std::size_t>(d.pull_time - 1)] += 1;
  }
}

OraclePolicy::OraclePolicy(const BanditInstance& instance) {
  best_arm_ = static_cast<int>(
      std::max_element(instance.theta.begin(), instance.theta.end()) - instance.theta.begin());
}

}  // namespace convbandit
