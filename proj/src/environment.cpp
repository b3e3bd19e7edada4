#include "convbandit/environment.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace convbandit {

double BanditInstance::best_rate() const {
  return *std::max_element(theta.begin(), theta.end());
}

void BanditInstance::validate() const {
  if (theta.size() < 2) {
    throw std::invalid_argument("BanditInstance: need at least two arms");
  }
  for (double v : theta) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw std::invalid_argument("BanditInstance: conversion rates must lie in [0, 1]");
    }
  }
  if (horizon < 1) throw std::invalid_argument("BanditInstance: horizon must be >= 1");
  if (censor_window && *censor_window < 1) {
    throw std::invalid_argument("BanditInstance: censor_window must be >= 1");
  }
}

std::string BanditInstance::describe() const {
  std::ostringstream os;
  os << "theta=[";
  for (std::size_t k = 0; k < theta.size(); ++k) {
    if (k) os << ",";
    os << theta[k];
  }
  os << "];delay=" << delays.describe();
  if (censor_window) os << ";m=" << *censor_window;
  os << ";T=" << horizon;
  return os.str();
}

BanditInstance BanditInstance::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  BanditInstance inst;
  for (const auto& [key, value] : j.items()) {
    if (key == "theta") {
      inst.theta = value.get<std::vector<double>>();
    } else if (key == "delay") {
      inst.delays = DelayDistribution::from_json(value.dump());
    } else if (key == "censor_window") {
      if (!value.is_null()) inst.censor_window = value.get<std::int64_t>();
    } else if (key == "horizon") {
      inst.horizon = value.get<std::int64_t>();
    } else {
      throw std::invalid_argument("BanditInstance: unknown key '" + key + "'");
    }
  }
  inst.validate();
  return inst;
}

DisclosureQueue::DisclosureQueue(std::int64_t horizon) : horizon_(horizon) {
  buckets_.resize(static_cast<std::size_t>(horizon) + 1);
}

void DisclosureQueue::schedule(std::int64_t due, Disclosure d) {
  if (due > horizon_) return;  // can never disclose within the run
  buckets_[static_cast<std::size_t>(due)].push_back(d);
  ++scheduled_;
}

std::vector<Disclosure> DisclosureQueue::take_due(std::int64_t round) {
  return std::move(buckets_[static_cast<std::size_t>(round)]);
}

Environment::Environment(const BanditInstance& instance, Rng rng)
    : instance_(&instance), rng_(rng), queue_(instance.horizon) {
  instance.validate();
}

FeedbackBatch Environment::step(int action) {
  if (t_ > instance_->horizon) {
    throw std::logic_error("Environment::step: horizon exhausted");
  }
  if (action < 0 || action >= instance_->arms()) {
    throw std::invalid_argument("Environment::step: arm index out of range");
  }
  // Both variables are drawn every round so the random stream consumed per
  // round does not depend on the outcome.
  const bool converts = rng_.bernoulli(instance_->theta[static_cast<std::size_t>(action)]);
  const std::int64_t delay = instance_->delays.sample(rng_);
  if (converts && (!instance_->censor_window || delay <= *instance_->censor_window) &&
      delay <= instance_->horizon - t_) {
    queue_.schedule(t_ + delay, Disclosure{t_, action});
  }
  FeedbackBatch batch;
  batch.round = t_;
  batch.disclosures = queue_.take_due(t_);
  ++t_;
  return batch;
}

double pseudo_regret(const BanditInstance& instance, std::span<const int> actions) {
  const double best = instance.best_rate();
  const auto horizon = static_cast<std::int64_t>(actions.size());
  double total = 0.0;
  for (std::int64_t s = 1; s <= horizon; ++s) {
    std::int64_t lag = horizon - s;
    if (instance.censor_window) lag = std::min(lag, *instance.censor_window);
    total += (best - instance.theta[static_cast<std::size_t>(actions[static_cast<std::size_t>(s - 1)])]) *
             instance.delays.cdf(lag);
  }
  return total;
}

namespace {

// Same accounting as pseudo_regret, with the disclosure weights for horizon
// `t` served from a precomputed table (tau[lag] = cdf(min(lag, m))).
double pseudo_regret_from_table(const BanditInstance& instance, std::span<const int> actions,
                                std::int64_t t, std::span<const double> tau) {
  const double best = instance.best_rate();
  double total = 0.0;
  for (std::int64_t s = 1; s <= t; ++s) {
    std::int64_t lag = t - s;
    if (instance.censor_window) lag = std::min(lag, *instance.censor_window);
    total += (best - instance.theta[static_cast<std::size_t>(actions[static_cast<std::size_t>(s - 1)])]) *
             tau[static_cast<std::size_t>(lag)];
  }
  return total;
}

}  // namespace

RegretTrace run_trace(const BanditInstance& instance, Policy& policy, std::uint64_t seed,
                      std::span<const std::int64_t> checkpoints, std::string policy_label) {
  instance.validate();
  Environment env(instance, Rng(seed));

  std::int64_t max_lag = instance.horizon - 1;
  if (instance.censor_window) max_lag = std::min(max_lag, *instance.censor_window);
  std::vector<double> tau(static_cast<std::size_t>(max_lag) + 1);
  for (std::int64_t d = 0; d <= max_lag; ++d) {
    tau[static_cast<std::size_t>(d)] = instance.delays.cdf(d);
  }

  RegretTrace trace;
  trace.seed = seed;
  trace.policy = std::move(policy_label);
  trace.instance_id = instance.describe();

  std::vector<int> actions;
  actions.reserve(static_cast<std::size_t>(instance.horizon));
  std::int64_t cum_reward = 0;
  std::size_t next_checkpoint = 0;

  for (std::int64_t t = 1; t <= instance.horizon; ++t) {
    const int arm = policy.select_arm(t);
    const FeedbackBatch batch = env.step(arm);
    actions.push_back(arm);
    cum_reward += batch.reward();
    policy.observe(arm, batch);

    while (next_checkpoint < checkpoints.size() && checkpoints[next_checkpoint] == t) {
      trace.points.push_back(TracePoint{
          t, pseudo_regret_from_table(instance, actions, t, tau), cum_reward});
      ++next_checkpoint;
    }
  }
  return trace;
}

}  // namespace convbandit
