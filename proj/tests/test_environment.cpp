#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "convbandit/environment.hpp"
#include "convbandit/policies.hpp"

using namespace convbandit;

namespace {

BanditInstance small_instance() {
  BanditInstance inst;
  inst.theta = {0.6, 0.3};
  inst.delays = DelayDistribution::geometric(3.0);
  inst.horizon = 100;
  return inst;
}

}  // namespace

TEST_CASE("no conversions when every rate is zero") {
  BanditInstance inst;
  inst.theta = {0.0, 0.0};
  inst.delays = DelayDistribution::geometric(2.0);
  inst.horizon = 200;
  Environment env(inst, Rng(1));
  for (std::int64_t t = 1; t <= inst.horizon; ++t) {
    CHECK(env.step(static_cast<int>(t % 2)).reward() == 0);
  }
}

TEST_CASE("sure conversion with zero delay pays every round") {
  BanditInstance inst;
  inst.theta = {1.0, 1.0};
  inst.delays = DelayDistribution::point_mass(0);
  inst.horizon = 50;
  Environment env(inst, Rng(2));
  for (std::int64_t t = 1; t <= inst.horizon; ++t) {
    const auto batch = env.step(0);
    CHECK(batch.reward() == 1);
    CHECK(batch.disclosures[0].pull_time == t);
  }
}

TEST_CASE("delays beyond the censoring window never disclose") {
  BanditInstance inst;
  inst.theta = {1.0, 1.0};
  inst.delays = DelayDistribution::point_mass(7);
  inst.censor_window = 5;
  inst.horizon = 300;
  Environment env(inst, Rng(3));
  for (std::int64_t t = 1; t <= inst.horizon; ++t) {
    CHECK(env.step(0).reward() == 0);
  }
  CHECK(env.conversions_scheduled() == 0);
}

TEST_CASE("stepping past the horizon fails") {
  auto inst = small_instance();
  inst.horizon = 3;
  Environment env(inst, Rng(4));
  env.step(0);
  env.step(0);
  env.step(0);
  CHECK(env.done());
  CHECK_THROWS_AS(env.step(0), std::logic_error);
  CHECK_THROWS_AS(Environment(inst, Rng(4)).step(5), std::invalid_argument);
}

TEST_CASE("pseudo-regret closed forms") {
  BanditInstance inst;
  inst.theta = {0.5, 0.3};
  inst.delays = DelayDistribution::geometric(2.0);
  inst.horizon = 10;

  const std::vector<int> all_best(10, 0);
  CHECK(pseudo_regret(inst, all_best) == 0.0);

  // A single suboptimal pull at the last round only carries weight cdf(0).
  std::vector<int> last_bad(10, 0);
  last_bad[9] = 1;
  CHECK(pseudo_regret(inst, last_bad) ==
        doctest::Approx(0.2 * inst.delays.cdf(0)).epsilon(1e-12));

  // Censored hand evaluation: T=10, m=3, constant gap 0.1,
  // cdf table (0.2, 0.5, 0.8, 0.9): 0.1 * (7*0.9 + 0.8 + 0.5 + 0.2) = 0.78.
  BanditInstance cens;
  cens.theta = {0.2, 0.1};
  cens.delays = DelayDistribution::tabulated({0.2, 0.5, 0.8, 0.9}, 0.1);
  cens.censor_window = 3;
  cens.horizon = 10;
  const std::vector<int> all_bad(10, 1);
  CHECK(pseudo_regret(cens, all_bad) == doctest::Approx(0.78).epsilon(1e-12));
}

TEST_CASE("trace of the oracle policy is identically zero") {
  const auto inst = small_instance();
  OraclePolicy oracle(inst);
  const std::vector<std::int64_t> checkpoints{10, 50, 100};
  const auto trace = run_trace(inst, oracle, 77, checkpoints, "oracle");
  REQUIRE(trace.points.size() == 3);
  for (const auto& pt : trace.points) CHECK(pt.cum_pseudo_regret == 0.0);
}

TEST_CASE("round-robin trace with immediate disclosure") {
  BanditInstance inst;
  inst.theta = {0.4, 0.2};
  inst.delays = DelayDistribution::point_mass(0);
  inst.horizon = 4;
  UniformPolicy rr(2);
  const std::vector<std::int64_t> checkpoints{4};
  const auto trace = run_trace(inst, rr, 5, checkpoints, "uniform");
  CHECK(trace.points[0].cum_pseudo_regret == doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("traces are reproducible and pseudo-regret is nondecreasing") {
  const auto inst = small_instance();
  std::vector<std::int64_t> checkpoints;
  for (std::int64_t t = 10; t <= 100; t += 10) checkpoints.push_back(t);

  PolicyConfig cfg;
  cfg.variant = PolicyVariant::kDelayedKlucb;
  auto p1 = make_policy(cfg, inst);
  auto p2 = make_policy(cfg, inst);
  const auto t1 = run_trace(inst, *p1, 123, checkpoints, "d-klucb");
  const auto t2 = run_trace(inst, *p2, 123, checkpoints, "d-klucb");
  REQUIRE(t1.points.size() == t2.points.size());
  double prev = 0.0;
  for (std::size_t i = 0; i < t1.points.size(); ++i) {
    CHECK(t1.points[i].cum_pseudo_regret == t2.points[i].cum_pseudo_regret);
    CHECK(t1.points[i].cum_reward == t2.points[i].cum_reward);
    CHECK(t1.points[i].cum_pseudo_regret >= prev - 1e-12);
    prev = t1.points[i].cum_pseudo_regret;
  }
}

TEST_CASE("total reward equals the scheduled disclosures") {
  auto inst = small_instance();
  inst.horizon = 500;
  Environment env(inst, Rng(9));
  std::int64_t total = 0;
  for (std::int64_t t = 1; t <= inst.horizon; ++t) {
    total += env.step(static_cast<int>(t % 2)).reward();
  }
  CHECK(total == env.conversions_scheduled());
}

TEST_CASE("censored disclosures never exceed the window lag") {
  BanditInstance inst;
  inst.theta = {0.8, 0.5};
  inst.delays = DelayDistribution::geometric(6.0);
  inst.censor_window = 4;
  inst.horizon = 2000;
  Environment env(inst, Rng(10));
  for (std::int64_t t = 1; t <= inst.horizon; ++t) {
    for (const auto& d : env.step(static_cast<int>(t % 2)).disclosures) {
      CHECK(t - d.pull_time <= 4);
      CHECK(d.pull_time <= t);
    }
  }
}

TEST_CASE("monte-carlo reward of a fixed schedule matches its expectation") {
  BanditInstance inst;
  inst.theta = {0.6, 0.3};
  inst.delays = DelayDistribution::geometric(3.0);
  inst.horizon = 100;

  for (bool censored : {false, true}) {
    if (censored) {
      inst.censor_window = 2;
    } else {
      inst.censor_window.reset();
    }
    double expected = 0.0;
    for (std::int64_t s = 1; s <= inst.horizon; ++s) {
      std::int64_t lag = inst.horizon - s;
      if (censored) lag = std::min<std::int64_t>(lag, 2);
      expected += inst.theta[static_cast<std::size_t>((s - 1) % 2)] * inst.delays.cdf(lag);
    }

    const int reps = 10000;
    double sum = 0.0, sum_sq = 0.0;
    for (int rep = 0; rep < reps; ++rep) {
      Environment env(inst, Rng(child_seed(2025, censored ? 1 : 0, static_cast<std::uint64_t>(rep))));
      std::int64_t reward = 0;
      for (std::int64_t t = 1; t <= inst.horizon; ++t) {
        reward += env.step(static_cast<int>((t - 1) % 2)).reward();
      }
      sum += static_cast<double>(reward);
      sum_sq += static_cast<double>(reward) * static_cast<double>(reward);
    }
    const double mean = sum / reps;
    const double var = (sum_sq - reps * mean * mean) / (reps - 1.0);
    const double se = std::sqrt(var / reps);
    CHECK(std::abs(mean - expected) < 3.0 * se);
  }
}

TEST_CASE("instance json round trip and key validation") {
  const auto inst = BanditInstance::from_json(
      R"({"theta": [0.1, 0.05, 0.03], "delay": {"geometric": {"mean": 500}},
          "censor_window": 1000, "horizon": 10000})");
  CHECK(inst.arms() == 3);
  CHECK(inst.best_rate() == 0.1);
  CHECK(inst.censored());
  CHECK(*inst.censor_window == 1000);
  CHECK(inst.horizon == 10000);

  const auto open = BanditInstance::from_json(
      R"({"theta": [0.5, 0.4], "delay": {"geometric": {"mean": 5}}, "censor_window": null,
          "horizon": 100})");
  CHECK(!open.censored());

  CHECK_THROWS_WITH_AS(BanditInstance::from_json(R"({"theta": [0.5, 0.4], "horizon": 10,
                                                     "delay": {"geometric": {"mean": 5}},
                                                     "widnow": 3})"),
                       doctest::Contains("widnow"), std::invalid_argument);
  CHECK_THROWS(BanditInstance::from_json(R"({"theta": [0.5], "horizon": 10,
                                             "delay": {"geometric": {"mean": 5}}})"));
  CHECK_THROWS(BanditInstance::from_json(R"({"theta": [0.5, 1.4], "horizon": 10,
                                             "delay": {"geometric": {"mean": 5}}})"));
}
