#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "convbandit/delay_model.hpp"

using namespace convbandit;

TEST_CASE("geometric cdf closed form") {
  const auto d1 = DelayDistribution::geometric(1.0);  // decay 0.5
  CHECK(d1.geometric_decay() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(d1.cdf(0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(d1.cdf(1) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(d1.cdf(-1) == 0.0);

  const auto d500 = DelayDistribution::geometric(500.0);
  // 1 - (500/501)^1001, roughly 1 - e^{-2}
  CHECK(d500.cdf(1000) == doctest::Approx(1.0 - std::pow(500.0 / 501.0, 1001.0)).epsilon(1e-15));
  CHECK(d500.cdf(1000) == doctest::Approx(0.8647).epsilon(1e-3));
}

TEST_CASE("survival complements the cdf exactly") {
  const auto g = DelayDistribution::geometric(7.0);
  for (std::int64_t d : {0, 1, 5, 50, 1000}) {
    CHECK(g.survival(d) == 1.0 - g.cdf(d));
  }
  const auto t = DelayDistribution::tabulated({0.2, 0.5, 0.8}, 0.1);
  for (std::int64_t d : {0, 1, 2, 3, 10}) {
    CHECK(t.survival(d) == 1.0 - t.cdf(d));
  }
}

TEST_CASE("cdf is nondecreasing and bounded") {
  for (const auto& dist : {DelayDistribution::geometric(0.3), DelayDistribution::geometric(120.0),
                           DelayDistribution::tabulated({0.1, 0.1, 0.4, 0.95}),
                           DelayDistribution::tabulated({0.0, 0.2, 0.6}, 0.25)}) {
    double prev = 0.0;
    for (std::int64_t d = 0; d < 600; ++d) {
      const double v = dist.cdf(d);
      CHECK(v >= prev);
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
      prev = v;
    }
  }
}

TEST_CASE("tabulated point mass") {
  const auto pm = DelayDistribution::point_mass(0);
  CHECK(pm.cdf(0) == 1.0);
  CHECK(pm.cdf(5) == 1.0);
  CHECK(pm.mean() == 0.0);
  Rng rng(3);
  for (int i = 0; i < 100; ++i) CHECK(pm.sample(rng) == 0);

  const auto pm7 = DelayDistribution::point_mass(7);
  CHECK(pm7.cdf(6) == 0.0);
  CHECK(pm7.cdf(7) == 1.0);
  CHECK(pm7.mean() == doctest::Approx(7.0).epsilon(1e-12));
}

TEST_CASE("mean round-trips and sums survival") {
  CHECK(DelayDistribution::geometric(500.0).mean() == 500.0);
  CHECK(DelayDistribution::geometric(0.25).mean() == 0.25);
  // survival (1, 0.5, 0, ...) i.e. cdf (0, 0.5, 1): mean 1.5
  CHECK(DelayDistribution::tabulated({0.0, 0.5, 1.0}).mean() == doctest::Approx(1.5).epsilon(1e-12));
  CHECK_THROWS_AS(DelayDistribution::tabulated({0.0, 0.5}, 0.5).mean(), std::domain_error);
}

TEST_CASE("construction rejects malformed inputs") {
  CHECK_THROWS_AS(DelayDistribution::geometric(0.0), std::invalid_argument);
  CHECK_THROWS_AS(DelayDistribution::geometric(-2.0), std::invalid_argument);
  CHECK_THROWS_AS(DelayDistribution::tabulated({}), std::invalid_argument);
  CHECK_THROWS_AS(DelayDistribution::tabulated({0.5, 0.4}), std::invalid_argument);
  CHECK_THROWS_AS(DelayDistribution::tabulated({0.5, 1.1}), std::invalid_argument);
  CHECK_THROWS_AS(DelayDistribution::tabulated({0.5, 0.95}, 0.2), std::invalid_argument);
}

TEST_CASE("sampling is deterministic per seed") {
  const auto g = DelayDistribution::geometric(12.0);
  Rng a(99), b(99), c(100);
  bool all_equal = true, any_diff = false;
  for (int i = 0; i < 500; ++i) {
    const auto va = g.sample(a);
    if (va != g.sample(b)) all_equal = false;
    if (va != g.sample(c)) any_diff = true;
  }
  CHECK(all_equal);
  CHECK(any_diff);
}

TEST_CASE("geometric sampling matches its mean and cdf") {
  const double mu = 1.0;
  const auto g = DelayDistribution::geometric(mu);
  const int n = 1000000;
  Rng rng(2024);
  double sum = 0.0;
  std::int64_t at_or_below[3] = {0, 0, 0};
  const std::int64_t marks[3] = {0, 1, 2};  // {0, mu, 2 mu}
  for (int i = 0; i < n; ++i) {
    const auto d = g.sample(rng);
    sum += static_cast<double>(d);
    for (int j = 0; j < 3; ++j) {
      if (d <= marks[j]) at_or_below[j] += 1;
    }
  }
  // Var of geometric(decay rho) on {0,1,...} is rho / (1-rho)^2 = mu (mu + 1).
  const double se_mean = std::sqrt(mu * (mu + 1.0) / n);
  CHECK(std::abs(sum / n - mu) < 3.0 * se_mean);
  for (int j = 0; j < 3; ++j) {
    const double tau = g.cdf(marks[j]);
    const double se = std::sqrt(tau * (1.0 - tau) / n);
    CHECK(std::abs(static_cast<double>(at_or_below[j]) / n - tau) < 3.0 * se);
  }
}

TEST_CASE("tabulated sampling walks the inverse cdf") {
  const auto t = DelayDistribution::tabulated({0.25, 0.5});  // mass 0.25, 0.25, 0.5 at {0,1,2}
  Rng rng(7);
  const int n = 200000;
  std::int64_t counts[3] = {0, 0, 0};
  for (int i = 0; i < n; ++i) {
    const auto d = t.sample(rng);
    REQUIRE(d >= 0);
    REQUIRE(d <= 2);
    counts[d] += 1;
  }
  CHECK(std::abs(counts[0] / static_cast<double>(n) - 0.25) < 0.01);
  CHECK(std::abs(counts[1] / static_cast<double>(n) - 0.25) < 0.01);
  CHECK(std::abs(counts[2] / static_cast<double>(n) - 0.50) < 0.01);
}

TEST_CASE("tabulated tail mass samples as never-disclosed") {
  const auto t = DelayDistribution::tabulated({0.5}, 0.5);
  Rng rng(11);
  int never = 0;
  for (int i = 0; i < 10000; ++i) {
    const auto d = t.sample(rng);
    if (d == DelayDistribution::kNever) {
      ++never;
    } else {
      CHECK(d == 0);
    }
  }
  CHECK(never > 4600);
  CHECK(never < 5400);
}

TEST_CASE("json loading") {
  const auto g = DelayDistribution::from_json(R"({"geometric": {"mean": 500}})");
  CHECK(g.kind() == DelayDistribution::Kind::kGeometric);
  CHECK(g.mean() == 500.0);

  const auto t = DelayDistribution::from_json(R"({"tabulated": {"cdf": [0.2, 0.5, 0.8, 0.9]}})");
  CHECK(t.kind() == DelayDistribution::Kind::kTabulated);
  CHECK(t.table_length() == 4);
  CHECK(t.cdf(3) == 0.9);
  CHECK(t.cdf(4) == 1.0);

  const auto tail =
      DelayDistribution::from_json(R"({"tabulated": {"cdf": [0.2, 0.5], "tail_survival": 0.5}})");
  CHECK(tail.cdf(10) == 0.5);

  CHECK_THROWS(DelayDistribution::from_json(R"({"gaussian": {"mean": 1}})"));
}
