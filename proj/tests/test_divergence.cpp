#include "doctest.h"

#include <cmath>

#include "convbandit/divergence.hpp"

using namespace convbandit;

namespace {

// Independent long-double evaluation of the closed forms, used as the oracle
// for the frozen expectations below.
long double bernoulli_kl_oracle(long double p, long double q) {
  long double v = 0.0L;
  if (p > 0.0L) v += p * std::log(p / q);
  if (p < 1.0L) v += (1.0L - p) * std::log((1.0L - p) / (1.0L - q));
  return v;
}

long double poisson_kl_oracle(long double p, long double q) {
  if (p == 0.0L) return q;
  return p * std::log(p / q) + q - p;
}

}  // namespace

TEST_CASE("bernoulli divergence closed form") {
  CHECK(bernoulli_kl(0.5, 0.5) == 0.0);
  CHECK(bernoulli_kl(0.0, 0.5) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  // d(0.05, 0.1) = 0.05 log(1/2) + 0.95 log(0.95/0.9)
  CHECK(bernoulli_kl(0.05, 0.1) == doctest::Approx(0.0167065011787646).epsilon(1e-10));
  CHECK(bernoulli_kl(0.05, 0.1) ==
        doctest::Approx(static_cast<double>(bernoulli_kl_oracle(0.05L, 0.1L))).epsilon(1e-12));
  CHECK(bernoulli_kl(1.0, 1.0) == 0.0);
  CHECK(bernoulli_kl(0.0, 0.0) == 0.0);
}

TEST_CASE("bernoulli divergence domain and infinity handling") {
  CHECK_THROWS_AS(bernoulli_kl(0.5, 0.0), InfiniteDivergenceError);
  CHECK_THROWS_AS(bernoulli_kl(0.5, 1.0), InfiniteDivergenceError);
  CHECK_THROWS_AS(bernoulli_kl(-0.1, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(bernoulli_kl(0.5, 1.5), std::invalid_argument);
}

TEST_CASE("poisson divergence closed form") {
  CHECK(poisson_kl(0.3, 0.3) == 0.0);
  CHECK(poisson_kl(0.0, 0.25) == 0.25);
  // 0.1 log(1/2) + 0.1
  CHECK(poisson_kl(0.1, 0.2) == doctest::Approx(0.0306852819440055).epsilon(1e-10));
  CHECK(poisson_kl(0.1, 0.2) ==
        doctest::Approx(static_cast<double>(poisson_kl_oracle(0.1L, 0.2L))).epsilon(1e-12));
  CHECK_THROWS_AS(poisson_kl(0.1, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(poisson_kl(-0.1, 0.5), std::invalid_argument);
}

TEST_CASE("poisson divergence scaling identity") {
  const double grid[] = {0.02, 0.1, 0.35, 0.7, 0.93};
  for (double p : grid) {
    for (double q : grid) {
      if (p >= q) continue;
      for (double tau : {0.05, 0.3, 0.5, 0.8647, 1.0}) {
        const double lhs = poisson_kl(tau * p, tau * q);
        const double rhs = tau * poisson_kl(p, q);
        CHECK(std::abs(lhs - rhs) < 1e-12);
      }
    }
  }
}

TEST_CASE("divergence sandwich and nonnegativity on a coarse grid") {
  for (int i = 1; i < 40; ++i) {
    for (int j = i + 1; j < 40; ++j) {
      const double p = i / 40.0;
      const double q = j / 40.0;
      const double bern = bernoulli_kl(p, q);
      const double pois = poisson_kl(p, q);
      CHECK(bern >= 0.0);
      CHECK(pois >= 0.0);
      CHECK((1.0 - q) * bern <= pois + 1e-12);
      CHECK(pois <= bern + 1e-12);
    }
  }
}

TEST_CASE("scaled bernoulli divergence is nondecreasing in the scale") {
  for (auto [p, q] : {std::pair{0.05, 0.1}, {0.2, 0.7}, {0.45, 0.5}}) {
    double prev = 0.0;
    for (int i = 1; i <= 20; ++i) {
      const double alpha = i / 20.0;
      const double v = bernoulli_kl(alpha * p, alpha * q);
      CHECK(v >= prev - 1e-14);
      prev = v;
    }
  }
}

TEST_CASE("klucb inversion basics") {
  CHECK(klucb_invert(0.5, 10.0, 0.0) == 0.5);
  // d_pois(0, q) = q, so the root is budget / n_eff.
  CHECK(klucb_invert(0.0, 100.0, 4.6) == doctest::Approx(0.046).epsilon(1e-9));
  // d_pois(0.9, 1) ~ 0.00518 so a budget of 3 saturates the cap.
  CHECK(klucb_invert(0.9, 1.0, 3.0) == 1.0);
  CHECK(klucb_invert(1.2, 5.0, 1.0) == 1.0);
  CHECK(klucb_invert(1.2, 5.0, 0.0) == 1.0);
  CHECK_THROWS_AS(klucb_invert(0.5, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(klucb_invert(0.5, -1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(klucb_invert(0.5, 1.0, -0.5), std::invalid_argument);
}

TEST_CASE("klucb inversion satisfies its budget when interior") {
  for (double theta : {0.0, 0.01, 0.3, 0.72}) {
    for (double n : {1.0, 17.0, 430.0, 9999.0}) {
      for (double budget : {1e-4, 0.1, 2.0, 11.0}) {
        const double u = klucb_invert(theta, n, budget);
        REQUIRE(u >= theta);
        REQUIRE(u <= 1.0);
        if (u < 1.0) {
          CHECK(std::abs(n * poisson_kl(theta, u) - budget) < 1e-6);
        }
      }
    }
  }
}
