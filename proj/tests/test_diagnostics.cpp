#include "doctest.h"

#include <cmath>

#include "convbandit/diagnostics.hpp"

using namespace convbandit;

namespace {

ConcentrationOptions base_options() {
  ConcentrationOptions opt;
  opt.instance.theta = {0.5, 0.25};
  opt.instance.delays = DelayDistribution::geometric(10.0);
  opt.instance.horizon = 1000;
  opt.t = 1000;
  opt.replications = 1000;
  opt.seed = 99;
  return opt;
}

}  // namespace

TEST_CASE("large budgets leave no observable violations") {
  auto opt = base_options();
  opt.beta = 20.0;
  const auto report = check_concentration(opt);
  // Envelope beta e log(t) e^-beta is ~7.7e-7 here, far below Monte-Carlo
  // resolution; the empirical frequency must be exactly zero.
  CHECK(report.ucb_envelope == doctest::Approx(20.0 * std::exp(1.0) * std::log(1000.0) *
                                               std::exp(-20.0)));
  CHECK(report.ucb_violation_freq == 0.0);
  CHECK(report.klucb_violation_freq == 0.0);
  CHECK(report.pass);
}

TEST_CASE("small budgets make the envelope vacuous and say so") {
  auto opt = base_options();
  opt.t = 100;
  opt.instance.horizon = 100;
  opt.beta = 3.0;
  const auto report = check_concentration(opt);
  // 3 e ln(100) e^-3 is about 1.87: no frequency can violate it.
  CHECK(report.ucb_envelope == doctest::Approx(1.8696).epsilon(1e-3));
  CHECK(report.ucb_vacuous);
  CHECK(report.klucb_vacuous);
  CHECK(report.pass);
  CHECK(report.detail().find("vacuous") != std::string::npos);
}

TEST_CASE("zero-rate arms trivially satisfy coverage") {
  auto opt = base_options();
  opt.instance.theta = {0.0, 0.0};
  opt.beta = 5.0;
  const auto report = check_concentration(opt);
  CHECK(report.ucb_violation_freq == 0.0);
  CHECK(report.klucb_violation_freq == 0.0);
  CHECK(report.pass);
}

TEST_CASE("diagnostic suites pass at reduced scale") {
  CHECK(check_divergence_sandwich(0.01).pass);
  CHECK(check_bound_monotonicity(20, 3).pass);
  CHECK(check_kl_inversion(200, 4).pass);

  OracleEquivalenceOptions oracle;
  oracle.configs = 25;
  oracle.length = 400;
  oracle.seed = 5;
  CHECK(check_estimator_oracle(oracle).pass);

  UnbiasednessOptions unbiased;
  unbiased.instance.theta = {0.4, 0.2};
  unbiased.instance.delays = DelayDistribution::geometric(5.0);
  unbiased.instance.horizon = 300;
  unbiased.instance.censor_window = 20;
  unbiased.replications = 2000;
  unbiased.seed = 6;
  unbiased.checkpoints = {150, 300};
  const auto report = check_unbiasedness(unbiased);
  CHECK(report.pass);
  CHECK(report.mean_estimate.size() == 2);
  CHECK(report.detail().find("t=150") != std::string::npos);
}
