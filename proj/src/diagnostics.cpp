#include "convbandit/diagnostics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

#include "convbandit/bounds.hpp"
#include "convbandit/divergence.hpp"
#include "convbandit/estimators.hpp"
#include "convbandit/policies.hpp"
#include "convbandit/rng.hpp"

namespace convbandit {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

CheckResult check_divergence_sandwich(double step) {
  const int n = static_cast<int>(std::llround(1.0 / step)) - 1;
  std::int64_t pairs = 0;
  double worst_slack = 0.0;
  for (int i = 1; i <= n; ++i) {
    const double p = static_cast<double>(i) * step;
    for (int j = i + 1; j <= n; ++j) {
      const double q = static_cast<double>(j) * step;
      const double bern = bernoulli_kl(p, q);
      const double pois = poisson_kl(p, q);
      const double tol = 1e-10 * std::max(1.0, bern);
      const double lo_gap = pois - (1.0 - q) * bern;   // must be >= 0
      const double hi_gap = bern - pois;               // must be >= 0
      worst_slack = std::min({worst_slack, lo_gap + tol, hi_gap + tol});
      if (lo_gap < -tol || hi_gap < -tol) {
        return CheckResult{false, "sandwich violated at p=" + fmt(p) + ", q=" + fmt(q)};
      }
      ++pairs;
    }
  }
  return CheckResult{true, std::to_string(pairs) + " (p,q) pairs checked"};
}

CheckResult check_bound_monotonicity(int instances, std::uint64_t seed) {
  Rng rng(seed);
  for (int i = 0; i < instances; ++i) {
    const int arms = 2 + static_cast<int>(rng.next_u64() % 4);
    std::vector<double> theta;
    do {
      theta.clear();
      for (int k = 0; k < arms; ++k) theta.push_back(0.02 + 0.96 * rng.next_unit());
      std::sort(theta.begin(), theta.end(), std::greater<>());
    } while (theta[0] - theta[1] < 1e-3);

    // The scaled divergence d(tau p, tau q) is convex in tau and vanishes at
    // 0, so d / tau is nondecreasing and each per-arm ratio tau * gap / d is
    // nonincreasing: harsher censoring (smaller tau_m) makes the problem
    // harder, never easier.
    double prev = 0.0;
    for (int step = 1; step <= 10; ++step) {
      const double tau = 0.1 * static_cast<double>(step);
      const double lb = lower_bound_censored(theta, tau).lower_bound;
      if (step > 1 && lb > prev * (1.0 + 1e-12) + 1e-12) {
        return CheckResult{false, "lower bound increased between tau=" + fmt(tau - 0.1) +
                                      " and tau=" + fmt(tau) + " on instance " + std::to_string(i)};
      }
      prev = lb;
    }
    const double at_one = lower_bound_censored(theta, 1.0).lower_bound;
    const double uncens = lower_bound_uncensored(theta).lower_bound;
    if (at_one != uncens) {
      return CheckResult{false, "censored bound at tau=1 differs from the uncensored bound"};
    }
  }
  return CheckResult{true, std::to_string(instances) + " instances, tau grid 0.1..1.0"};
}

namespace {

// Worst-case |incremental - direct sum| over one random pull sequence,
// checked at every round for every arm, for both effective-count paths.
double oracle_equivalence_one_config(std::uint64_t seed, std::int64_t length) {
  Rng rng(seed);
  const int arms = 2 + static_cast<int>(rng.next_u64() % 4);
  const double mu = 1.0 + 199.0 * rng.next_unit();
  const std::int64_t m = 1 + static_cast<std::int64_t>(rng.next_u64() % 400);
  const auto delays = DelayDistribution::geometric(mu);
  const double rho = delays.geometric_decay();

  // Disclosure weights by elapsed age, uncapped and capped at the window.
  std::vector<double> tau(static_cast<std::size_t>(length));
  std::vector<double> tau_capped(static_cast<std::size_t>(length));
  for (std::int64_t e = 0; e < length; ++e) {
    tau[static_cast<std::size_t>(e)] = delays.cdf(e);
    tau_capped[static_cast<std::size_t>(e)] = delays.cdf(std::min(e, m));
  }

  ArmStats stats(arms, m);
  std::vector<int> actions;
  std::vector<double> eff_window(static_cast<std::size_t>(arms));
  std::vector<std::vector<std::int64_t>> pull_times(static_cast<std::size_t>(arms));

  // Direct-sum accumulators, recomputed from scratch each round with
  // compensated addition so the reference itself is precise to ~1 ulp.
  std::vector<double> ref(static_cast<std::size_t>(arms));
  std::vector<double> ref_c(static_cast<std::size_t>(arms));
  std::vector<double> comp(static_cast<std::size_t>(arms));
  std::vector<double> comp_c(static_cast<std::size_t>(arms));

  double worst = 0.0;
  for (std::int64_t t = 1; t <= length; ++t) {
    const int arm = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(arms));
    stats.record_pull(arm, rho);
    actions.push_back(arm);
    pull_times[static_cast<std::size_t>(arm)].push_back(t);

    std::fill(ref.begin(), ref.end(), 0.0);
    std::fill(ref_c.begin(), ref_c.end(), 0.0);
    std::fill(comp.begin(), comp.end(), 0.0);
    std::fill(comp_c.begin(), comp_c.end(), 0.0);
    for (std::int64_t s = 1; s <= t; ++s) {
      const auto k = static_cast<std::size_t>(actions[static_cast<std::size_t>(s - 1)]);
      const auto e = static_cast<std::size_t>(t - s);
      double y = tau[e] - comp[k];
      double z = ref[k] + y;
      comp[k] = (z - ref[k]) - y;
      ref[k] = z;
      y = tau_capped[e] - comp_c[k];
      z = ref_c[k] + y;
      comp_c[k] = (z - ref_c[k]) - y;
      ref_c[k] = z;
    }

    stats.effective_counts_windowed(tau, delays.cdf(m), eff_window);
    for (int k = 0; k < arms; ++k) {
      const auto ks = static_cast<std::size_t>(k);
      worst = std::max(worst, std::abs(stats.effective_count_geometric(k) - ref[ks]));
      worst = std::max(worst, std::abs(eff_window[ks] - ref_c[ks]));
    }

    // Spot-check the per-arm reference API against the scan (it evaluates
    // the CDF directly instead of going through the weight tables).
    if (t % 97 == 0) {
      const int k = static_cast<int>(t / 97 % arms);
      const auto ks = static_cast<std::size_t>(k);
      const std::int64_t now = t + 1;
      worst = std::max(worst, std::abs(effective_count_reference(pull_times[ks], now, delays) - ref[ks]));
      worst = std::max(worst,
                       std::abs(effective_count_reference_censored(pull_times[ks], now, delays, m) - ref_c[ks]));
    }
  }
  return worst;
}

}  // namespace

CheckResult check_estimator_oracle(const OracleEquivalenceOptions& options) {
  int threads = options.threads;
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  if (threads <= 0) threads = 1;
  threads = std::min<int>(threads, options.configs);

  std::atomic<int> next{0};
  std::vector<double> worst_per_worker(static_cast<std::size_t>(threads), 0.0);
  auto worker = [&](int w) {
    double worst = 0.0;
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= options.configs) break;
      worst = std::max(worst, oracle_equivalence_one_config(child_seed(options.seed, 0, static_cast<std::uint64_t>(i)),
                                                            options.length));
    }
    worst_per_worker[static_cast<std::size_t>(w)] = worst;
  };
  if (threads <= 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w) pool.emplace_back(worker, w);
    for (auto& th : pool) th.join();
  }
  const double worst = *std::max_element(worst_per_worker.begin(), worst_per_worker.end());
  std::ostringstream os;
  os << options.configs << " configs of length " << options.length << ", max |error| = " << worst;
  return CheckResult{worst < options.tolerance, os.str()};
}

CheckResult check_kl_inversion(int points, std::uint64_t seed) {
  Rng rng(seed);
  double worst_residual = 0.0;
  for (int i = 0; i < points; ++i) {
    const double theta_hat = 0.99 * rng.next_unit();
    const double n_eff = std::exp(std::log(1e4) * rng.next_unit());  // log-uniform on [1, 1e4]
    const double budget = 20.0 * rng.next_unit();
    const double u = klucb_invert(theta_hat, n_eff, budget);
    if (u < theta_hat || u > 1.0) {
      return CheckResult{false, "index left [theta_hat, 1] at point " + std::to_string(i)};
    }
    if (u < 1.0) {
      const double residual = std::abs(n_eff * poisson_kl(theta_hat, u) - budget);
      worst_residual = std::max(worst_residual, residual);
      if (residual > 1e-6) {
        std::ostringstream os;
        os << "budget residual " << residual << " at theta_hat=" << theta_hat
           << " n_eff=" << n_eff << " budget=" << budget;
        return CheckResult{false, os.str()};
      }
    }
  }
  // Monotone nondecreasing in the budget.
  for (int i = 0; i < points / 5; ++i) {
    const double theta_hat = 0.99 * rng.next_unit();
    const double n_eff = std::exp(std::log(1e4) * rng.next_unit());
    double prev = -1.0;
    for (double budget = 0.0; budget <= 20.0; budget += 0.5) {
      const double u = klucb_invert(theta_hat, n_eff, budget);
      if (u < prev - 1e-11) {
        return CheckResult{false, "index not monotone in the budget"};
      }
      prev = u;
    }
  }
  // Monotone nonincreasing in the effective count.
  for (int i = 0; i < points / 5; ++i) {
    const double theta_hat = 0.99 * rng.next_unit();
    const double budget = 20.0 * rng.next_unit();
    double prev = 2.0;
    for (double n_eff = 1.0; n_eff <= 1e4; n_eff *= 2.0) {
      const double u = klucb_invert(theta_hat, n_eff, budget);
      if (u > prev + 1e-11) {
        return CheckResult{false, "index not monotone in the effective count"};
      }
      prev = u;
    }
  }
  std::ostringstream os;
  os << points << " grid points, worst budget residual = " << worst_residual;
  return CheckResult{true, os.str()};
}

ConcentrationReport check_concentration(const ConcentrationOptions& options) {
  const BanditInstance& inst = options.instance;
  inst.validate();
  const int arms = inst.arms();
  const std::int64_t t = options.t;

  ConcentrationReport report;
  report.beta = options.beta;
  report.t = t;
  report.replications = options.replications;
  const double log_t = std::log(static_cast<double>(t));
  report.ucb_envelope = options.beta * std::exp(1.0) * log_t * std::exp(-options.beta);
  report.klucb_envelope =
      std::exp(1.0) * std::ceil(options.beta * log_t) * std::exp(-options.beta);
  report.ucb_vacuous = report.ucb_envelope >= 1.0;
  report.klucb_vacuous = report.klucb_envelope >= 1.0;

  // Fixed round-robin design: pulls and effective counts are deterministic.
  std::vector<double> n_eff(static_cast<std::size_t>(arms), 0.0);
  std::vector<double> pulls(static_cast<std::size_t>(arms), 0.0);
  std::vector<std::int64_t> cap(static_cast<std::size_t>(t), 0);
  for (std::int64_t s = 1; s < t; ++s) {
    const auto k = static_cast<std::size_t>((s - 1) % arms);
    std::int64_t lag = t - 1 - s;
    if (inst.censor_window) lag = std::min(lag, *inst.censor_window);
    cap[static_cast<std::size_t>(s)] = lag;
    n_eff[k] += inst.delays.cdf(lag);
    pulls[k] += 1.0;
  }

  std::vector<std::int64_t> ucb_violations(static_cast<std::size_t>(arms), 0);
  std::vector<std::int64_t> klucb_violations(static_cast<std::size_t>(arms), 0);
  std::vector<std::int64_t> conv(static_cast<std::size_t>(arms), 0);
  for (int rep = 0; rep < options.replications; ++rep) {
    Rng rng(child_seed(options.seed, 0, static_cast<std::uint64_t>(rep)));
    std::fill(conv.begin(), conv.end(), 0);
    for (std::int64_t s = 1; s < t; ++s) {
      const auto k = static_cast<std::size_t>((s - 1) % arms);
      const bool converts = rng.bernoulli(inst.theta[k]);
      const std::int64_t delay = inst.delays.sample(rng);
      if (converts && delay <= cap[static_cast<std::size_t>(s)]) conv[k] += 1;
    }
    for (int k = 0; k < arms; ++k) {
      const auto ks = static_cast<std::size_t>(k);
      if (n_eff[ks] <= 0.0) continue;
      const double estimate = static_cast<double>(conv[ks]) / n_eff[ks];
      if (inst.theta[ks] > ucb_index(estimate, pulls[ks], n_eff[ks], options.beta)) {
        ucb_violations[ks] += 1;
      }
      if (klucb_index(estimate, n_eff[ks], options.beta) <= inst.theta[ks]) {
        klucb_violations[ks] += 1;
      }
    }
  }

  for (int k = 0; k < arms; ++k) {
    const auto ks = static_cast<std::size_t>(k);
    report.ucb_violation_freq =
        std::max(report.ucb_violation_freq,
                 static_cast<double>(ucb_violations[ks]) / options.replications);
    report.klucb_violation_freq =
        std::max(report.klucb_violation_freq,
                 static_cast<double>(klucb_violations[ks]) / options.replications);
  }
  const bool ucb_ok = report.ucb_vacuous || report.ucb_violation_freq <= report.ucb_envelope;
  const bool klucb_ok =
      report.klucb_vacuous || report.klucb_violation_freq <= report.klucb_envelope;
  report.pass = ucb_ok && klucb_ok;
  return report;
}

std::string ConcentrationReport::detail() const {
  std::ostringstream os;
  os << "beta=" << beta << " t=" << t << " reps=" << replications << "; ucb freq "
     << ucb_violation_freq << " vs envelope " << ucb_envelope
     << (ucb_vacuous ? " (vacuous: envelope >= 1)" : "") << "; klucb freq "
     << klucb_violation_freq << " vs envelope " << klucb_envelope
     << (klucb_vacuous ? " (vacuous: envelope >= 1)" : "");
  return os.str();
}

UnbiasednessReport check_unbiasedness(const UnbiasednessOptions& options) {
  const BanditInstance& inst = options.instance;
  inst.validate();
  const int arms = inst.arms();

  std::vector<std::int64_t> checkpoints = options.checkpoints;
  if (checkpoints.empty()) checkpoints.push_back(inst.horizon);
  const auto n_check = checkpoints.size();

  std::vector<double> weight_by_age;
  double tail_weight = 1.0;
  const bool windowed = inst.censored();
  if (windowed) {
    const std::int64_t m = *inst.censor_window;
    weight_by_age.resize(static_cast<std::size_t>(m));
    for (std::int64_t age = 0; age < m; ++age) {
      weight_by_age[static_cast<std::size_t>(age)] = inst.delays.cdf(age);
    }
    tail_weight = inst.delays.cdf(m);
  }
  const double decay = windowed ? 0.0 : inst.delays.geometric_decay();

  std::vector<std::vector<double>> sum(n_check, std::vector<double>(static_cast<std::size_t>(arms), 0.0));
  std::vector<std::vector<double>> sum_sq = sum;
  std::vector<double> eff(static_cast<std::size_t>(arms), 0.0);

  for (int rep = 0; rep < options.replications; ++rep) {
    Environment env(inst, Rng(child_seed(options.seed, 0, static_cast<std::uint64_t>(rep))));
    ArmStats stats(arms, windowed ? *inst.censor_window : 0);
    UniformPolicy schedule(arms);
    std::size_t next_check = 0;
    for (std::int64_t t = 1; t <= inst.horizon; ++t) {
      const int arm = schedule.select_arm(t);
      const FeedbackBatch batch = env.step(arm);
      if (windowed) {
        stats.record_pull(arm);
      } else {
        stats.record_pull(arm, decay);
      }
      for (const Disclosure& d : batch.disclosures) stats.record_disclosure(d.arm);

      while (next_check < n_check && checkpoints[next_check] == t) {
        if (windowed) {
          stats.effective_counts_windowed(weight_by_age, tail_weight, eff);
        } else {
          for (int k = 0; k < arms; ++k) {
            eff[static_cast<std::size_t>(k)] = stats.effective_count_geometric(k);
          }
        }
        for (int k = 0; k < arms; ++k) {
          const auto ks = static_cast<std::size_t>(k);
          const double estimate = static_cast<double>(stats.conversion_count(k)) / eff[ks];
          sum[next_check][ks] += estimate;
          sum_sq[next_check][ks] += estimate * estimate;
        }
        ++next_check;
      }
    }
  }

  UnbiasednessReport report;
  report.theta = inst.theta;
  report.checkpoints = checkpoints;
  report.pass = true;
  const auto reps = static_cast<double>(options.replications);
  for (std::size_t c = 0; c < n_check; ++c) {
    std::vector<double> means, ses;
    for (int k = 0; k < arms; ++k) {
      const auto ks = static_cast<std::size_t>(k);
      const double mean = sum[c][ks] / reps;
      const double var = std::max(0.0, (sum_sq[c][ks] - reps * mean * mean) / (reps - 1.0));
      const double se = std::sqrt(var / reps);
      means.push_back(mean);
      ses.push_back(se);
      if (std::abs(mean - inst.theta[ks]) >= 3.0 * se) report.pass = false;
    }
    report.mean_estimate.push_back(std::move(means));
    report.standard_error.push_back(std::move(ses));
  }
  return report;
}

std::string UnbiasednessReport::detail() const {
  std::ostringstream os;
  for (std::size_t c = 0; c < checkpoints.size(); ++c) {
    if (c) os << " | ";
    os << "t=" << checkpoints[c] << ":";
    for (std::size_t k = 0; k < theta.size(); ++k) {
      os << " arm" << k << " " << mean_estimate[c][k] << " vs " << theta[k] << " (se "
         << standard_error[c][k] << ")";
    }
  }
  return os.str();
}

}  // namespace convbandit
