#include "convbandit/bounds.hpp"

#include <algorithm>
#include <stdexcept>

#include "json.hpp"

#include "convbandit/divergence.hpp"

namespace convbandit {

namespace {

int unique_best_arm(std::span<const double> theta) {
  if (theta.size() < 2) throw std::invalid_argument("bounds: need at least two arms");
  int best = 0;
  for (int k = 1; k < static_cast<int>(theta.size()); ++k) {
    if (theta[static_cast<std::size_t>(k)] > theta[static_cast<std::size_t>(best)]) best = k;
  }
  for (int k = 0; k < static_cast<int>(theta.size()); ++k) {
    if (k != best && theta[static_cast<std::size_t>(k)] == theta[static_cast<std::size_t>(best)]) {
      throw std::invalid_argument("bounds: the best arm must be unique");
    }
  }
  return best;
}

}  // namespace

BoundReport lower_bound_censored(std::span<const double> theta, double tau_m) {
  if (!(tau_m > 0.0 && tau_m <= 1.0)) {
    throw std::invalid_argument("bounds: tau_m must lie in (0, 1]");
  }
  const int best = unique_best_arm(theta);
  const double star = theta[static_cast<std::size_t>(best)];

  BoundReport report;
  report.setting = tau_m == 1.0 ? "uncensored" : "censored";
  report.tau_m = tau_m;
  report.lower_per_arm.assign(theta.size(), 0.0);
  for (std::size_t k = 0; k < theta.size(); ++k) {
    if (static_cast<int>(k) == best) continue;
    const double gap = star - theta[k];
    report.lower_per_arm[k] = tau_m * gap / bernoulli_kl(tau_m * theta[k], tau_m * star);
    report.lower_bound += report.lower_per_arm[k];
  }
  return report;
}

BoundReport lower_bound_uncensored(std::span<const double> theta) {
  return lower_bound_censored(theta, 1.0);
}

BoundReport upper_bound_constants(std::span<const double> theta, double tau_m, double epsilon,
                                  double eta) {
  if (!(epsilon > 0.0) || !(eta > 0.0)) {
    throw std::invalid_argument("bounds: epsilon and eta must be positive");
  }
  BoundReport report = lower_bound_censored(theta, tau_m);
  const int best = unique_best_arm(theta);
  const double star = theta[static_cast<std::size_t>(best)];

  BoundReport::UpperConstants upper;
  upper.epsilon = epsilon;
  upper.eta = eta;
  upper.ucb_per_arm.assign(theta.size(), 0.0);
  upper.klucb_per_arm.assign(theta.size(), 0.0);
  double klucb_alt = 0.0;
  for (std::size_t k = 0; k < theta.size(); ++k) {
    if (static_cast<int>(k) == best) continue;
    const double gap = star - theta[k];
    const double div = bernoulli_kl(tau_m * theta[k], tau_m * star);
    upper.ucb_per_arm[k] = (1.0 + epsilon) / (2.0 * tau_m * gap);
    upper.klucb_per_arm[k] = (1.0 + eta) * tau_m * gap / ((1.0 - tau_m * star) * div);
    klucb_alt += (1.0 + eta) * tau_m * gap / ((1.0 - star) * div);
    upper.ucb += upper.ucb_per_arm[k];
    upper.klucb += upper.klucb_per_arm[k];
  }
  upper.klucb_alt = klucb_alt;
  report.upper = std::move(upper);
  return report;
}

std::string BoundReport::to_json() const {
  nlohmann::json j;
  j["setting"] = setting;
  j["tau_m"] = tau_m;
  j["lower_bound"] = {{"total", lower_bound}, {"per_arm", lower_per_arm}};
  if (upper) {
    j["upper_constants"] = {
        {"epsilon", upper->epsilon},
        {"eta", upper->eta},
        {"ucb", upper->ucb},
        {"klucb", upper->klucb},
        {"klucb_alt", upper->klucb_alt},
        {"ucb_per_arm", upper->ucb_per_arm},
        {"klucb_per_arm", upper->klucb_per_arm},
    };
  }
  return j.dump(2);
}

}  // namespace convbandit
