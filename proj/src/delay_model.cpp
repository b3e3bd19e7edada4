#include "convbandit/delay_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace convbandit {

DelayDistribution DelayDistribution::geometric(double mean) {
  if (!(mean > 0.0) || !std::isfinite(mean)) {
    throw std::invalid_argument("DelayDistribution::geometric: mean must be positive and finite");
  }
  DelayDistribution d;
  d.kind_ = Kind::kGeometric;
  d.mean_ = mean;
  d.decay_ = mean / (1.0 + mean);
  d.log_decay_ = std::log(d.decay_);
  return d;
}

DelayDistribution DelayDistribution::tabulated(std::vector<double> cdf, double tail_survival) {
  if (cdf.empty()) {
    throw std::invalid_argument("DelayDistribution::tabulated: cdf table must be nonempty");
  }
  if (!(tail_survival >= 0.0 && tail_survival <= 1.0)) {
    throw std::invalid_argument("DelayDistribution::tabulated: tail_survival must lie in [0, 1]");
  }
  double prev = 0.0;
  for (double v : cdf) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw std::invalid_argument("DelayDistribution::tabulated: cdf entries must lie in [0, 1]");
    }
    if (v < prev) {
      throw std::invalid_argument("DelayDistribution::tabulated: cdf must be nondecreasing");
    }
    prev = v;
  }
  if (cdf.back() > 1.0 - tail_survival + 1e-15) {
    throw std::invalid_argument(
        "DelayDistribution::tabulated: cdf exceeds the mass left by tail_survival");
  }
  DelayDistribution d;
  d.kind_ = Kind::kTabulated;
  d.cdf_table_ = std::move(cdf);
  d.tail_survival_ = tail_survival;
  return d;
}

DelayDistribution DelayDistribution::point_mass(std::int64_t at) {
  if (at < 0) throw std::invalid_argument("DelayDistribution::point_mass: delay must be >= 0");
  std::vector<double> cdf(static_cast<std::size_t>(at) + 1, 0.0);
  cdf.back() = 1.0;
  return tabulated(std::move(cdf));
}

DelayDistribution DelayDistribution::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  if (j.contains("geometric")) {
    return geometric(j.at("geometric").at("mean").get<double>());
  }
  if (j.contains("tabulated")) {
    const auto& t = j.at("tabulated");
    double tail = t.contains("tail_survival") ? t.at("tail_survival").get<double>() : 0.0;
    return tabulated(t.at("cdf").get<std::vector<double>>(), tail);
  }
  throw std::invalid_argument("DelayDistribution::from_json: expected 'geometric' or 'tabulated'");
}

double DelayDistribution::cdf(std::int64_t d) const {
  if (d < 0) return 0.0;
  if (kind_ == Kind::kGeometric) {
    return 1.0 - std::pow(decay_, static_cast<double>(d) + 1.0);
  }
  const auto n = static_cast<std::int64_t>(cdf_table_.size());
  if (d < n) return cdf_table_[static_cast<std::size_t>(d)];
  return 1.0 - tail_survival_;
}

double DelayDistribution::mean() const {
  if (kind_ == Kind::kGeometric) return mean_;
  if (tail_survival_ > 0.0) {
    throw std::domain_error("DelayDistribution::mean: positive tail survival, mean is infinite");
  }
  double m = 0.0;
  for (double v : cdf_table_) m += 1.0 - v;
  return m;
}

std::int64_t DelayDistribution::sample(Rng& rng) const {
  const double u = rng.next_unit();  // [0, 1)
  if (kind_ == Kind::kGeometric) {
    // Smallest d with u < 1 - rho^(d+1), i.e. floor(log(1-u) / log(rho)).
    return static_cast<std::int64_t>(std::floor(std::log1p(-u) / log_decay_));
  }
  // Smallest d with cdf(d) > u.
  const auto it = std::upper_bound(cdf_table_.begin(), cdf_table_.end(), u);
  if (it != cdf_table_.end()) {
    return static_cast<std::int64_t>(it - cdf_table_.begin());
  }
  if (u < 1.0 - tail_survival_) {
    return static_cast<std::int64_t>(cdf_table_.size());
  }
  return kNever;
}

double DelayDistribution::geometric_decay() const {
  if (kind_ != Kind::kGeometric) {
    throw std::logic_error("DelayDistribution::geometric_decay: not a geometric distribution");
  }
  return decay_;
}

std::int64_t DelayDistribution::table_length() const {
  if (kind_ != Kind::kTabulated) {
    throw std::logic_error("DelayDistribution::table_length: not a tabulated distribution");
  }
  return static_cast<std::int64_t>(cdf_table_.size());
}

std::string DelayDistribution::describe() const {
  std::ostringstream os;
  if (kind_ == Kind::kGeometric) {
    os << "geometric(" << mean_ << ")";
  } else {
    os << "tabulated(" << cdf_table_.size() << " entries";
    if (tail_survival_ > 0.0) os << ", tail " << tail_survival_;
    os << ")";
  }
  return os.str();
}

}  // namespace convbandit
