#include "convbandit/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "convbandit/rng.hpp"

namespace convbandit {

namespace {

PolicyConfig parse_policy_config(const nlohmann::json& j) {
  PolicyConfig cfg;
  bool have_variant = false;
  for (const auto& [key, value] : j.items()) {
    if (key == "policy") {
      cfg.variant = policy_variant_from_string(value.get<std::string>());
      have_variant = true;
    } else if (key == "epsilon") {
      cfg.epsilon = value.get<double>();
    } else if (key == "gamma") {
      cfg.gamma = value.get<double>();
    } else if (key == "setting") {
      const auto s = value.get<std::string>();
      if (s == "censored") {
        cfg.censored = true;
      } else if (s == "uncensored") {
        cfg.censored = false;
      } else {
        throw ConfigError("policy key 'setting' must be 'censored' or 'uncensored', got '" + s + "'");
      }
    } else if (key == "m") {
      cfg.censor_window = value.get<std::int64_t>();
    } else if (key == "label") {
      cfg.label = value.get<std::string>();
    } else {
      throw ConfigError("unknown policy key '" + key + "'");
    }
  }
  if (!have_variant) throw ConfigError("policy entry is missing the 'policy' key");
  cfg.validate();
  return cfg;
}

int resolve_threads(int threads, std::size_t tasks) {
  if (threads <= 0) {
    threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads <= 0) threads = 1;
  }
  return static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(threads), tasks));
}

}  // namespace

void ExperimentConfig::validate() const {
  instance.validate();
  if (policies.empty()) throw ConfigError("config key 'policies' must list at least one policy");
  for (const auto& p : policies) p.validate();
  if (replications < 1) throw ConfigError("config key 'replications' must be >= 1");
  if (checkpoint_stride < 0) throw ConfigError("config key 'checkpoint_stride' must be >= 1");
}

std::vector<std::int64_t> ExperimentConfig::checkpoints() const {
  std::int64_t stride = checkpoint_stride;
  if (stride == 0) stride = std::max<std::int64_t>(1, instance.horizon / 100);
  std::vector<std::int64_t> points;
  for (std::int64_t t = stride; t <= instance.horizon; t += stride) points.push_back(t);
  if (points.empty() || points.back() != instance.horizon) points.push_back(instance.horizon);
  return points;
}

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  ExperimentConfig cfg;
  bool have_instance = false;
  for (const auto& [key, value] : j.items()) {
    if (key == "instance") {
      cfg.instance = BanditInstance::from_json(value.dump());
      have_instance = true;
    } else if (key == "policies") {
      for (const auto& p : value) cfg.policies.push_back(parse_policy_config(p));
    } else if (key == "replications") {
      cfg.replications = value.get<std::int64_t>();
    } else if (key == "master_seed") {
      cfg.master_seed = value.get<std::uint64_t>();
    } else if (key == "checkpoint_stride") {
      cfg.checkpoint_stride = value.get<std::int64_t>();
    } else if (key == "out_dir") {
      cfg.out_dir = value.get<std::string>();
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  if (!have_instance) throw ConfigError("config is missing the 'instance' key");
  cfg.validate();
  return cfg;
}

ExperimentConfig ExperimentConfig::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

ExperimentResult run_experiment(const ExperimentConfig& config, int threads) {
  config.validate();
  const auto checkpoints = config.checkpoints();
  const auto num_policies = config.policies.size();
  const auto runs = static_cast<std::size_t>(config.replications);

  ExperimentResult result;
  result.checkpoints = checkpoints;
  std::vector<BanditInstance> effective;
  effective.reserve(num_policies);
  for (const auto& pc : config.policies) {
    effective.push_back(effective_instance(config.instance, pc));
    result.labels.push_back(policy_label(pc, effective.back()));
  }
  result.traces.assign(num_policies, std::vector<RegretTrace>(runs));

  const std::size_t tasks = num_policies * runs;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks) return;
      const std::size_t p = i / runs;
      const std::size_t r = i % runs;
      const std::uint64_t seed = child_seed(config.master_seed, p, r);
      auto policy = make_policy(config.policies[p], effective[p]);
      result.traces[p][r] = run_trace(effective[p], *policy, seed, checkpoints, result.labels[p]);
    }
  };

  const int workers = resolve_threads(threads, tasks);
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  // Aggregation consumes completed traces in canonical (policy, run) order,
  // so the numbers do not depend on scheduling.
  for (std::size_t p = 0; p < num_policies; ++p) {
    PolicyAggregate agg;
    agg.label = result.labels[p];
    agg.checkpoints = checkpoints;
    agg.runs = config.replications;
    agg.mean.resize(checkpoints.size());
    agg.sd.resize(checkpoints.size());
    agg.se.resize(checkpoints.size());
    for (std::size_t c = 0; c < checkpoints.size(); ++c) {
      double sum = 0.0;
      for (std::size_t r = 0; r < runs; ++r) {
        sum += result.traces[p][r].points[c].cum_pseudo_regret;
      }
      const double mean = sum / static_cast<double>(runs);
      double ss = 0.0;
      for (std::size_t r = 0; r < runs; ++r) {
        const double d = result.traces[p][r].points[c].cum_pseudo_regret - mean;
        ss += d * d;
      }
      const double sd = runs > 1 ? std::sqrt(ss / static_cast<double>(runs - 1)) : 0.0;
      agg.mean[c] = mean;
      agg.sd[c] = sd;
      agg.se[c] = sd / std::sqrt(static_cast<double>(runs));
    }
    result.aggregates.push_back(std::move(agg));
  }
  return result;
}

const PolicyAggregate& ExperimentResult::aggregate_for(const std::string& label) const {
  for (const auto& agg : aggregates) {
    if (agg.label == label) return agg;
  }
  throw std::invalid_argument("no aggregate for policy label '" + label + "'");
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string ExperimentResult::raw_csv() const {
  std::string out = "policy,run,checkpoint_t,cum_pseudo_regret,cum_reward\n";
  for (std::size_t p = 0; p < traces.size(); ++p) {
    for (std::size_t r = 0; r < traces[p].size(); ++r) {
      for (const TracePoint& pt : traces[p][r].points) {
        out += labels[p];
        out += ',';
        out += std::to_string(r);
        out += ',';
        out += std::to_string(pt.t);
        out += ',';
        out += format_double(pt.cum_pseudo_regret);
        out += ',';
        out += std::to_string(pt.cum_reward);
        out += '\n';
      }
    }
  }
  return out;
}

std::string ExperimentResult::aggregate_csv() const {
  std::string out = "policy,checkpoint_t,mean,sd,se,runs\n";
  for (const auto& agg : aggregates) {
    for (std::size_t c = 0; c < agg.checkpoints.size(); ++c) {
      out += agg.label;
      out += ',';
      out += std::to_string(agg.checkpoints[c]);
      out += ',';
      out += format_double(agg.mean[c]);
      out += ',';
      out += format_double(agg.sd[c]);
      out += ',';
      out += format_double(agg.se[c]);
      out += ',';
      out += std::to_string(agg.runs);
      out += '\n';
    }
  }
  return out;
}

void write_outputs(const ExperimentResult& result, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir + "': " + ec.message());
  auto write = [&](const std::string& name, const std::string& content) {
    const auto path = fs::path(dir) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write output file '" + path.string() + "'");
    out << content;
  };
  write("raw.csv", result.raw_csv());
  write("aggregate.csv", result.aggregate_csv());
}

std::vector<Series> aggregate_series(const ExperimentResult& result) {
  std::vector<Series> series;
  for (const auto& agg : result.aggregates) {
    Series s{agg.label, {}};
    for (std::size_t c = 0; c < agg.checkpoints.size(); ++c) {
      s.second.push_back(SeriesPoint{agg.checkpoints[c], agg.mean[c]});
    }
    series.push_back(std::move(s));
  }
  return series;
}

std::vector<Series> parse_aggregate_csv(const std::string& text) {
  std::vector<Series> series;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("aggregate csv is empty");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string label, t_str, mean_str;
    std::getline(row, label, ',');
    std::getline(row, t_str, ',');
    std::getline(row, mean_str, ',');
    if (label.empty() || t_str.empty() || mean_str.empty()) {
      throw ConfigError("malformed aggregate csv row: " + line);
    }
    if (series.empty() || series.back().first != label) {
      series.push_back(Series{label, {}});
    }
    series.back().second.push_back(SeriesPoint{std::stoll(t_str), std::stod(mean_str)});
  }
  return series;
}

std::string render_lines_svg(const std::vector<Series>& series, const std::string& title) {
  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                  "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};
  const double width = 720, height = 480;
  const double left = 70, right = 30, top = 40, bottom = 50;

  std::int64_t t_max = 1;
  double v_max = 0.0;
  for (const auto& [label, pts] : series) {
    for (const auto& pt : pts) {
      t_max = std::max(t_max, pt.t);
      v_max = std::max(v_max, pt.value);
    }
  }
  if (v_max <= 0.0) v_max = 1.0;

  auto x_of = [&](double t) { return left + (width - left - right) * t / static_cast<double>(t_max); };
  auto y_of = [&](double v) { return height - bottom - (height - top - bottom) * v / v_max; };

  std::ostringstream svg;
  svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='" << height
      << "' viewBox='0 0 " << width << " " << height << "'>\n";
  svg << "<rect width='100%' height='100%' fill='white'/>\n";
  svg << "<text x='" << width / 2 << "' y='24' text-anchor='middle' font-size='16'>" << title
      << "</text>\n";
  svg << "<line x1='" << left << "' y1='" << height - bottom << "' x2='" << width - right
      << "' y2='" << height - bottom << "' stroke='black'/>\n";
  svg << "<line x1='" << left << "' y1='" << top << "' x2='" << left << "' y2='"
      << height - bottom << "' stroke='black'/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double frac = i / 4.0;
    const double x = left + (width - left - right) * frac;
    const double y = height - bottom - (height - top - bottom) * frac;
    svg << "<text x='" << x << "' y='" << height - bottom + 18
        << "' text-anchor='middle' font-size='11'>"
        << static_cast<std::int64_t>(frac * static_cast<double>(t_max)) << "</text>\n";
    svg << "<text x='" << left - 8 << "' y='" << y + 4 << "' text-anchor='end' font-size='11'>"
        << format_double(std::round(frac * v_max * 100.0) / 100.0) << "</text>\n";
  }
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& [label, pts] = series[i];
    const char* color = kColors[i % (sizeof(kColors) / sizeof(kColors[0]))];
    svg << "<polyline fill='none' stroke='" << color << "' stroke-width='1.6' points='";
    for (const auto& pt : pts) {
      svg << x_of(static_cast<double>(pt.t)) << "," << y_of(pt.value) << " ";
    }
    svg << "'/>\n";
    const double ly = top + 16.0 * static_cast<double>(i);
    svg << "<line x1='" << width - right - 130 << "' y1='" << ly << "' x2='"
        << width - right - 105 << "' y2='" << ly << "' stroke='" << color
        << "' stroke-width='2'/>\n";
    svg << "<text x='" << width - right - 100 << "' y='" << ly + 4 << "' font-size='12'>" << label
        << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace convbandit
