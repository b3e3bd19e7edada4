// Command-line front end: experiment runner, bound calculator, diagnostic
// suites, and a small SVG plotter for aggregate files.

#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "convbandit/bounds.hpp"
#include "convbandit/diagnostics.hpp"
#include "convbandit/harness.hpp"

namespace {

using namespace convbandit;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

BanditInstance instance_from_config_file(const std::string& path) {
  const auto text = read_file(path);
  const auto j = nlohmann::json::parse(text);
  if (j.contains("instance")) {
    return BanditInstance::from_json(j.at("instance").dump());
  }
  return BanditInstance::from_json(text);
}

int cmd_run(const std::string& config_path, std::optional<std::uint64_t> seed,
            std::optional<std::string> out_dir, int threads, bool svg) {
  ExperimentConfig config = ExperimentConfig::load_file(config_path);
  if (seed) config.master_seed = *seed;
  if (out_dir) config.out_dir = *out_dir;
  if (config.out_dir.empty()) config.out_dir = "out";

  const ExperimentResult result = run_experiment(config, threads);
  write_outputs(result, config.out_dir);
  if (svg) {
    const auto path = std::filesystem::path(config.out_dir) / "regret.svg";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    out << render_lines_svg(aggregate_series(result), "mean cumulative pseudo-regret");
  }

  std::cout << "wrote " << config.out_dir << "/raw.csv and " << config.out_dir
            << "/aggregate.csv" << (svg ? " and regret.svg" : "") << "\n";
  for (const auto& agg : result.aggregates) {
    const std::size_t last = agg.checkpoints.size() - 1;
    std::cout << "  " << agg.label << ": final regret " << format_double(agg.mean[last])
              << " +/- " << format_double(agg.se[last]) << " (se, " << agg.runs << " runs)\n";
  }
  return 0;
}

int cmd_bounds(const std::string& config_path, double epsilon, double eta) {
  const BanditInstance inst = instance_from_config_file(config_path);
  const double tau_m = inst.censored() ? inst.delays.cdf(*inst.censor_window) : 1.0;
  const BoundReport report = upper_bound_constants(inst.theta, tau_m, epsilon, eta);
  std::cout << report.to_json() << "\n";
  return 0;
}

int cmd_diagnose(const std::string& suite, const std::string& config_path, double step,
                 int instances, int configs, std::int64_t length, int points, double beta,
                 std::int64_t t, int reps, std::uint64_t seed, int threads) {
  auto finish = [](const std::string& name, bool pass, const std::string& detail) {
    std::cout << name << ": " << (pass ? "PASS" : "FAIL") << " -- " << detail << "\n";
    return pass ? 0 : 1;
  };

  if (suite == "sandwich") {
    const auto r = check_divergence_sandwich(step);
    return finish("divergence-sandwich", r.pass, r.detail);
  }
  if (suite == "bound-monotonicity") {
    const auto r = check_bound_monotonicity(instances, seed);
    return finish("bound-monotonicity", r.pass, r.detail);
  }
  if (suite == "estimator-oracle") {
    OracleEquivalenceOptions opt;
    opt.configs = configs;
    opt.length = length;
    opt.seed = seed;
    opt.threads = threads;
    const auto r = check_estimator_oracle(opt);
    return finish("estimator-oracle", r.pass, r.detail);
  }
  if (suite == "kl-inversion") {
    const auto r = check_kl_inversion(points, seed);
    return finish("kl-inversion", r.pass, r.detail);
  }
  if (suite == "concentration") {
    ConcentrationOptions opt;
    if (!config_path.empty()) {
      opt.instance = instance_from_config_file(config_path);
    } else {
      opt.instance.theta = {0.5, 0.25};
      opt.instance.delays = DelayDistribution::geometric(10.0);
      opt.instance.horizon = t;
    }
    opt.t = t;
    opt.replications = reps;
    opt.seed = seed;
    int rc = 0;
    for (double b : {3.0, beta}) {
      opt.beta = b;
      const auto r = check_concentration(opt);
      rc |= finish("concentration(beta=" + format_double(b) + ")", r.pass, r.detail());
    }
    return rc;
  }
  if (suite == "unbiasedness") {
    UnbiasednessOptions opt;
    if (!config_path.empty()) {
      opt.instance = instance_from_config_file(config_path);
    } else {
      opt.instance.theta = {0.3, 0.1};
      opt.instance.delays = DelayDistribution::geometric(50.0);
      opt.instance.horizon = 2000;
    }
    opt.replications = reps;
    opt.seed = seed;
    const auto r = check_unbiasedness(opt);
    return finish("unbiasedness", r.pass, r.detail());
  }
  std::cerr << "unknown diagnostic suite '" << suite
            << "' (expected sandwich | bound-monotonicity | estimator-oracle | kl-inversion | "
               "concentration | unbiasedness)\n";
  return 1;
}

int cmd_plot(const std::string& aggregate_path, const std::string& svg_path,
             const std::string& title) {
  const auto series = parse_aggregate_csv(read_file(aggregate_path));
  std::ofstream out(svg_path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + svg_path + "'");
  out << render_lines_svg(series, title);
  std::cout << "wrote " << svg_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic bandit simulator with delayed, censored conversions"};
  app.require_subcommand(1);

  // run
  std::string run_config;
  std::optional<std::uint64_t> run_seed;
  std::optional<std::string> run_out;
  int run_threads = 0;
  bool run_svg = false;
  auto* run = app.add_subcommand("run", "Run a configured experiment and write CSV outputs");
  run->add_option("--config", run_config, "Experiment config (JSON)")->required();
  run->add_option("--seed", run_seed, "Master seed override");
  run->add_option("--out", run_out, "Output directory override");
  run->add_option("--threads", run_threads, "Worker threads (0 = hardware)");
  run->add_flag("--svg", run_svg, "Also render regret.svg");

  // bounds
  std::string bounds_config;
  double bounds_epsilon = 0.1, bounds_eta = 0.1;
  auto* bounds = app.add_subcommand("bounds", "Print the instance's regret-bound constants as JSON");
  bounds->add_option("--config", bounds_config, "Experiment config or bare instance (JSON)")->required();
  bounds->add_option("--epsilon", bounds_epsilon, "Exploration inflation for the UCB constant");
  bounds->add_option("--eta", bounds_eta, "Slack factor for the KL-UCB constant");

  // diagnose
  std::string diag_suite, diag_config;
  double diag_step = 0.001, diag_beta = 5.0;
  int diag_instances = 100, diag_configs = 1000, diag_points = 1000, diag_reps = 10000,
      diag_threads = 0;
  std::int64_t diag_length = 2000, diag_t = 1000;
  std::uint64_t diag_seed = 1;
  auto* diag = app.add_subcommand("diagnose", "Run a statistical / numerical diagnostic suite");
  diag->add_option("suite", diag_suite,
                   "sandwich | bound-monotonicity | estimator-oracle | kl-inversion | "
                   "concentration | unbiasedness")
      ->required();
  diag->add_option("--config", diag_config, "Instance for concentration/unbiasedness");
  diag->add_option("--step", diag_step, "Grid step for the sandwich check");
  diag->add_option("--instances", diag_instances, "Random instances for bound monotonicity");
  diag->add_option("--configs", diag_configs, "Random configurations for the estimator oracle");
  diag->add_option("--length", diag_length, "Sequence length for the estimator oracle");
  diag->add_option("--points", diag_points, "Grid points for the KL inversion check");
  diag->add_option("--beta", diag_beta, "Confidence budget for the concentration check");
  diag->add_option("--t", diag_t, "Decision round for the concentration check");
  diag->add_option("--reps", diag_reps, "Monte-Carlo replications");
  diag->add_option("--seed", diag_seed, "Seed");
  diag->add_option("--threads", diag_threads, "Worker threads (0 = hardware)");

  // plot
  std::string plot_aggregate, plot_svg = "regret.svg", plot_title = "mean cumulative pseudo-regret";
  auto* plot = app.add_subcommand("plot", "Render an aggregate CSV as an SVG line chart");
  plot->add_option("--aggregate", plot_aggregate, "aggregate.csv produced by `run`")->required();
  plot->add_option("--svg", plot_svg, "Output SVG path");
  plot->add_option("--title", plot_title, "Chart title");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(run_config, run_seed, run_out, run_threads, run_svg);
    if (bounds->parsed()) return cmd_bounds(bounds_config, bounds_epsilon, bounds_eta);
    if (diag->parsed()) {
      return cmd_diagnose(diag_suite, diag_config, diag_step, diag_instances, diag_configs,
                          diag_length, diag_points, diag_beta, diag_t, diag_reps, diag_seed,
                          diag_threads);
    }
    if (plot->parsed()) return cmd_plot(plot_aggregate, plot_svg, plot_title);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
