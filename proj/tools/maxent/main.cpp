#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "maxent/experiment.hpp"

namespace {

using maxent::cli::ExperimentConfig;

struct CommonFlags {
  std::string config_path;
  std::string method;
  int T = 0;
  int alphabet = 0;
  std::uint64_t seed = 0;
  std::string strategy;
  double tolerance = 0.0;
  int max_iters = 0;
  std::string out;
  std::string format;
  std::string source;
  std::string source_path;
  int markov_order = 1;
};

void add_common(CLI::App* app, CommonFlags& flags) {
  app->add_option("--config", flags.config_path, "JSON config file");
  app->add_option("--method", flags.method, "mep_t | gmep | smep | custom");
  app->add_option("--T", flags.T, "token horizon T");
  app->add_option("--alphabet", flags.alphabet, "symbols per variable");
  app->add_option("--seed", flags.seed, "seed for synthetic sources and sampling");
  app->add_option("--strategy", flags.strategy, "newton | multiplicative");
  app->add_option("--tolerance", flags.tolerance, "solver residual tolerance");
  app->add_option("--max-iters", flags.max_iters, "solver iteration budget");
  app->add_option("--out", flags.out, "output path (default stdout)");
  app->add_option("--format", flags.format, "json | csv");
}

void add_source(CLI::App* app, CommonFlags& flags) {
  app->add_option("--source", flags.source, "synthetic_random | synthetic_markov | file");
  app->add_option("--source-path", flags.source_path, "table or constraint-system JSON");
  app->add_option("--markov-order", flags.markov_order, "order for synthetic_markov");
}

void apply_source(const CLI::App* app, const CommonFlags& flags, ExperimentConfig& config) {
  if (app->count("--source")) {
    if (flags.source == "synthetic_random") {
      config.source.kind = maxent::cli::SourceSpec::Kind::kSyntheticRandom;
    } else if (flags.source == "synthetic_markov") {
      config.source.kind = maxent::cli::SourceSpec::Kind::kSyntheticMarkov;
    } else if (flags.source == "file") {
      config.source.kind = maxent::cli::SourceSpec::Kind::kFile;
    } else {
      throw maxent::ArgumentError("unknown source: " + flags.source);
    }
  }
  if (app->count("--source-path")) config.source.path = flags.source_path;
  if (app->count("--markov-order")) config.source.markov_order = flags.markov_order;
}

ExperimentConfig make_config(const CLI::App* app, const CommonFlags& flags) {
  ExperimentConfig config;
  if (!flags.config_path.empty()) config = maxent::cli::load_config(flags.config_path, config);
  if (app->count("--method")) config.method = flags.method;
  if (app->count("--T")) config.T = flags.T;
  if (app->count("--alphabet")) config.alphabet_size = flags.alphabet;
  if (app->count("--seed")) config.source.seed = flags.seed;
  if (app->count("--strategy")) config.solver.strategy = maxent::strategy_from_string(flags.strategy);
  if (app->count("--tolerance")) config.solver.residual_tolerance = flags.tolerance;
  if (app->count("--max-iters")) config.solver.max_iterations = flags.max_iters;
  if (app->count("--out")) config.output.path = flags.out;
  if (app->count("--format")) {
    config.output.format = flags.format == "csv" ? maxent::cli::OutputSpec::Format::kCsv
                                                 : maxent::cli::OutputSpec::Format::kJson;
  }
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"maximum-entropy joint reconstruction under marginal constraints"};
  app.require_subcommand(1);

  CommonFlags solve_flags, verify_flags, bench_flags, gen_flags, geo_flags;

  auto* solve_cmd = app.add_subcommand("solve", "build constraints, solve, write the result");
  add_common(solve_cmd, solve_flags);
  add_source(solve_cmd, solve_flags);

  auto* verify_cmd = app.add_subcommand("verify", "run the conditioning-inequality suite");
  add_common(verify_cmd, verify_flags);
  int verify_trials = 1000, verify_n = 3;
  std::string verify_source_path;
  verify_cmd->add_option("--trials", verify_trials, "random joints to test");
  verify_cmd->add_option("--N", verify_n, "variables per joint");
  verify_cmd->add_option("--source-path", verify_source_path, "verify one table JSON instead");

  auto* bench_cmd = app.add_subcommand("benchmark", "sweep T and I, emit scaling CSV");
  add_common(bench_cmd, bench_flags);
  add_source(bench_cmd, bench_flags);
  int bench_tmin = 1, bench_tmax = 3;
  std::vector<int> bench_alphabets;
  bench_cmd->add_option("--t-min", bench_tmin, "first T");
  bench_cmd->add_option("--t-max", bench_tmax, "last T");
  bench_cmd->add_option("--alphabets", bench_alphabets, "alphabet sizes to sweep")
      ->delimiter(',');

  auto* gen_cmd = app.add_subcommand("generate", "sample a sequence from a solved joint");
  add_common(gen_cmd, gen_flags);
  add_source(gen_cmd, gen_flags);
  std::string gen_in;
  int gen_length = 16;
  double gen_temperature = 1.0;
  gen_cmd->add_option("--in", gen_in, "solved-result JSON (otherwise solve the config)");
  gen_cmd->add_option("--length", gen_length, "sequence length");
  gen_cmd->add_option("--temperature", gen_temperature, "sampling temperature");

  auto* geo_cmd = app.add_subcommand("geometric", "closed-form model table as CSV");
  add_common(geo_cmd, geo_flags);
  std::vector<double> geo_grid;
  double geo_tail = 1e-12;
  geo_cmd->add_option("--mu-grid", geo_grid, "mean parameters")->delimiter(',');
  geo_cmd->add_option("--tail-tol", geo_tail, "numeric-entropy tail tolerance");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve_cmd->parsed()) {
      ExperimentConfig config = make_config(solve_cmd, solve_flags);
      apply_source(solve_cmd, solve_flags, config);
      return maxent::cli::cmd_solve(config);
    }
    if (verify_cmd->parsed()) {
      ExperimentConfig config = make_config(verify_cmd, verify_flags);
      if (verify_cmd->count("--trials")) config.trials = verify_trials;
      if (verify_cmd->count("--N")) config.n_vars = verify_n;
      if (verify_cmd->count("--source-path")) {
        config.source.kind = maxent::cli::SourceSpec::Kind::kFile;
        config.source.path = verify_source_path;
      }
      return maxent::cli::cmd_verify(config);
    }
    if (bench_cmd->parsed()) {
      ExperimentConfig config = make_config(bench_cmd, bench_flags);
      apply_source(bench_cmd, bench_flags, config);
      if (bench_cmd->count("--t-min")) config.t_min = bench_tmin;
      if (bench_cmd->count("--t-max")) config.t_max = bench_tmax;
      if (bench_cmd->count("--alphabets")) config.alphabet_sweep = bench_alphabets;
      if (config.output.format != maxent::cli::OutputSpec::Format::kCsv &&
          !bench_cmd->count("--format")) {
        config.output.format = maxent::cli::OutputSpec::Format::kCsv;
      }
      return maxent::cli::cmd_benchmark(config);
    }
    if (gen_cmd->parsed()) {
      ExperimentConfig config = make_config(gen_cmd, gen_flags);
      apply_source(gen_cmd, gen_flags, config);
      if (gen_cmd->count("--in")) config.result_path = gen_in;
      if (gen_cmd->count("--length")) config.length = gen_length;
      if (gen_cmd->count("--temperature")) config.temperature = gen_temperature;
      return maxent::cli::cmd_generate(config);
    }
    if (geo_cmd->parsed()) {
      ExperimentConfig config = make_config(geo_cmd, geo_flags);
      if (geo_cmd->count("--mu-grid")) config.mu_grid = geo_grid;
      if (geo_cmd->count("--tail-tol")) config.tail_tolerance = geo_tail;
      if (config.output.format != maxent::cli::OutputSpec::Format::kCsv &&
          !geo_cmd->count("--format")) {
        config.output.format = maxent::cli::OutputSpec::Format::kCsv;
      }
      return maxent::cli::cmd_geometric(config);
    }
  } catch (const maxent::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
