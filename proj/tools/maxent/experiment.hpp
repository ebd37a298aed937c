#pragma once

// Experiment runner behind the maxent CLI: builds problems from config,
// runs solves, verification sweeps, scaling benchmarks, sequence generation
// and the geometric-model table. Exit codes: 0 success, 1 error, 2
// non-convergence.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "maxent/solver.hpp"

namespace maxent::cli {

struct SourceSpec {
  enum class Kind { kSyntheticRandom, kSyntheticMarkov, kFile };
  Kind kind = Kind::kSyntheticRandom;
  std::uint64_t seed = 0;
  int markov_order = 1;
  std::string path;
};

struct OutputSpec {
  enum class Format { kJson, kCsv };
  std::string path;  // empty -> stdout
  Format format = Format::kJson;
};

struct ExperimentConfig {
  std::string method = "mep_t";
  int T = 1;
  int alphabet_size = 2;
  SourceSpec source;
  SolverConfig solver;
  OutputSpec output;
  // refuse problems whose full table exceeds this many entries
  std::uint64_t budget_entries = std::uint64_t{1} << 26;

  // verify
  int trials = 1000;
  int n_vars = 3;

  // benchmark
  int t_min = 1;
  int t_max = 3;
  std::vector<int> alphabet_sweep;  // empty -> {alphabet_size}

  // generate
  std::string result_path;  // solved-result JSON input; empty -> solve config
  int length = 16;
  double temperature = 1.0;

  // geometric
  std::vector<double> mu_grid;  // empty -> default grid
  double tail_tolerance = 1e-12;
};

// Load config JSON from `path` over the given defaults.
ExperimentConfig load_config(const std::string& path, ExperimentConfig base = {});

int cmd_solve(const ExperimentConfig& config);
int cmd_verify(const ExperimentConfig& config);
int cmd_benchmark(const ExperimentConfig& config);
int cmd_generate(const ExperimentConfig& config);
int cmd_geometric(const ExperimentConfig& config);

// Constraint targets marginalized from a synthetic truth joint for the
// configured method; exposed for tests and reuse.
ConstraintSystem build_system_from_truth(const std::string& method, int T, const JointTable& truth);

// The method's full variable set: (1..2T+1) for mep_t, (1..T) for gmep,
// (-T..T) for smep.
std::vector<int> method_full_vars(const std::string& method, int T);

}  // namespace maxent::cli
