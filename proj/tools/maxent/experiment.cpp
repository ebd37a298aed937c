#include "maxent/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <random>
#include <sstream>

#include "json.hpp"
#include "maxent/chain.hpp"
#include "maxent/geometric.hpp"
#include "maxent/inequalities.hpp"
#include "maxent/serialization.hpp"
#include "maxent/synthetic.hpp"

namespace maxent::cli {

namespace {

using nlohmann::json;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void emit(const OutputSpec& output, const std::string& text) {
  if (output.path.empty()) {
    std::cout << text << "\n";
  } else {
    write_file(output.path, text);
  }
}

std::uint64_t full_table_entries(const std::string& method, int T, int I) {
  const std::size_t n_vars = method == "gmep" ? static_cast<std::size_t>(T)
                                              : static_cast<std::size_t>(2 * T + 1);
  return detail::pow_size(I, n_vars);
}

JointTable synthetic_truth(const ExperimentConfig& config) {
  const std::vector<int> vars = method_full_vars(config.method, config.T);
  const Alphabet alphabet(config.alphabet_size);
  switch (config.source.kind) {
    case SourceSpec::Kind::kSyntheticRandom:
      return random_joint(vars, alphabet, config.source.seed);
    case SourceSpec::Kind::kSyntheticMarkov:
      return random_markov_joint(vars, alphabet, config.source.markov_order, config.source.seed);
    case SourceSpec::Kind::kFile:
      return table_from_json(read_file(config.source.path));
  }
  throw ArgumentError("unknown source kind");
}

OutputSpec::Format format_from_string(const std::string& name) {
  if (name == "json") return OutputSpec::Format::kJson;
  if (name == "csv") return OutputSpec::Format::kCsv;
  throw ArgumentError("unknown output format: " + name);
}

}  // namespace

std::vector<int> method_full_vars(const std::string& method, int T) {
  std::vector<int> vars;
  if (method == "gmep") {
    for (int v = 1; v <= T; ++v) vars.push_back(v);
  } else if (method == "smep") {
    for (int v = -T; v <= T; ++v) vars.push_back(v);
  } else if (method == "mep_t" || method == "custom") {
    for (int v = 1; v <= 2 * T + 1; ++v) vars.push_back(v);
  } else {
    throw ArgumentError("unknown method: " + method);
  }
  return vars;
}

ConstraintSystem build_system_from_truth(const std::string& method, int T,
                                         const JointTable& truth) {
  auto marginal_of = [&truth](std::vector<int> vars) {
    JointTable m = truth.marginal(vars).permuted(vars);
    return MarginalConstraint(std::move(vars), std::move(m));
  };

  if (method == "mep_t") {
    std::vector<int> v_1g1{1}, v_1g2{1}, v_2g2{2};
    for (int v = 2; v <= T + 1; ++v) v_1g1.push_back(v);
    for (int v = T + 2; v <= 2 * T + 1; ++v) {
      v_1g2.push_back(v);
      v_2g2.push_back(v);
    }
    return build_mep_t(T, marginal_of(v_1g1), marginal_of(v_1g2), marginal_of(v_2g2));
  }
  if (method == "gmep") {
    std::vector<MarginalConstraint> pairs;
    for (int t = 1; t <= T; ++t) {
      for (int u = t + 1; u <= T; ++u) pairs.push_back(marginal_of({t, u}));
    }
    return build_gmep(T, std::move(pairs));
  }
  if (method == "smep") {
    std::vector<MarginalConstraint> ms;
    for (int g = T; g >= 1; --g) {
      std::vector<int> v{-g};
      for (int t = 1; t <= T; ++t) v.push_back(t);
      std::sort(v.begin(), v.end());
      ms.push_back(marginal_of(v));
    }
    {
      std::vector<int> v{0};
      for (int t = 1; t <= T; ++t) v.push_back(t);
      ms.push_back(marginal_of(v));
    }
    {
      std::vector<int> v;
      for (int t = T; t >= 1; --t) v.push_back(-t);
      v.push_back(0);
      ms.push_back(marginal_of(v));
    }
    for (int g = 1; g <= T; ++g) {
      std::vector<int> v;
      for (int t = T; t >= 1; --t) v.push_back(-t);
      v.push_back(g);
      ms.push_back(marginal_of(v));
    }
    return build_smep(T, std::move(ms));
  }
  throw ArgumentError("cannot build synthetic constraints for method: " + method);
}

ExperimentConfig load_config(const std::string& path, ExperimentConfig base) {
  const json j = json::parse(read_file(path), nullptr, false);
  if (j.is_discarded()) throw IoError("invalid config JSON: " + path);

  if (j.contains("method")) base.method = j["method"].get<std::string>();
  if (j.contains("T")) base.T = j["T"].get<int>();
  if (j.contains("alphabet_size")) base.alphabet_size = j["alphabet_size"].get<int>();
  if (j.contains("budget_entries")) base.budget_entries = j["budget_entries"].get<std::uint64_t>();
  if (j.contains("trials")) base.trials = j["trials"].get<int>();
  if (j.contains("n_vars")) base.n_vars = j["n_vars"].get<int>();
  if (j.contains("t_min")) base.t_min = j["t_min"].get<int>();
  if (j.contains("t_max")) base.t_max = j["t_max"].get<int>();
  if (j.contains("alphabet_sweep")) {
    base.alphabet_sweep.clear();
    for (const auto& v : j["alphabet_sweep"]) base.alphabet_sweep.push_back(v.get<int>());
  }
  if (j.contains("result_path")) base.result_path = j["result_path"].get<std::string>();
  if (j.contains("length")) base.length = j["length"].get<int>();
  if (j.contains("temperature")) base.temperature = j["temperature"].get<double>();
  if (j.contains("mu_grid")) {
    base.mu_grid.clear();
    for (const auto& v : j["mu_grid"]) base.mu_grid.push_back(v.get<double>());
  }
  if (j.contains("tail_tolerance")) base.tail_tolerance = j["tail_tolerance"].get<double>();

  if (j.contains("source")) {
    const auto& s = j["source"];
    const std::string kind = s.value("kind", "synthetic_random");
    if (kind == "synthetic_random") {
      base.source.kind = SourceSpec::Kind::kSyntheticRandom;
    } else if (kind == "synthetic_markov") {
      base.source.kind = SourceSpec::Kind::kSyntheticMarkov;
    } else if (kind == "file") {
      base.source.kind = SourceSpec::Kind::kFile;
    } else {
      throw ArgumentError("unknown source kind: " + kind);
    }
    base.source.seed = s.value("seed", std::uint64_t{0});
    base.source.markov_order = s.value("order", 1);
    base.source.path = s.value("path", std::string{});
  }
  if (j.contains("solver")) {
    const auto& s = j["solver"];
    if (s.contains("strategy")) {
      base.solver.strategy = strategy_from_string(s["strategy"].get<std::string>());
    }
    if (s.contains("max_iterations")) base.solver.max_iterations = s["max_iterations"].get<int>();
    if (s.contains("residual_tolerance")) {
      base.solver.residual_tolerance = s["residual_tolerance"].get<double>();
    }
    if (s.contains("damping")) base.solver.damping = s["damping"].get<double>();
    if (s.contains("seed")) base.solver.seed = s["seed"].get<std::uint64_t>();
  }
  if (j.contains("output")) {
    const auto& o = j["output"];
    base.output.path = o.value("path", std::string{});
    base.output.format = format_from_string(o.value("format", "json"));
  }
  return base;
}

int cmd_solve(const ExperimentConfig& config) {
  try {
    std::optional<ConstraintSystem> system;
    if (config.source.kind == SourceSpec::Kind::kFile && config.method == "custom") {
      system = system_from_json(read_file(config.source.path));
      const std::uint64_t entries =
          detail::pow_size(system->alphabet().size(), system->full_vars().size());
      if (entries > config.budget_entries) {
        std::cerr << "refusing: " << entries << " table entries exceed budget "
                  << config.budget_entries << "\n";
        return 1;
      }
    } else {
      const std::uint64_t entries =
          full_table_entries(config.method, config.T, config.alphabet_size);
      if (entries > config.budget_entries) {
        std::cerr << "refusing: " << entries << " table entries exceed budget "
                  << config.budget_entries << "\n";
        return 1;
      }
      system = build_system_from_truth(config.method, config.T, synthetic_truth(config));
    }

    const ConsistencyReport report = check_consistency(*system);
    if (!report.consistent()) {
      std::cerr << "inconsistent constraints: " << report.summary() << "\n";
      return 1;
    }
    const ReductionPlan plan = reduce_redundancy(*system);
    const SolveResult result = solve(*system, plan, config.solver);
    for (const auto& warning : result.warnings) std::cerr << "warning: " << warning << "\n";

    if (config.output.format == OutputSpec::Format::kJson) {
      emit(config.output, to_json(result));
    } else {
      std::string csv = "key,value\n";
      csv += "converged," + std::string(result.converged ? "1" : "0") + "\n";
      csv += "iterations," + std::to_string(result.iterations) + "\n";
      csv += "entropy," + fmt(result.entropy) + "\n";
      csv += "max_residual," + fmt(result.max_residual) + "\n";
      csv += "wall_time_ms," + fmt(result.wall_time_ms) + "\n";
      for (std::size_t c = 0; c < result.constraint_residuals.size(); ++c) {
        csv += "residual_" + std::to_string(c) + "," + fmt(result.constraint_residuals[c]) + "\n";
      }
      emit(config.output, csv);
    }
    return result.converged ? 0 : 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_verify(const ExperimentConfig& config) {
  try {
    if (config.n_vars < 3) {
      std::cerr << "usage error: verify needs at least 3 variables (got " << config.n_vars
                << ")\n";
      return 1;
    }
    std::size_t pairwise_violations = 0, nested_violations = 0, entropy_violations = 0;
    std::size_t skipped = 0;
    double worst_margin = std::numeric_limits<double>::infinity();
    int trials_run = 0;

    auto run_one = [&](const JointTable& joint) {
      const auto& vars = joint.vars();
      const int target = vars.back();

      const SpreadReport pairwise = verify_pairwise_spread(joint);
      pairwise_violations += pairwise.violations.size();
      skipped += pairwise.skipped_contexts;

      std::vector<std::vector<int>> nesting;
      std::vector<int> context;
      for (std::size_t k = vars.size() - 1; k-- > 0;) {
        context.push_back(vars[k]);
        nesting.push_back(context);
      }
      const SpreadReport nested = verify_nested_spread(joint, target, nesting);
      nested_violations += nested.violations.size();
      skipped += nested.skipped_contexts;

      const EntropyChainReport chain = verify_entropy_chain(joint, target);
      entropy_violations += chain.violations.size();

      for (std::size_t k = 0; k + 1 < nested.min_by_level.size(); ++k) {
        worst_margin = std::min(worst_margin, nested.min_by_level[k] - nested.min_by_level[k + 1]);
        worst_margin = std::min(worst_margin, nested.max_by_level[k + 1] - nested.max_by_level[k]);
      }
      for (std::size_t k = 0; k + 1 < chain.entropy_by_context.size(); ++k) {
        worst_margin = std::min(worst_margin,
                                chain.entropy_by_context[k] - chain.entropy_by_context[k + 1]);
      }
      ++trials_run;
    };

    if (config.source.kind == SourceSpec::Kind::kFile) {
      run_one(table_from_json(read_file(config.source.path)));
    } else {
      std::vector<int> vars;
      for (int v = 1; v <= config.n_vars; ++v) vars.push_back(v);
      for (int t = 0; t < config.trials; ++t) {
        run_one(random_joint(vars, Alphabet(config.alphabet_size),
                             config.source.seed + static_cast<std::uint64_t>(t)));
      }
    }

    const std::size_t total_violations =
        pairwise_violations + nested_violations + entropy_violations;
    std::string out = "{";
    out += "\"trials\":" + std::to_string(trials_run);
    out += ",\"pairwise_violations\":" + std::to_string(pairwise_violations);
    out += ",\"nested_violations\":" + std::to_string(nested_violations);
    out += ",\"entropy_violations\":" + std::to_string(entropy_violations);
    out += ",\"skipped_contexts\":" + std::to_string(skipped);
    out += ",\"worst_margin\":" + fmt(worst_margin);
    out += ",\"passed\":" + std::string(total_violations == 0 ? "true" : "false");
    out += "}";
    emit(config.output, out);
    std::cerr << (total_violations == 0 ? "verify: PASS" : "verify: FAIL") << " ("
              << trials_run << " trials, " << total_violations << " violations, worst margin "
              << worst_margin << ")\n";
    return total_violations == 0 ? 0 : 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_benchmark(const ExperimentConfig& config) {
  try {
    std::vector<int> alphabets = config.alphabet_sweep;
    if (alphabets.empty()) alphabets.push_back(config.alphabet_size);

    std::string csv = "method,T,I,dual_dimension,wall_time_ms,iterations\n";
    for (int T = config.t_min; T <= config.t_max; ++T) {
      if (config.method == "gmep" && T < 2) continue;
      for (int I : alphabets) {
        const std::uint64_t entries = full_table_entries(config.method, T, I);
        if (entries > config.budget_entries) {
          std::cerr << "skipping " << config.method << " T=" << T << " I=" << I << ": " << entries
                    << " entries exceed budget\n";
          continue;
        }
        ExperimentConfig point = config;
        point.T = T;
        point.alphabet_size = I;
        point.source.seed = config.source.seed + static_cast<std::uint64_t>(31 * T + I);
        const JointTable truth = synthetic_truth(point);
        const ConstraintSystem system = build_system_from_truth(config.method, T, truth);
        const ReductionPlan plan = reduce_redundancy(system);
        const SolveResult result = solve(system, plan, config.solver);
        csv += config.method + "," + std::to_string(T) + "," + std::to_string(I) + "," +
               std::to_string(system.dual_dimension()) + "," + fmt(result.wall_time_ms) + "," +
               std::to_string(result.iterations) + "\n";
      }
    }
    emit(config.output, csv);
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_generate(const ExperimentConfig& config) {
  try {
    if (config.length < 1) {
      std::cerr << "usage error: length must be >= 1\n";
      return 1;
    }
    std::optional<SolveResult> result;
    if (!config.result_path.empty()) {
      result = result_from_json(read_file(config.result_path));
    } else {
      const JointTable truth = synthetic_truth(config);
      const ConstraintSystem system =
          build_system_from_truth(config.method, config.T, truth);
      const ReductionPlan plan = reduce_redundancy(system);
      result = solve(system, plan, config.solver);
      if (!result->converged) {
        std::cerr << "solve did not converge; refusing to generate\n";
        return 2;
      }
    }

    const auto& window = result->joint.vars();
    const int window_len = static_cast<int>(window.size());
    std::mt19937_64 rng(config.source.seed);
    std::vector<int> sequence;
    std::vector<double> logprobs;
    sequence.reserve(static_cast<std::size_t>(config.length));
    for (int step = 0; step < config.length; ++step) {
      const int ctx_len = std::min(step, window_len - 1);
      Assignment context;
      for (int k = 0; k < ctx_len; ++k) {
        context[window[static_cast<std::size_t>(k)]] =
            sequence[sequence.size() - static_cast<std::size_t>(ctx_len - k)];
      }
      const int target = window[static_cast<std::size_t>(ctx_len)];
      const ConditionalSlice slice = augmented_conditional(*result, target, context);
      const int symbol = sample(slice, config.temperature, rng);
      sequence.push_back(symbol);
      logprobs.push_back(std::log(slice.probs()[static_cast<std::size_t>(symbol)]));
    }

    if (config.output.format == OutputSpec::Format::kJson) {
      std::string out = "{\"sequence\":[";
      for (std::size_t i = 0; i < sequence.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(sequence[i]);
      }
      out += "],\"logprobs\":[";
      for (std::size_t i = 0; i < logprobs.size(); ++i) {
        if (i) out += ',';
        out += fmt(logprobs[i]);
      }
      out += "]}";
      emit(config.output, out);
    } else {
      std::string csv = "step,symbol,logprob\n";
      for (std::size_t i = 0; i < sequence.size(); ++i) {
        csv += std::to_string(i) + "," + std::to_string(sequence[i]) + "," + fmt(logprobs[i]) +
               "\n";
      }
      emit(config.output, csv);
    }
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_geometric(const ExperimentConfig& config) {
  try {
    std::vector<double> grid = config.mu_grid;
    if (grid.empty()) grid = {1.01, 1.1, 1.5, 2.0, 5.0, 10.0, 100.0};
    std::string csv = "mu,entropy_closed,entropy_numeric,spread\n";
    for (double mu : grid) {
      const GeometricModel model(mu);
      csv += fmt(mu) + "," + fmt(model.entropy_closed()) + "," +
             fmt(model.entropy_numeric(config.tail_tolerance)) + "," + fmt(model.spread()) + "\n";
    }
    emit(config.output, csv);
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace maxent::cli
