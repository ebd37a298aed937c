#pragma once

// JSON formats for tables, chain models, constraint systems and solve
// results. The writer emits every floating-point value with 17 significant
// digits so a written table reads back bit-identical.

#include <string>

#include "maxent/chain.hpp"
#include "maxent/constraints.hpp"
#include "maxent/solver.hpp"
#include "maxent/table.hpp"

namespace maxent {

// {"vars": [...], "alphabet_size": I, "values": [...]} (row-major)
std::string to_json(const JointTable& table);
JointTable table_from_json(const std::string& text);

// table container plus an "order" field; the values are the chain's joint
std::string to_json(const ChainModel& model);
ChainModel chain_from_json(const std::string& text);

// {"full_vars": [...], "alphabet_size": I, "method": "...",
//  "constraints": [{"vars": [...], "values": [...]}, ...]}
std::string to_json(const ConstraintSystem& system);
ConstraintSystem system_from_json(const std::string& text);

// joint table, per-constraint residuals, iterations, entropy, strategy,
// wall-time milliseconds, convergence flags, warnings
std::string to_json(const SolveResult& result);
SolveResult result_from_json(const std::string& text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace maxent
