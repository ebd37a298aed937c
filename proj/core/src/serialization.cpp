#include "maxent/serialization.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace maxent {

namespace {

using nlohmann::json;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void append_double_array(std::string& out, const std::vector<double>& values) {
  out += '[';
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += fmt(values[i]);
  }
  out += ']';
}

void append_int_array(std::string& out, const std::vector<int>& values) {
  out += '[';
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(values[i]);
  }
  out += ']';
}

void append_table_fields(std::string& out, const JointTable& table) {
  out += "\"vars\":";
  append_int_array(out, table.vars());
  out += ",\"alphabet_size\":" + std::to_string(table.alphabet().size());
  out += ",\"values\":";
  append_double_array(out, table.values());
}

json parse(const std::string& text) {
  json j = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) throw IoError("invalid JSON");
  return j;
}

std::vector<int> int_array(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_array()) {
    throw IoError(std::string("missing array field \"") + key + "\"");
  }
  std::vector<int> out;
  for (const auto& v : j[key]) out.push_back(v.get<int>());
  return out;
}

std::vector<double> double_array(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_array()) {
    throw IoError(std::string("missing array field \"") + key + "\"");
  }
  std::vector<double> out;
  for (const auto& v : j[key]) out.push_back(v.get<double>());
  return out;
}

JointTable table_from(const json& j) {
  if (!j.contains("alphabet_size")) throw IoError("missing \"alphabet_size\"");
  return JointTable(int_array(j, "vars"), Alphabet(j["alphabet_size"].get<int>()),
                    double_array(j, "values"));
}

}  // namespace

std::string to_json(const JointTable& table) {
  std::string out = "{";
  append_table_fields(out, table);
  out += "}";
  return out;
}

JointTable table_from_json(const std::string& text) { return table_from(parse(text)); }

std::string to_json(const ChainModel& model) {
  std::string out = "{";
  append_table_fields(out, model.joint());
  out += ",\"order\":" + std::to_string(model.order());
  out += "}";
  return out;
}

ChainModel chain_from_json(const std::string& text) {
  const json j = parse(text);
  if (!j.contains("order")) throw IoError("missing \"order\"");
  return ChainModel::fit(table_from(j), j["order"].get<int>());
}

std::string to_json(const ConstraintSystem& system) {
  std::string out = "{\"full_vars\":";
  append_int_array(out, system.full_vars());
  out += ",\"alphabet_size\":" + std::to_string(system.alphabet().size());
  out += ",\"method\":\"" + to_string(system.method_tag()) + "\"";
  out += ",\"constraints\":[";
  for (std::size_t c = 0; c < system.constraints().size(); ++c) {
    if (c) out += ',';
    out += "{\"vars\":";
    append_int_array(out, system.constraints()[c].vars());
    out += ",\"values\":";
    append_double_array(out, system.constraints()[c].target().values());
    out += "}";
  }
  out += "]}";
  return out;
}

ConstraintSystem system_from_json(const std::string& text) {
  const json j = parse(text);
  const std::vector<int> full_vars = int_array(j, "full_vars");
  if (!j.contains("alphabet_size")) throw IoError("missing \"alphabet_size\"");
  const Alphabet alphabet(j["alphabet_size"].get<int>());
  if (!j.contains("method")) throw IoError("missing \"method\"");
  const MethodTag tag = method_tag_from_string(j["method"].get<std::string>());
  if (!j.contains("constraints") || !j["constraints"].is_array()) {
    throw IoError("missing \"constraints\"");
  }
  std::vector<MarginalConstraint> cs;
  for (const auto& cj : j["constraints"]) {
    std::vector<int> vars = int_array(cj, "vars");
    JointTable target(vars, alphabet, double_array(cj, "values"));
    cs.emplace_back(std::move(vars), std::move(target));
  }
  return ConstraintSystem(full_vars, alphabet, std::move(cs), tag);
}

std::string to_json(const SolveResult& result) {
  std::string out = "{\"joint\":{";
  append_table_fields(out, result.joint);
  out += "},\"residuals\":";
  append_double_array(out, result.constraint_residuals);
  out += ",\"max_residual\":" + fmt(result.max_residual);
  out += ",\"iterations\":" + std::to_string(result.iterations);
  out += ",\"entropy\":" + fmt(result.entropy);
  out += ",\"converged\":" + std::string(result.converged ? "true" : "false");
  out += ",\"strategy\":\"" + to_string(result.strategy) + "\"";
  out += ",\"wall_time_ms\":" + fmt(result.wall_time_ms);
  out += ",\"warnings\":[";
  for (std::size_t i = 0; i < result.warnings.size(); ++i) {
    if (i) out += ',';
    out += json(result.warnings[i]).dump();
  }
  out += "]}";
  return out;
}

SolveResult result_from_json(const std::string& text) {
  const json j = parse(text);
  if (!j.contains("joint")) throw IoError("missing \"joint\"");
  SolveResult result{table_from(j["joint"]), DualVariables{}, 0.0, 0, 0.0, false,
                     Strategy::kNewton, 0.0, {}, {}, {}};
  if (j.contains("residuals")) result.constraint_residuals = double_array(j, "residuals");
  if (j.contains("max_residual")) result.max_residual = j["max_residual"].get<double>();
  if (j.contains("iterations")) result.iterations = j["iterations"].get<int>();
  if (j.contains("entropy")) result.entropy = j["entropy"].get<double>();
  if (j.contains("converged")) result.converged = j["converged"].get<bool>();
  if (j.contains("strategy")) result.strategy = strategy_from_string(j["strategy"].get<std::string>());
  if (j.contains("wall_time_ms")) result.wall_time_ms = j["wall_time_ms"].get<double>();
  if (j.contains("warnings")) {
    for (const auto& w : j["warnings"]) result.warnings.push_back(w.get<std::string>());
  }
  return result;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << contents;
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace maxent
