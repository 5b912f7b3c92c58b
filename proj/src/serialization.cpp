#include "drlqg/serialization.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

#include "drlqg/errors.hpp"

namespace drlqg {

namespace {

using nlohmann::json;

std::string fmt_double(double v, const char* spec) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

// JSON token for a number: 12 significant digits, with the formally
// infinite multiplier of a radius-zero channel spelled as a string.
std::string json_num(double v) {
  if (std::isinf(v)) return v > 0 ? "\"inf\"" : "\"-inf\"";
  return fmt_double(v, "%.12g");
}

// Data files (policy, moments) use enough digits to round-trip exactly.
constexpr const char* kExact = "%.17g";

void write_vector(std::ostringstream& os, const Eigen::VectorXd& v,
                  const char* spec) {
  os << "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) os << ", ";
    os << fmt_double(v[i], spec);
  }
  os << "]";
}

void write_matrix(std::ostringstream& os, const Eigen::MatrixXd& m,
                  const char* spec, const char* indent) {
  os << "[";
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    if (r) os << ",";
    os << "\n" << indent << "  ";
    write_vector(os, m.row(r).transpose(), spec);
  }
  os << "\n" << indent << "]";
}

json parse_json(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string(what) + " is not valid JSON: " + e.what());
  }
}

void check_fields(const json& obj, const std::string& ctx,
                  std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* name : allowed)
      if (item.key() == name) {
        known = true;
        break;
      }
    if (!known)
      throw ConfigError("unknown " + ctx + " field \"" + item.key() + "\"");
  }
}

const json& require_field(const json& obj, const std::string& ctx,
                          const char* name) {
  if (!obj.is_object())
    throw ConfigError(ctx + " must be an object");
  auto it = obj.find(name);
  if (it == obj.end())
    throw ConfigError(ctx + " is missing field \"" + name + "\"");
  return *it;
}

double number_from(const json& j, const std::string& name) {
  if (!j.is_number())
    throw ConfigError("field \"" + name + "\" must be a number");
  return j.get<double>();
}

long long integer_from(const json& j, const std::string& name) {
  if (!j.is_number_integer() && !j.is_number_unsigned())
    throw ConfigError("field \"" + name + "\" must be an integer");
  return j.get<long long>();
}

Eigen::VectorXd vector_from(const json& j, const std::string& name) {
  if (!j.is_array())
    throw ConfigError("field \"" + name + "\" must be an array of numbers");
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    v[static_cast<Eigen::Index>(i)] =
        number_from(j[i], name + "[" + std::to_string(i) + "]");
  return v;
}

Eigen::MatrixXd matrix_from(const json& j, const std::string& name) {
  if (!j.is_array() || j.empty())
    throw ConfigError("field \"" + name + "\" must be a non-empty array of rows");
  const std::size_t rows = j.size();
  std::size_t cols = 0;
  Eigen::MatrixXd m;
  for (std::size_t r = 0; r < rows; ++r) {
    const json& row = j[r];
    if (!row.is_array() || row.empty())
      throw ConfigError("field \"" + name + "\" row " + std::to_string(r) +
                        " must be a non-empty array of numbers");
    if (r == 0) {
      cols = row.size();
      m.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    } else if (row.size() != cols) {
      throw ConfigError("field \"" + name + "\" has ragged rows");
    }
    for (std::size_t c = 0; c < cols; ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          number_from(row[c], name);
  }
  return m;
}

std::vector<Eigen::MatrixXd> matrix_family(const json& matrices,
                                           const char* name, int expected) {
  const json& arr = require_field(matrices, "\"matrices\"", name);
  if (!arr.is_array() || arr.empty())
    throw ConfigError(std::string("matrices field \"") + name +
                      "\" must be a non-empty array of matrices");
  std::vector<Eigen::MatrixXd> out;
  out.reserve(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i)
    out.push_back(
        matrix_from(arr[i], std::string(name) + "[" + std::to_string(i) + "]"));
  if (out.size() == 1 && expected > 1)
    out.assign(static_cast<std::size_t>(expected), out.front());
  if (static_cast<int>(out.size()) != expected)
    throw ConfigError(std::string("matrices field \"") + name +
                      "\" must have 1 or " + std::to_string(expected) +
                      " entries, got " + std::to_string(out.size()));
  return out;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  const json j = parse_json(text, "config");
  if (!j.is_object()) throw ConfigError("config root must be an object");
  check_fields(j, "config",
               {"horizon", "matrices", "x0", "reference", "radii", "solver",
                "seed"});

  const json& jh = require_field(j, "config", "horizon");
  const long long horizon = integer_from(jh, "horizon");
  if (horizon < 1)
    throw ConfigError("field \"horizon\" must be a positive integer");
  const int T = static_cast<int>(horizon);

  RunConfig cfg;
  cfg.problem.horizon = T;
  const json& jm = require_field(j, "config", "matrices");
  if (!jm.is_object()) throw ConfigError("\"matrices\" must be an object");
  check_fields(jm, "matrices", {"A", "B", "C", "Q", "R"});
  cfg.problem.A = matrix_family(jm, "A", T);
  cfg.problem.B = matrix_family(jm, "B", T);
  cfg.problem.C = matrix_family(jm, "C", T);
  cfg.problem.Q = matrix_family(jm, "Q", T + 1);
  cfg.problem.R = matrix_family(jm, "R", T);
  cfg.problem.x0 = vector_from(require_field(j, "config", "x0"), "x0");

  const json& jref = require_field(j, "config", "reference");
  if (!jref.is_object()) throw ConfigError("\"reference\" must be an object");
  check_fields(jref, "reference", {"cov_v", "cov_w"});
  cfg.ambiguity.cov_v_ref =
      matrix_from(require_field(jref, "\"reference\"", "cov_v"), "cov_v");
  cfg.ambiguity.cov_w_ref =
      matrix_from(require_field(jref, "\"reference\"", "cov_w"), "cov_w");

  const json& jrad = require_field(j, "config", "radii");
  if (!jrad.is_object()) throw ConfigError("\"radii\" must be an object");
  check_fields(jrad, "radii", {"rho_v", "rho_w"});
  cfg.ambiguity.rho_v =
      number_from(require_field(jrad, "\"radii\"", "rho_v"), "rho_v");
  cfg.ambiguity.rho_w =
      number_from(require_field(jrad, "\"radii\"", "rho_w"), "rho_w");
  if (!(cfg.ambiguity.rho_v >= 0.0) || !std::isfinite(cfg.ambiguity.rho_v) ||
      !(cfg.ambiguity.rho_w >= 0.0) || !std::isfinite(cfg.ambiguity.rho_w))
    throw ConfigError("fields \"rho_v\"/\"rho_w\" must be finite and >= 0");

  if (j.contains("solver")) {
    const json& js = j.at("solver");
    if (!js.is_object()) throw ConfigError("\"solver\" must be an object");
    check_fields(js, "solver", {"tolerance", "max_iter", "max_rounds"});
    if (js.contains("tolerance")) {
      cfg.solver.tolerance = number_from(js.at("tolerance"), "tolerance");
      if (!(cfg.solver.tolerance > 0.0))
        throw ConfigError("field \"tolerance\" must be positive");
    }
    if (js.contains("max_iter")) {
      const long long v = integer_from(js.at("max_iter"), "max_iter");
      if (v < 1) throw ConfigError("field \"max_iter\" must be positive");
      cfg.solver.max_iter = static_cast<int>(v);
    }
    if (js.contains("max_rounds")) {
      const long long v = integer_from(js.at("max_rounds"), "max_rounds");
      if (v < 1) throw ConfigError("field \"max_rounds\" must be positive");
      cfg.max_rounds = static_cast<int>(v);
    }
  }
  if (j.contains("seed")) {
    const json& jseed = j.at("seed");
    if (!(jseed.is_number_unsigned() ||
          (jseed.is_number_integer() && jseed.get<long long>() >= 0)))
      throw ConfigError("field \"seed\" must be a non-negative integer");
    cfg.seed = jseed.get<std::uint64_t>();
  }

  validate_problem(cfg.problem);
  const int n = cfg.problem.state_dim();
  const int p = cfg.problem.output_dim();
  if (cfg.ambiguity.cov_v_ref.rows() != n || cfg.ambiguity.cov_v_ref.cols() != n)
    throw DimensionError("reference cov_v has shape " +
                         std::to_string(cfg.ambiguity.cov_v_ref.rows()) + "x" +
                         std::to_string(cfg.ambiguity.cov_v_ref.cols()) +
                         ", expected " + std::to_string(n) + "x" +
                         std::to_string(n));
  if (cfg.ambiguity.cov_w_ref.rows() != p || cfg.ambiguity.cov_w_ref.cols() != p)
    throw DimensionError("reference cov_w has shape " +
                         std::to_string(cfg.ambiguity.cov_w_ref.rows()) + "x" +
                         std::to_string(cfg.ambiguity.cov_w_ref.cols()) +
                         ", expected " + std::to_string(p) + "x" +
                         std::to_string(p));
  return cfg;
}

RunConfig load_config(const std::string& path) {
  return parse_config(read_text_file(path));
}

std::string policy_to_json(const LinearPolicy& policy) {
  std::ostringstream os;
  os << "{\n"
     << "  \"horizon\": " << policy.horizon << ",\n"
     << "  \"input_dim\": " << policy.m << ",\n"
     << "  \"output_dim\": " << policy.p << ",\n"
     << "  \"U\": ";
  write_matrix(os, policy.U, kExact, "  ");
  os << ",\n  \"q\": ";
  write_vector(os, policy.q, kExact);
  os << "\n}\n";
  return os.str();
}

LinearPolicy parse_policy(const std::string& text) {
  const json j = parse_json(text, "policy file");
  if (!j.is_object()) throw ConfigError("policy file root must be an object");
  check_fields(j, "policy", {"horizon", "input_dim", "output_dim", "U", "q"});
  const long long T = integer_from(require_field(j, "policy", "horizon"), "horizon");
  const long long m = integer_from(require_field(j, "policy", "input_dim"), "input_dim");
  const long long p = integer_from(require_field(j, "policy", "output_dim"), "output_dim");
  if (T < 1 || m < 1 || p < 1)
    throw ConfigError("policy dimensions must be positive");
  const Eigen::MatrixXd U = matrix_from(require_field(j, "policy", "U"), "U");
  const Eigen::VectorXd q = vector_from(require_field(j, "policy", "q"), "q");
  return make_policy(static_cast<int>(T), static_cast<int>(m),
                     static_cast<int>(p), U, q);
}

LinearPolicy load_policy(const std::string& path) {
  return parse_policy(read_text_file(path));
}

void save_policy(const std::string& path, const LinearPolicy& policy) {
  write_text_file(path, policy_to_json(policy));
}

std::string moments_to_json(const NoiseMoments& moments) {
  std::ostringstream os;
  os << "{\n  \"mean_v\": ";
  write_vector(os, moments.mean_v, kExact);
  os << ",\n  \"cov_v\": ";
  write_matrix(os, moments.cov_v, kExact, "  ");
  os << ",\n  \"mean_w\": ";
  write_vector(os, moments.mean_w, kExact);
  os << ",\n  \"cov_w\": ";
  write_matrix(os, moments.cov_w, kExact, "  ");
  os << "\n}\n";
  return os.str();
}

NoiseMoments parse_moments(const std::string& text) {
  const json j = parse_json(text, "moments file");
  if (!j.is_object()) throw ConfigError("moments file root must be an object");
  check_fields(j, "moments", {"mean_v", "cov_v", "mean_w", "cov_w"});
  NoiseMoments moments;
  moments.mean_v = vector_from(require_field(j, "moments", "mean_v"), "mean_v");
  moments.cov_v = matrix_from(require_field(j, "moments", "cov_v"), "cov_v");
  moments.mean_w = vector_from(require_field(j, "moments", "mean_w"), "mean_w");
  moments.cov_w = matrix_from(require_field(j, "moments", "cov_w"), "cov_w");
  if (moments.cov_v.rows() != moments.cov_v.cols() ||
      moments.cov_v.rows() != moments.mean_v.size())
    throw ConfigError("moments field \"cov_v\" must be square with the size of \"mean_v\"");
  if (moments.cov_w.rows() != moments.cov_w.cols() ||
      moments.cov_w.rows() != moments.mean_w.size())
    throw ConfigError("moments field \"cov_w\" must be square with the size of \"mean_w\"");
  return moments;
}

NoiseMoments load_moments(const std::string& path) {
  return parse_moments(read_text_file(path));
}

void save_moments(const std::string& path, const NoiseMoments& moments) {
  write_text_file(path, moments_to_json(moments));
}

std::string worst_case_report_json(const WorstCaseSolution& solution) {
  std::ostringstream os;
  os << "{\n"
     << "  \"lambda_v\": " << json_num(solution.lambda_v) << ",\n"
     << "  \"lambda_w\": " << json_num(solution.lambda_w) << ",\n"
     << "  \"cost_core\": " << json_num(solution.cost_core) << ",\n"
     << "  \"cost\": " << json_num(solution.cost) << ",\n"
     << "  \"iterations\": " << solution.iterations << ",\n"
     << "  \"mean_v\": ";
  write_vector(os, solution.moments.mean_v, "%.12g");
  os << ",\n  \"cov_v\": ";
  write_matrix(os, solution.moments.cov_v, "%.12g", "  ");
  os << ",\n  \"mean_w\": ";
  write_vector(os, solution.moments.mean_w, "%.12g");
  os << ",\n  \"cov_w\": ";
  write_matrix(os, solution.moments.cov_w, "%.12g", "  ");
  os << ",\n  \"residuals\": {\n"
     << "    \"radius_v\": " << json_num(solution.residuals.radius_v) << ",\n"
     << "    \"radius_w\": " << json_num(solution.residuals.radius_w) << ",\n"
     << "    \"mean_system\": " << json_num(solution.residuals.mean_system)
     << ",\n"
     << "    \"certificate\": " << json_num(solution.residuals.certificate)
     << ",\n"
     << "    \"cost_consistency\": "
     << json_num(solution.residuals.cost_consistency) << "\n  }\n}\n";
  return os.str();
}

std::string equilibrium_report_json(const Equilibrium& eq) {
  std::ostringstream os;
  os << "{\n"
     << "  \"value\": " << json_num(eq.value) << ",\n"
     << "  \"gap\": " << json_num(eq.gap) << ",\n"
     << "  \"rounds\": " << eq.rounds << "\n}\n";
  return os.str();
}

std::string trace_csv(const std::vector<EquilibriumTraceRow>& trace) {
  std::ostringstream os;
  os << "round,value,policy_delta,nature_delta\n";
  for (const EquilibriumTraceRow& row : trace)
    os << row.round << "," << format_number(row.value) << ","
       << format_number(row.policy_delta) << ","
       << format_number(row.nature_delta) << "\n";
  return os.str();
}

std::string example_report_csv(const ExampleReport& report) {
  std::ostringstream os;
  os << "formulation,K1,worst_case_cost,adversary_description\n";
  for (const ExampleRow& row : report.rows)
    os << row.formulation << "," << format_number(row.K1) << ","
       << format_number(row.worst_case_cost) << ",\""
       << row.adversary_description << "\"\n";
  return os.str();
}

std::string format_number(double value) { return fmt_double(value, "%.12g"); }

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open file \"" + path + "\"");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write file \"" + path + "\"");
  out << content;
  if (!out) throw Error("failed writing file \"" + path + "\"");
}

}  // namespace drlqg
