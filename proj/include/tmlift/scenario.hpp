#pragma once

/**
 * @file scenario.hpp
 * @brief JSON scenarios: parsing, check orchestration and reports.
 *
 * Exit codes: 0 every check passed, 1 some residual exceeded its tolerance,
 * 2 the scenario could not be read or evaluated.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "tmlift/expr.hpp"
#include "tmlift/geometry.hpp"
#include "tmlift/lift.hpp"
#include "tmlift/verify.hpp"

namespace tmlift {

using json = nlohmann::json;

/// Schema violation; `path` is a JSON-pointer-like location such as $.gamma[1][0].
class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(std::string path, const std::string& msg)
      : std::runtime_error(path + ": " + msg), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

inline constexpr int kExitPass = 0;
inline constexpr int kExitResidualFailure = 1;
inline constexpr int kExitInputError = 2;

inline const std::vector<std::string>& check_names() {
  static const std::vector<std::string> names{"codazzi", "prop1",   "prop2",      "closedness",  "nondegeneracy",
                                              "brackets", "dlambda", "lagrangian", "zero_section"};
  return names;
}

/// Tolerance applied when a scenario does not override it.
inline double default_tolerance(const std::string& check) {
  if (check == "codazzi" || check == "brackets" || check == "zero_section") return tol::kAdExact;
  if (check == "nondegeneracy") return 1.0;  // residual is threshold / |det|
  return tol::kClosedness;
}

struct Scenario {
  std::string name;
  std::size_t dim = 0;
  Box box;
  Connection conn = Connection::flat(1);
  TwoForm omega0 = TwoForm::zero(1);
  TwoForm omega1 = TwoForm::zero(1);
  CovariantTwoTensor A = CovariantTwoTensor::zero(1);
  std::optional<CovariantTwoTensor> g;
  std::optional<std::vector<ScalarField>> alpha;
  std::optional<TwoFormTM> omega_tm;
  std::vector<std::string> checks;
  std::size_t samples = 50;
  std::uint64_t seed = 42;
  std::map<std::string, double> tol;

  LiftSpec spec() const { return {conn, omega0, omega1, A}; }
  SamplingPlan plan() const { return {box, samples, seed}; }
  double tolerance(const std::string& check) const {
    const auto it = tol.find(check);
    return it == tol.end() ? default_tolerance(check) : it->second;
  }
};

namespace detail {

inline std::string at_index(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

inline const json& require_array(const json& j, const std::string& path, std::size_t size) {
  if (!j.is_array()) throw ScenarioError(path, "expected an array");
  if (j.size() != size)
    throw ScenarioError(path, "expected " + std::to_string(size) + " entries, got " + std::to_string(j.size()));
  return j;
}

inline ScalarField parse_entry(const json& j, const std::string& path, std::size_t dim, VarScheme vars) {
  std::string text;
  if (j.is_string())
    text = j.get<std::string>();
  else if (j.is_number())
    text = detail::format_number(j.get<double>());
  else
    throw ScenarioError(path, "expected an expression string");
  try {
    return parse_field(text, dim, vars);
  } catch (const ParseError& e) {
    throw ScenarioError(path, std::string("cannot parse '") + text + "': " + e.what());
  }
}

inline std::vector<ScalarField> parse_vector(const json& j, const std::string& path, std::size_t n, std::size_t dim,
                                             VarScheme vars = VarScheme::base) {
  require_array(j, path, n);
  std::vector<ScalarField> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(parse_entry(j[i], at_index(path, i), dim, vars));
  return out;
}

inline std::vector<ScalarField> parse_matrix(const json& j, const std::string& path, std::size_t d,
                                             std::size_t dim_vars, VarScheme vars = VarScheme::base) {
  require_array(j, path, d);
  std::vector<ScalarField> out;
  for (std::size_t i = 0; i < d; ++i) {
    auto row = parse_vector(j[i], at_index(path, i), d, dim_vars, vars);
    out.insert(out.end(), row.begin(), row.end());
  }
  return out;
}

/// Full n x n antisymmetric matrix, or its strict upper triangle (row i holds n-1-i entries).
/// Returns the strict upper triangle in row-major order.
inline std::vector<ScalarField> parse_antisymmetric(const json& j, const std::string& path, std::size_t n,
                                                    std::size_t dim_vars, VarScheme vars, const Box* probe) {
  if (!j.is_array()) throw ScenarioError(path, "expected an array of rows");
  if (j.empty()) {
    if (n == 1) return {};
    throw ScenarioError(path, "expected an array of rows");
  }
  const bool full = j[0].is_array() && j[0].size() == n && n > 1;
  std::vector<ScalarField> upper;
  if (full || n == 1) {
    require_array(j, path, n);
    const auto m = parse_matrix(j, path, n, dim_vars, vars);
    if (probe != nullptr) {
      // antisymmetry probe at a few fixed points of the box
      for (double t : {0.25, 0.5, 0.75}) {
        Point x(vars == VarScheme::tangent_bundle ? 2 * dim_vars : dim_vars, t - 0.5);
        for (std::size_t k = 0; k < dim_vars; ++k) {
          const auto& b = probe->bounds[k];
          x[k] = b.first + t * (b.second - b.first);
        }
        for (std::size_t a = 0; a < n; ++a)
          for (std::size_t b = a; b < n; ++b) {
            const double s = m[a * n + b](x) + m[b * n + a](x);
            if (std::abs(s) > 1e-12 * (1.0 + std::abs(m[a * n + b](x))))
              throw ScenarioError(at_index(at_index(path, a), b), "matrix is not antisymmetric");
          }
      }
    }
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a + 1; b < n; ++b) upper.push_back(m[a * n + b]);
    return upper;
  }
  if (j.size() != n - 1 && !(j.size() == n && j[n - 1].is_array() && j[n - 1].empty()))
    throw ScenarioError(path, "expected " + std::to_string(n) + " full rows or " + std::to_string(n - 1) +
                                  " strict-upper-triangle rows");
  for (std::size_t a = 0; a + 1 < n; ++a) {
    auto row = parse_vector(j[a], at_index(path, a), n - 1 - a, dim_vars, vars);
    upper.insert(upper.end(), row.begin(), row.end());
  }
  return upper;
}

template <class T>
T get_number(const json& j, const std::string& path) {
  if constexpr (std::is_floating_point_v<T>) {
    if (!j.is_number()) throw ScenarioError(path, "expected a number");
  } else {
    if (!j.is_number_integer() || j.get<std::int64_t>() < 0) throw ScenarioError(path, "expected a non-negative integer");
  }
  return j.get<T>();
}

}  // namespace detail

inline Scenario parse_scenario(const json& j, const std::string& fallback_name = "scenario") {
  using detail::at_index;
  if (!j.is_object()) throw ScenarioError("$", "expected a JSON object");
  static const std::set<std::string> known{"name", "note",   "expect", "dim",   "box",    "gamma",   "omega0",
                                           "omega1", "A",    "g",      "alpha", "Omega_tm", "derive", "checks",
                                           "samples", "seed", "tol"};
  for (const auto& [key, _] : j.items())
    if (!known.count(key)) throw ScenarioError("$." + key, "unknown key");

  Scenario s;
  s.name = j.contains("name") ? j["name"].get<std::string>() : fallback_name;
  if (!j.contains("dim")) throw ScenarioError("$.dim", "missing");
  s.dim = detail::get_number<std::size_t>(j["dim"], "$.dim");
  const std::size_t d = s.dim;
  if (d < 1 || 2 * d > kMaxPartials) throw ScenarioError("$.dim", "must be between 1 and " + std::to_string(kMaxPartials / 2));

  if (!j.contains("box")) throw ScenarioError("$.box", "missing");
  detail::require_array(j["box"], "$.box", d);
  for (std::size_t i = 0; i < d; ++i) {
    const auto path = at_index("$.box", i);
    detail::require_array(j["box"][i], path, 2);
    const double lo = detail::get_number<double>(j["box"][i][0], at_index(path, 0));
    const double hi = detail::get_number<double>(j["box"][i][1], at_index(path, 1));
    if (!(lo < hi)) throw ScenarioError(path, "interval must satisfy lo < hi");
    s.box.bounds.emplace_back(lo, hi);
  }

  std::set<std::string> derive;
  if (j.contains("derive")) {
    if (!j["derive"].is_array()) throw ScenarioError("$.derive", "expected an array");
    for (std::size_t i = 0; i < j["derive"].size(); ++i) {
      const auto& e = j["derive"][i];
      if (!e.is_string() || (e != "levi_civita" && e != "nabla_alpha"))
        throw ScenarioError(at_index("$.derive", i), "expected \"levi_civita\" or \"nabla_alpha\"");
      derive.insert(e.get<std::string>());
    }
  }

  if (j.contains("g")) s.g = CovariantTwoTensor::from_components(d, detail::parse_matrix(j["g"], "$.g", d, d));
  if (j.contains("alpha")) s.alpha = detail::parse_vector(j["alpha"], "$.alpha", d, d);

  if (derive.count("levi_civita")) {
    if (!s.g) throw ScenarioError("$.derive", "levi_civita requires \"g\"");
    if (j.contains("gamma")) throw ScenarioError("$.gamma", "conflicts with derive levi_civita");
    s.conn = levi_civita(*s.g);
  } else if (j.contains("gamma")) {
    const auto& gj = j["gamma"];
    detail::require_array(gj, "$.gamma", d);
    std::vector<ScalarField> syms;
    for (std::size_t i = 0; i < d; ++i) {
      const auto m = detail::parse_matrix(gj[i], at_index("$.gamma", i), d, d);
      syms.insert(syms.end(), m.begin(), m.end());
    }
    s.conn = Connection::from_symbols(d, std::move(syms));
  } else {
    s.conn = Connection::flat(d);
  }

  s.omega0 = j.contains("omega0")
                 ? TwoForm::from_upper(d, detail::parse_antisymmetric(j["omega0"], "$.omega0", d, d, VarScheme::base, &s.box))
                 : TwoForm::zero(d);
  s.omega1 = j.contains("omega1")
                 ? TwoForm::from_upper(d, detail::parse_antisymmetric(j["omega1"], "$.omega1", d, d, VarScheme::base, &s.box))
                 : TwoForm::zero(d);

  if (derive.count("nabla_alpha")) {
    if (!s.alpha) throw ScenarioError("$.derive", "nabla_alpha requires \"alpha\"");
    if (j.contains("A")) throw ScenarioError("$.A", "conflicts with derive nabla_alpha");
    s.A = one_form_derivative_tensor(s.conn, *s.alpha);
  } else if (j.contains("A")) {
    s.A = CovariantTwoTensor::from_components(d, detail::parse_matrix(j["A"], "$.A", d, d));
  } else {
    s.A = CovariantTwoTensor::zero(d);
  }

  if (j.contains("Omega_tm")) {
    const auto up = detail::parse_antisymmetric(j["Omega_tm"], "$.Omega_tm", 2 * d, d, VarScheme::tangent_bundle, &s.box);
    s.omega_tm = TwoFormTM(d, FieldArray::from_fields(2 * d, up));
  }

  if (!j.contains("checks") || !j["checks"].is_array()) throw ScenarioError("$.checks", "expected an array of check names");
  for (std::size_t i = 0; i < j["checks"].size(); ++i) {
    const auto& c = j["checks"][i];
    const auto& names = check_names();
    if (!c.is_string() || std::find(names.begin(), names.end(), c.get<std::string>()) == names.end())
      throw ScenarioError(at_index("$.checks", i), "unknown check name");
    s.checks.push_back(c.get<std::string>());
  }
  if (j.contains("samples")) s.samples = detail::get_number<std::size_t>(j["samples"], "$.samples");
  if (s.samples == 0) throw ScenarioError("$.samples", "must be positive");
  if (j.contains("seed")) s.seed = detail::get_number<std::uint64_t>(j["seed"], "$.seed");
  if (j.contains("tol")) {
    if (!j["tol"].is_object()) throw ScenarioError("$.tol", "expected an object");
    for (const auto& [key, v] : j["tol"].items()) {
      const auto& names = check_names();
      if (std::find(names.begin(), names.end(), key) == names.end()) throw ScenarioError("$.tol." + key, "unknown check name");
      const double t = detail::get_number<double>(v, "$.tol." + key);
      if (!(t >= 0.0)) throw ScenarioError("$.tol." + key, "must be non-negative");
      s.tol[key] = t;
    }
  }
  return s;
}

inline Scenario parse_scenario(const std::string& text, const std::string& fallback_name = "scenario") {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioError("$", std::string("invalid JSON: ") + e.what());
  }
  return parse_scenario(j, fallback_name);
}

struct CheckResult {
  std::string check;
  std::vector<ResidualReport> reports;
  bool passed() const {
    for (const auto& r : reports)
      if (!r.passed) return false;
    return true;
  }
};

struct RunReport {
  std::string scenario;
  std::uint64_t seed = 0;
  std::vector<CheckResult> checks;
  bool passed() const {
    for (const auto& c : checks)
      if (!c.passed()) return false;
    return true;
  }
  int exit_code() const { return passed() ? kExitPass : kExitResidualFailure; }
};

namespace detail {

inline ResidualReport agreement_report(const std::string& name, std::uint64_t seed, bool agree) {
  ResidualAccumulator acc(name, seed, 0.0);
  acc.add({}, agree ? 0.0 : 1.0);
  return acc.finish();
}

inline std::vector<ResidualReport> run_check(const Scenario& s, const std::string& check) {
  const auto plan = s.plan();
  const double t = s.tolerance(check);
  const std::size_t d = s.dim;
  if (check == "codazzi") {
    ResidualAccumulator acc("codazzi", s.seed, t);
    for (const auto& x : plan.base_points())
      acc.add(x, at_sample("codazzi", x, [&] { return max_codazzi(s.conn, s.A, x); }));
    return {acc.finish()};
  }
  if (check == "prop1") {
    const auto r = prop1_report(s.spec(), plan, t);
    auto all = r.all();
    all.push_back(agreement_report("prop1.agreement", s.seed, r.agreement()));
    return all;
  }
  if (check == "prop2") {
    const auto r = prop2_report(s.conn, s.A, plan, t);
    auto all = r.all();
    all.push_back(agreement_report("prop2.agreement", s.seed, r.agreement()));
    return all;
  }
  if (check == "closedness") {
    const auto spec = s.spec();
    ResidualAccumulator hhh("closedness.hhh", s.seed, t), vvv("closedness.vvv", s.seed, t),
        vvh("closedness.vvh", s.seed, t), hhv("closedness.hhv", s.seed, t);
    for (const auto& p : plan.tangent_points()) {
      const auto c = p.coords();
      double r[4] = {0, 0, 0, 0};
      at_sample("closedness", c, [&] {
        for (std::size_t i = 0; i < d; ++i)
          for (std::size_t j = 0; j < d; ++j)
            for (std::size_t k = 0; k < d; ++k) {
              const auto cr = closedness_residuals(spec, p, VectorField::coordinate(d, i), VectorField::coordinate(d, j),
                                                   VectorField::coordinate(d, k));
              r[0] = std::max(r[0], std::abs(cr.hhh.mismatch()));
              r[1] = std::max(r[1], std::abs(cr.vvv.mismatch()));
              r[2] = std::max(r[2], std::abs(cr.vvh.mismatch()));
              r[3] = std::max(r[3], std::abs(cr.hhv.mismatch()));
            }
        return 0.0;
      });
      hhh.add(c, r[0]);
      vvv.add(c, r[1]);
      vvh.add(c, r[2]);
      hhv.add(c, r[3]);
    }
    return {hhh.finish(), vvv.finish(), vvh.finish(), hhv.finish()};
  }
  if (check == "nondegeneracy") {
    const auto spec = s.spec();
    ResidualAccumulator acc("nondegeneracy", s.seed, t);
    for (const auto& x : plan.base_points())
      acc.add(x, at_sample("nondegeneracy", x, [&] {
                const auto r = nondegeneracy_check(spec, x);
                return r.determinant == 0.0 ? std::numeric_limits<double>::infinity()
                                            : r.threshold / std::abs(r.determinant);
              }));
    return {acc.finish()};
  }
  if (check == "brackets") {
    ResidualAccumulator hh("brackets.hh", s.seed, t), vv("brackets.vv", s.seed, t), hv("brackets.hv", s.seed, t);
    for (const auto& p : plan.tangent_points()) {
      const auto c = p.coords();
      double r[3] = {0, 0, 0};
      at_sample("brackets", c, [&] {
        for (std::size_t i = 0; i < d; ++i)
          for (std::size_t j = 0; j < d; ++j) {
            const auto b = bracket_residuals(s.conn, VectorField::coordinate(d, i), VectorField::coordinate(d, j), p);
            r[0] = std::max(r[0], max_abs(b.hh));
            r[1] = std::max(r[1], max_abs(b.vv));
            r[2] = std::max(r[2], max_abs(b.hv));
          }
        return 0.0;
      });
      hh.add(c, r[0]);
      vv.add(c, r[1]);
      hv.add(c, r[2]);
    }
    return {hh.finish(), vv.finish(), hv.finish()};
  }
  if (check == "dlambda") return dlambda_report(s.omega0, s.conn, plan, t).all();
  if (check == "lagrangian") {
    ResidualAccumulator acc("lagrangian", s.seed, t);
    for (const auto& p : plan.tangent_points()) {
      const auto c = p.coords();
      acc.add(c, at_sample("lagrangian", c, [&] { return lagrangian_residual(s.A, s.conn, p); }));
    }
    return {acc.finish()};
  }
  if (check == "zero_section") {
    const TwoFormTM Omega = s.omega_tm ? *s.omega_tm : lift_two_form(s.spec());
    return {zero_section_agreement(Omega, s.conn, plan, t)};
  }
  throw ScenarioError("$.checks", "unknown check name '" + check + "'");
}

}  // namespace detail

/// Runs every requested check. Throws SampleEvaluationError, DegenerateTensorError
/// or DerivativeDepthError when evaluation itself fails.
inline RunReport run_scenario(const Scenario& s) {
  RunReport rep{s.name, s.seed, {}};
  for (const auto& c : s.checks) rep.checks.push_back({c, detail::run_check(s, c)});
  return rep;
}

namespace detail {

inline json number_json(double v) {
  if (std::isfinite(v)) return v;
  return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}

inline double json_number(const json& j) {
  if (j.is_number()) return j.get<double>();
  const auto s = j.get<std::string>();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace detail

inline json to_json(const ResidualReport& r) {
  json offenders = json::array();
  for (const auto& o : r.offenders) offenders.push_back({{"point", o.point}, {"residual", detail::number_json(o.residual)}});
  return {{"name", r.name},
          {"samples", r.samples},
          {"max_residual", detail::number_json(r.max_residual)},
          {"tolerance", r.tolerance},
          {"verdict", r.passed ? "pass" : "fail"},
          {"offenders", offenders}};
}

inline json to_json(const RunReport& rep) {
  json checks = json::array();
  for (const auto& c : rep.checks)
    for (const auto& r : c.reports) checks.push_back(to_json(r));
  return {{"scenario", rep.scenario}, {"seed", rep.seed}, {"checks", checks}, {"verdict", rep.passed() ? "pass" : "fail"}};
}

/// Human-readable summary of a JSON report.
inline std::string render_text(const json& report) {
  std::ostringstream os;
  os << "scenario " << report.at("scenario").get<std::string>() << " (seed " << report.at("seed").get<std::uint64_t>()
     << ")\n";
  for (const auto& c : report.at("checks")) {
    char line[160];
    std::snprintf(line, sizeof line, "  %-26s max %-12.4g tol %-10.3g %s\n", c.at("name").get<std::string>().c_str(),
                  detail::json_number(c.at("max_residual")), c.at("tolerance").get<double>(),
                  c.at("verdict") == "pass" ? "PASS" : "FAIL");
    os << line;
    if (c.at("verdict") != "pass")
      for (const auto& o : c.at("offenders")) {
        os << "      at (";
        const auto& pt = o.at("point");
        for (std::size_t i = 0; i < pt.size(); ++i) os << (i ? ", " : "") << pt[i].get<double>();
        os << ") residual " << detail::json_number(o.at("residual")) << "\n";
      }
  }
  os << "verdict: " << report.at("verdict").get<std::string>() << "\n";
  return os.str();
}

}  // namespace tmlift
