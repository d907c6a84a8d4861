#pragma once

/**
 * @file fixtures.hpp
 * @brief Named example scenarios with their expected verdicts.
 *
 * Every fixture is written as scenario JSON first and then parsed, so the
 * exported files and the in-memory objects cannot drift apart.
 */

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "tmlift/scenario.hpp"

namespace tmlift {

class UnknownFixtureError : public std::invalid_argument {
 public:
  explicit UnknownFixtureError(const std::string& name) : std::invalid_argument("unknown fixture '" + name + "'") {}
};

struct Fixture {
  std::string name;
  std::string provenance;
  json document;                       // scenario JSON, as exported
  Scenario scenario;                   // the parsed document
  std::map<std::string, bool> expected;  // check name -> should pass

  std::size_t dim() const noexcept { return scenario.dim; }
  const Box& box() const noexcept { return scenario.box; }
  LiftSpec spec() const { return scenario.spec(); }
};

namespace detail {

struct FixtureRecipe {
  const char* name;
  const char* provenance;
  const char* body;  // scenario JSON without name/note/expect
  std::map<std::string, bool> expected;
};

inline const std::vector<FixtureRecipe>& fixture_recipes() {
  static const std::vector<FixtureRecipe> recipes{
      {"canonical",
       "Flat connection with A the identity: the lift is the canonical symplectic form of the tangent bundle.",
       R"js({"dim": 2, "box": [[-1, 1], [-1, 1]], "A": [["1", "0"], ["0", "1"]]})js",
       {{"codazzi", true}, {"prop1", true}, {"prop2", true}, {"closedness", true}, {"nondegeneracy", true},
        {"brackets", true}, {"dlambda", true}, {"lagrangian", true}, {"zero_section", true}}},
      {"flat-two-forms",
       "Flat connection, constant nondegenerate omega0 = 2 dx1^dx2, constant symplectic omega1 = dx1^dx2, "
       "A = 0. The lift is symplectic.",
       R"js({"dim": 2, "box": [[-1, 1], [-1, 1]], "omega0": [["2"]], "omega1": [["1"]]})js",
       {{"prop1", true}, {"closedness", true}, {"nondegeneracy", true}, {"brackets", true}, {"dlambda", true},
        {"zero_section", true}}},
      {"affine-group",
       "The affine group {(a,b): a>0} with (a,b)(c,e) = (ac, ae+b), coordinates x1 = a, x2 = b. "
       "omega1 = da^db / a^2 is left-invariant, omega0 = da^db / a is right-invariant. The flat connection makes the "
       "right-invariant fields a d/da + b d/db and d/db parallel: Gamma_11^1 = Gamma_21^2 = -1/a, others 0 (it has "
       "torsion). A = 0.",
       R"js({"dim": 2, "box": [[0.5, 2], [-1, 1]],
           "gamma": [[["-1/x1", "0"], ["0", "0"]], [["0", "-1/x1"], ["0", "0"]]],
           "omega0": [["1/x1"]], "omega1": [["1/x1^2"]]})js",
       {{"prop1", true}, {"closedness", true}, {"nondegeneracy", true}, {"brackets", true}, {"dlambda", true},
        {"zero_section", true}}},
      {"exp-codazzi",
       "Flat connection, alpha_i = exp(sum_k b_ki x^k) with B = diag(1, 2), A = nabla alpha; the "
       "component matrix of A is (B D)^T with D = diag(alpha).",
       R"js({"dim": 2, "box": [[-1, 1], [-1, 1]], "alpha": ["exp(x1)", "exp(2*x2)"], "derive": ["nabla_alpha"]})js",
       {{"codazzi", true}, {"prop2", true}, {"closedness", true}, {"brackets", true}, {"lagrangian", true},
        {"zero_section", true}, {"nondegeneracy", true}}},
      {"exp-codazzi-nondiagonal",
       "Exponential one-form with the non-diagonal B = [[1, 1], [0, 1]]: alpha = (exp(x1), exp(x1 + x2)).",
       R"js({"dim": 2, "box": [[-1, 1], [-1, 1]], "alpha": ["exp(x1)", "exp(x1+x2)"], "derive": ["nabla_alpha"]})js",
       {{"codazzi", true}, {"prop2", true}, {"closedness", true}, {"brackets", true}, {"lagrangian", true},
        {"zero_section", true}, {"nondegeneracy", true}}},
      {"pseudo-riemannian",
       "Pseudo-Riemannian metric g = diag(1, x1^2) on x1 in [1, 2], Levi-Civita connection, spec (nabla, 0, 0, g); the lift "
       "equals the Liouville pullback. This metric is the Euclidean plane in polar coordinates, so R = 0.",
       R"js({"dim": 2, "box": [[1, 2], [-1, 1]], "g": [["1", "0"], ["0", "x1^2"]], "A": [["1", "0"], ["0", "x1^2"]],
           "derive": ["levi_civita"]})js",
       {{"codazzi", true}, {"prop2", true}, {"closedness", true}, {"brackets", true}, {"lagrangian", true},
        {"zero_section", true}, {"nondegeneracy", true}}},
      {"round-sphere",
       "Metric example with genuine curvature: the round sphere g = diag(1, sin(x1)^2) on x1 in [0.5, 2.5], "
       "Levi-Civita connection, spec (nabla, 0, 0, g).",
       R"js({"dim": 2, "box": [[0.5, 2.5], [-1, 1]], "g": [["1", "0"], ["0", "sin(x1)^2"]],
           "A": [["1", "0"], ["0", "sin(x1)^2"]], "derive": ["levi_civita"]})js",
       {{"codazzi", true}, {"prop2", true}, {"closedness", true}, {"brackets", true}, {"lagrangian", true},
        {"zero_section", true}, {"nondegeneracy", true}}},
      {"symplectic-connection",
       "Symplectic connection: omega = dx1^dx2 with the flat torsion-free connection (nabla omega = 0), spec (nabla, 0, 0, "
       "omega).",
       R"js({"dim": 2, "box": [[-1, 1], [-1, 1]], "A": [["0", "1"], ["-1", "0"]]})js",
       {{"codazzi", true}, {"prop2", true}, {"closedness", true}, {"lagrangian", true}, {"zero_section", true},
        {"nondegeneracy", true}}},
      {"broken-codazzi",
       "Negative control: flat connection, A = [[1, x1], [0, 1]] violates Codazzi (residual 1 for X = d1, Y = d2, "
       "Z = d1), so every equivalent assertion fails. The closedness identities themselves still hold.",
       R"js({"dim": 2, "box": [[-1, 1], [-1, 1]], "A": [["1", "x1"], ["0", "1"]]})js",
       {{"codazzi", false}, {"prop2", false}, {"closedness", true}, {"zero_section", true}, {"nondegeneracy", true}}},
      {"nonparallel-omega0",
       "Negative control: flat connection, omega0 = (1 + x1) dx1^dx2 is not parallel, omega1 = dx1^dx2, A = 0; the "
       "lift is not closed.",
       R"js({"dim": 2, "box": [[0, 1], [-1, 1]], "omega0": [["1+x1"]], "omega1": [["1"]]})js",
       {{"prop1", false}, {"closedness", true}, {"dlambda", true}, {"nondegeneracy", true}, {"zero_section", true}}},
  };
  return recipes;
}

}  // namespace detail

inline std::vector<std::string> fixture_names() {
  std::vector<std::string> out;
  for (const auto& r : detail::fixture_recipes()) out.emplace_back(r.name);
  return out;
}

inline Fixture build_fixture(const std::string& name) {
  for (const auto& r : detail::fixture_recipes()) {
    if (name != r.name) continue;
    json doc = json::parse(r.body);
    doc["name"] = r.name;
    doc["note"] = r.provenance;
    json checks = json::array();
    json expect = json::object();
    for (const auto& [check, pass] : r.expected) {
      checks.push_back(check);
      expect[check] = pass ? "pass" : "fail";
    }
    doc["checks"] = checks;
    doc["expect"] = expect;
    doc["samples"] = 50;
    doc["seed"] = 42;
    Scenario s = parse_scenario(doc);
    return {r.name, r.provenance, doc, std::move(s), r.expected};
  }
  throw UnknownFixtureError(name);
}

}  // namespace tmlift
