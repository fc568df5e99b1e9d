#pragma once

// Scenario execution: a scenario names an operation, its models, an initial
// submeasure, test functions and parameters. canonicalize() resolves every
// reference inline and fills defaults; execute() runs the canonical form.

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "submeasure/correspondence.hpp"
#include "submeasure/dynamics.hpp"
#include "submeasure/error.hpp"
#include "submeasure/intersection.hpp"
#include "submeasure/io.hpp"
#include "submeasure/sft.hpp"
#include "submeasure/strong_submeasure.hpp"

namespace submeasure::scenario {

using io::Json;

/// Operation id -> default parameters.
inline const std::map<std::string, Json>& operations() {
  static const std::map<std::string, Json> table{
      {"eval", Json::object()},
      {"set_value", {{"mode", "closed"}}},
      {"pushforward", Json::object()},
      {"pullback", Json::object()},
      {"cesaro", {{"n", 20}}},
      {"inv_leq", {{"tol", 1e-9}, {"max_iter", 0}}},
      {"inv_geq", {{"tol", 1e-9}, {"max_iter", 0}}},
      {"entropy", {{"tol", 1e-9}}},
      {"intersect", {{"tol", 1e-9}}},
      {"key_inequality", {{"depth", 2}, {"tol", 1e-9}}},
      {"kahler", Json::object()},
  };
  return table;
}

inline bool needs_model(const std::string& op) {
  return op != "intersect" && op != "kahler" && !(op == "eval" || op == "set_value");
}

/// Resolves model and family references against `base` and fills parameter
/// defaults. The result is self-contained and replayable.
inline Json canonicalize(const Json& scenario, const std::filesystem::path& base) {
  if (!scenario.is_object()) io::schema_error("$", "scenario must be an object");
  const std::string op = io::as_string(io::require(scenario, "op", "$"), "$.op");
  auto known = operations().find(op);
  if (known == operations().end()) io::schema_error("$.op", "unknown operation '" + op + "'");
  static const std::set<std::string> fields{"name", "op", "model", "models", "space", "family", "family2",
                                            "initial", "functions", "sets", "params"};
  for (const auto& [k, v] : scenario.items())
    if (!fields.count(k)) io::schema_error("$." + k, "unknown field");

  Json out{{"op", op}};
  if (scenario.contains("name")) out["name"] = io::as_string(scenario["name"], "$.name");
  if (scenario.contains("model")) {
    out["model"] = io::resolve_reference(scenario["model"], base, "$.model", io::builtin_models());
  } else if (needs_model(op)) {
    io::schema_error("$.model", "operation '" + op + "' needs a model");
  }
  if (op == "kahler") {
    const Json& list = io::require(scenario, "models", "$");
    if (!list.is_array() || list.empty()) io::schema_error("$.models", "expected a nonempty list");
    Json models = Json::array();
    for (std::size_t i = 0; i < list.size(); ++i)
      models.push_back(io::resolve_reference(list[i], base, "$.models[" + std::to_string(i) + "]", io::builtin_models()));
    out["models"] = std::move(models);
  }
  if (op == "intersect") {
    out["family"] = io::resolve_reference(io::require(scenario, "family", "$"), base, "$.family", io::builtin_families());
    if (scenario.contains("family2"))
      out["family2"] = io::resolve_reference(scenario["family2"], base, "$.family2", io::builtin_families());
  }
  if ((op == "eval" || op == "set_value") && !scenario.contains("model")) {
    const Json& s = io::require(scenario, "space", "$");
    out["space"] = s.is_string() ? io::resolve_reference(s, base, "$.space", {}) : s;
  }
  for (const char* key : {"initial", "functions", "sets"})
    if (scenario.contains(key)) out[key] = scenario[key];

  Json params = known->second;
  if (scenario.contains("params")) {
    const Json& p = scenario["params"];
    if (!p.is_object()) io::schema_error("$.params", "expected an object");
    for (const auto& [k, v] : p.items()) {
      if (!params.contains(k)) io::schema_error("$.params." + k, "unknown parameter for '" + op + "'");
      if (params[k].is_number() && !v.is_number()) io::schema_error("$.params." + k, "expected a number");
      if (params[k].is_string() && !v.is_string()) io::schema_error("$.params." + k, "expected a string");
      params[k] = v;
    }
  }
  out["params"] = std::move(params);
  return out;
}

// ---------------------------------------------------------------------------
// Execution helpers.

inline std::string describe(const FunctionVector& phi) {
  const auto& v = phi.values();
  std::size_t nonzero = 0, at = 0;
  bool constant = true;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] != 0.0) {
      ++nonzero;
      at = i;
    }
    if (v[i] != v[0]) constant = false;
  }
  if (nonzero == 1 && v[at] == 1.0) return "1_" + phi.space()->label(at);
  if (constant) return "const " + Json(v[0]).dump();
  if (std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0 || x == 1.0; })) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i)
      if (v[i] == 1.0) out += (out.empty() ? "" : ",") + phi.space()->label(i);
    return "1_{" + out + "}";
  }
  return "custom";
}

/// The requested test functions on `space`: a list, or "indicator" (default)
/// or "audit" (indicators and the constants 1, -1).
inline std::vector<FunctionVector> functions_on(const Json& inputs, const SpaceRef& space) {
  if (!inputs.contains("functions")) return indicator_basis(space);
  const Json& f = inputs["functions"];
  if (f.is_string()) {
    if (f == "indicator") return indicator_basis(space);
    if (f == "audit") return audit_basis(space);
    io::schema_error("$.functions", "expected \"indicator\", \"audit\" or a list");
  }
  if (!f.is_array()) io::schema_error("$.functions", "expected a list of functions");
  std::vector<FunctionVector> out;
  for (std::size_t i = 0; i < f.size(); ++i) out.push_back(io::parse_function(f[i], space, "$.functions[" + std::to_string(i) + "]"));
  return out;
}

inline Json labels_of(const std::vector<FunctionVector>& fs) {
  Json out = Json::array();
  for (const auto& phi : fs) out.push_back(describe(phi));
  return out;
}

inline Json values_of(const StrongSubmeasure& mu, const std::vector<FunctionVector>& fs) {
  Json out = Json::array();
  for (const auto& phi : fs) out.push_back(mu.eval(phi));
  return out;
}

/// Initial submeasure on `space`. Besides the submeasure forms it accepts
/// {seed: "subinvariant", point} and {seed: "superinvariant"} on an
/// endomorphism.
inline StrongSubmeasure initial_on(const Json& inputs, const SpaceRef& space, const Correspondence* f) {
  if (!inputs.contains("initial")) io::schema_error("$.initial", "missing field");
  const Json& j = inputs["initial"];
  if (j.is_object() && j.contains("seed")) {
    if (!f) io::schema_error("$.initial.seed", "seeds need an endomorphism model");
    const std::string kind = io::as_string(j["seed"], "$.initial.seed");
    if (kind == "subinvariant")
      return subinvariant_seed(*f, io::parse_point(io::require(j, "point", "$.initial"), *space, "$.initial.point"));
    if (kind == "superinvariant") return superinvariant_seed(*f);
    io::schema_error("$.initial.seed", "expected \"subinvariant\" or \"superinvariant\"");
  }
  return io::parse_submeasure(j, space, "$.initial");
}

inline Json trace_table(const std::vector<FunctionVector>& basis, const std::vector<std::vector<double>>& rows) {
  return Json{{"basis", labels_of(basis)}, {"iterates", rows}};
}

inline double param(const Json& inputs, const char* key) { return inputs["params"][key].get<double>(); }

inline std::size_t count_param(const Json& inputs, const char* key) {
  return io::as_count(inputs["params"][key], std::string("$.params.") + key);
}

struct Outcome {
  Json results;
  Json traces;
};

/// Runs a canonical scenario.
inline Outcome execute(const Json& inputs) {
  const std::string op = inputs["op"].get<std::string>();
  Outcome out{Json::object(), Json::object()};
  std::optional<Correspondence> model;
  if (inputs.contains("model")) model = io::load_model(inputs["model"], "$.model");

  if (op == "eval" || op == "set_value") {
    const SpaceRef space = model ? model->source() : io::parse_space(inputs["space"], "$.space");
    const StrongSubmeasure mu = initial_on(inputs, space, model ? &*model : nullptr);
    if (op == "eval") {
      const auto fs = functions_on(inputs, space);
      Json values = Json::array();
      for (const auto& phi : fs) values.push_back(extend_usc(mu, phi).value);
      const NormReport n = norm_and_mass(mu);
      out.results = {{"functions", labels_of(fs)},
                     {"values", std::move(values)},
                     {"mass_plus", n.mass_plus},
                     {"mass_minus", n.mass_minus},
                     {"norm", n.norm},
                     {"norm_exact", n.exact},
                     {"positive", mu.positive()}};
    } else {
      const std::string mode = inputs["params"]["mode"].get<std::string>();
      if (mode != "closed" && mode != "open") io::schema_error("$.params.mode", "expected \"closed\" or \"open\"");
      const Json& sets = io::require(inputs, "sets", "$");
      if (!sets.is_array()) io::schema_error("$.sets", "expected a list of point lists");
      Json values = Json::array();
      for (std::size_t i = 0; i < sets.size(); ++i) {
        const PointSet a = io::parse_point_set(sets[i], *space, "$.sets[" + std::to_string(i) + "]");
        values.push_back(set_value(mu, a, mode == "open" ? SetMode::kOpen : SetMode::kClosed));
      }
      out.results = {{"values", std::move(values)}};
    }
    return out;
  }

  if (op == "pushforward" || op == "pullback") {
    const bool push = op == "pushforward";
    const SpaceRef from = push ? model->source() : model->target();
    const SpaceRef to = push ? model->target() : model->source();
    const StrongSubmeasure mu = initial_on(inputs, from, model->is_endo() ? &*model : nullptr);
    const auto fs = functions_on(inputs, to);
    Json values = Json::array();
    if (mu.positive()) {
      const StrongSubmeasure image = push ? pushforward_submeasure(*model, mu) : pullback_submeasure(*model, mu);
      for (const auto& phi : fs) values.push_back(image.eval(phi));
      out.results["submeasure"] = io::to_json(image);
      out.results["mass"] = image.eval(FunctionVector::constant(to, 1.0));
    } else {
      for (const auto& phi : fs) values.push_back(push ? pushforward_value(*model, mu, phi) : pullback_value(*model, mu, phi));
    }
    out.results["functions"] = labels_of(fs);
    out.results["values"] = std::move(values);
    return out;
  }

  if (op == "cesaro") {
    const StrongSubmeasure mu0 = initial_on(inputs, model->source(), &*model);
    const auto run = cesaro_run(*model, mu0, count_param(inputs, "n"));
    const auto fs = functions_on(inputs, model->source());
    out.results = {{"functions", labels_of(fs)},
                   {"values", values_of(run.average, fs)},
                   {"defect", run.defect},
                   {"average", io::to_json(run.average)}};
    out.traces = trace_table(audit_basis(model->source()), run.iterates);
    return out;
  }

  if (op == "inv_leq" || op == "inv_geq") {
    const StrongSubmeasure mu0 = initial_on(inputs, model->source(), &*model);
    FixedPointOptions opt;
    opt.tol = param(inputs, "tol");
    opt.max_iter = count_param(inputs, "max_iter");
    const auto r = op == "inv_leq" ? inv_leq(*model, mu0, opt) : inv_geq(*model, mu0, opt);
    const auto fs = functions_on(inputs, model->source());
    out.results = {{"functions", labels_of(fs)},
                   {"values", values_of(r.limit, fs)},
                   {"iterations", r.iterations},
                   {"residual", r.residual},
                   {"limit", io::to_json(r.limit)}};
    out.traces = trace_table(audit_basis(model->source()), r.trace);
    return out;
  }

  if (op == "entropy") {
    const OrbitSFT sft = build_orbit_sft(*model);
    out.results["topological"] = topological_entropy(sft);
    if (inputs.contains("initial")) {
      const StrongSubmeasure mu = initial_on(inputs, model->source(), &*model);
      const auto h = submeasure_entropy(sft, mu, param(inputs, "tol"));
      out.results["submeasure"] = {{"value", h.value}, {"exact", h.exact}, {"witness_marginal", h.witness_marginal}};
    }
    return out;
  }

  if (op == "key_inequality") {
    const OrbitSFT sft = build_orbit_sft(*model);
    const WordSpace ws = build_word_space(sft, count_param(inputs, "depth"));
    const StrongSubmeasure muhat = initial_on(inputs, ws.space, nullptr);
    const auto rep = key_inequality_check(sft, ws, muhat, param(inputs, "tol"));
    Json witnesses = Json::array();
    for (std::size_t j : rep.strict_witnesses) witnesses.push_back(sft.space()->label(j));
    out.results = {{"holds", rep.holds},
                   {"dominated", rep.dominated},
                   {"lhs", rep.lhs},
                   {"rhs", rep.rhs},
                   {"strict_witnesses", std::move(witnesses)}};
    return out;
  }

  if (op == "kahler") {
    std::vector<Correspondence> models;
    Json each = Json::array();
    for (std::size_t i = 0; i < inputs["models"].size(); ++i) {
      models.push_back(io::load_model(inputs["models"][i], "$.models[" + std::to_string(i) + "]"));
      each.push_back(topological_entropy(build_orbit_sft(models.back())));
    }
    out.results = {{"value", kahler_entropy(models)}, {"per_model", std::move(each)}};
    return out;
  }

  // intersect
  const SignedFamily fam = io::load_family(inputs["family"], "$.family");
  const double tol = param(inputs, "tol");
  const auto fs = functions_on(inputs, fam.space());
  const StrongSubmeasure lambda = least_negative(fam, tol);
  Json minimal = Json::array();
  for (const auto& m : kappa_minimal_members(fam, tol)) minimal.push_back(io::to_json(m));
  out.results = {{"kappa", kappa(fam)},
                 {"minimal_members", std::move(minimal)},
                 {"functions", labels_of(fs)},
                 {"lambda_values", values_of(lambda, fs)},
                 {"mass", lambda.eval(FunctionVector::constant(fam.space(), 1.0))}};
  if (inputs.contains("family2")) {
    const SignedFamily fam2 = io::load_family(inputs["family2"], "$.family2");
    const StrongSubmeasure l2 = least_negative(fam2, tol);
    const StrongSubmeasure sum = least_negative(family_sum(fam, fam2), tol);
    Json separate = Json::array();
    for (const auto& phi : fs) separate.push_back(lambda.eval(phi) + l2.eval(phi));
    out.results["second"] = {{"kappa", kappa(fam2)}, {"lambda_values", values_of(l2, fs)}};
    out.results["sum"] = {{"kappa", kappa(family_sum(fam, fam2))},
                          {"lambda_values", values_of(sum, fs)},
                          {"separate_values", std::move(separate)}};
    out.results["precedes"] = precedes(fam, fam2, tol);
    out.results["preceded_by"] = precedes(fam2, fam, tol);
  }
  return out;
}

}  // namespace submeasure::scenario
