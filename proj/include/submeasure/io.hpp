#pragma once

// JSON model files: spaces, measures, submeasures, functions, correspondences
// and signed families, plus the named builder registry. Schema errors carry a
// "$..." path to the offending node.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "submeasure/correspondence.hpp"
#include "submeasure/error.hpp"
#include "submeasure/intersection.hpp"
#include "submeasure/measure.hpp"
#include "submeasure/models.hpp"
#include "submeasure/space.hpp"
#include "submeasure/strong_submeasure.hpp"

namespace submeasure::io {

using Json = nlohmann::json;

[[noreturn]] inline void schema_error(const std::string& path, const std::string& message) {
  throw Error(ErrorCode::kSchema, message, path);
}

/// Re-raises a model error from a constructor with the JSON path prepended.
[[noreturn]] inline void rethrow_at(const std::string& path, const Error& e) {
  throw Error(e.code(), e.what(), path);
}

inline const Json& require(const Json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) schema_error(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) schema_error(path + "." + key, "missing field");
  return *it;
}

inline double as_number(const Json& j, const std::string& path) {
  if (!j.is_number()) schema_error(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) schema_error(path, "number is not finite");
  return v;
}

inline std::size_t as_count(const Json& j, const std::string& path) {
  if (!j.is_number_integer() || j.get<long long>() < 0) schema_error(path, "expected a nonnegative integer");
  return j.get<std::size_t>();
}

inline std::string as_string(const Json& j, const std::string& path) {
  if (!j.is_string()) schema_error(path, "expected a string");
  return j.get<std::string>();
}

/// Parses text, reporting the byte offset of a syntax error.
inline Json parse_text(const std::string& text, const std::string& origin) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    schema_error("$", origin + ": malformed JSON at byte " + std::to_string(e.byte));
  }
}

inline Json read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kInvalidArgument, "cannot open '" + path.string() + "'", "$");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_text(buf.str(), path.string());
}

// ---------------------------------------------------------------------------
// Points and spaces.

/// A point given by label, or by index when an integer.
inline std::size_t parse_point(const Json& j, const FiniteSpace& space, const std::string& path) {
  if (j.is_number_integer()) {
    const long long i = j.get<long long>();
    if (i < 0 || static_cast<std::size_t>(i) >= space.size()) schema_error(path, "point index out of range");
    return static_cast<std::size_t>(i);
  }
  const std::string label = as_string(j, path);
  auto idx = space.find(label);
  if (!idx) schema_error(path, "unknown point '" + label + "'");
  return *idx;
}

/// A list of points, or the name of a subset, or "all".
inline PointSet parse_point_set(const Json& j, const FiniteSpace& space, const std::string& path) {
  if (j.is_string()) {
    const std::string name = j.get<std::string>();
    if (name == "all") return space.all_points();
    auto it = space.subsets().find(name);
    if (it == space.subsets().end()) schema_error(path, "unknown subset '" + name + "'");
    return it->second;
  }
  if (!j.is_array()) schema_error(path, "expected a list of points or a subset name");
  PointSet out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(parse_point(j[i], space, path + "[" + std::to_string(i) + "]"));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

inline SpaceRef parse_space(const Json& j, const std::string& path) {
  const Json& pts = require(j, "points", path);
  if (!pts.is_array() || pts.empty()) schema_error(path + ".points", "expected a nonempty list of labels");
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < pts.size(); ++i) labels.push_back(as_string(pts[i], path + ".points[" + std::to_string(i) + "]"));
  std::optional<Matrix> metric;
  if (auto it = j.find("metric"); it != j.end()) {
    const std::string mp = path + ".metric";
    if (!it->is_array() || it->size() != labels.size()) schema_error(mp, "expected a square matrix");
    Matrix m(labels.size(), labels.size());
    for (std::size_t r = 0; r < labels.size(); ++r) {
      const Json& row = (*it)[r];
      const std::string rp = mp + "[" + std::to_string(r) + "]";
      if (!row.is_array() || row.size() != labels.size()) schema_error(rp, "expected a row of length " + std::to_string(labels.size()));
      for (std::size_t c = 0; c < labels.size(); ++c) m(r, c) = as_number(row[c], rp + "[" + std::to_string(c) + "]");
    }
    metric = std::move(m);
  }
  // Subsets name labels, so resolve them against a plain copy first.
  std::map<std::string, PointSet> subsets;
  try {
    FiniteSpace plain(labels);
    if (auto it = j.find("subsets"); it != j.end()) {
      if (!it->is_object()) schema_error(path + ".subsets", "expected an object");
      for (const auto& [name, list] : it->items()) {
        const std::string sp = path + ".subsets." + name;
        if (!list.is_array()) schema_error(sp, "expected a list of points");
        subsets[name] = parse_point_set(list, plain, sp);
      }
    }
    return std::make_shared<const FiniteSpace>(std::move(labels), std::move(metric), std::move(subsets));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kSchema) throw;
    rethrow_at(path, e);
  }
}

inline Json to_json(const FiniteSpace& space) {
  Json j;
  j["points"] = space.labels();
  if (!space.subsets().empty()) {
    Json subs = Json::object();
    for (const auto& [name, pts] : space.subsets()) {
      Json list = Json::array();
      for (std::size_t p : pts) list.push_back(space.label(p));
      subs[name] = std::move(list);
    }
    j["subsets"] = std::move(subs);
  }
  if (space.metric()) {
    Json rows = Json::array();
    for (std::size_t r = 0; r < space.size(); ++r) rows.push_back((*space.metric()).row(r));
    j["metric"] = std::move(rows);
  }
  return j;
}

// ---------------------------------------------------------------------------
// Measures, submeasures and functions.

inline SignedMeasure parse_measure(const Json& j, const SpaceRef& space, const std::string& path) {
  const Json& w = require(j, "weights", path);
  std::vector<double> weights(space->size(), 0.0);
  const std::string wp = path + ".weights";
  if (w.is_object()) {
    for (const auto& [label, v] : w.items()) {
      auto idx = space->find(label);
      if (!idx) schema_error(wp + "." + label, "unknown point '" + label + "'");
      weights[*idx] = as_number(v, wp + "." + label);
    }
  } else if (w.is_array()) {
    if (w.size() != space->size()) schema_error(wp, "expected " + std::to_string(space->size()) + " weights");
    for (std::size_t i = 0; i < w.size(); ++i) weights[i] = as_number(w[i], wp + "[" + std::to_string(i) + "]");
  } else {
    schema_error(wp, "expected an object of label weights");
  }
  return SignedMeasure(space, std::move(weights));
}

inline Json to_json(const SignedMeasure& m) {
  Json w = Json::object();
  for (std::size_t i = 0; i < m.weights().size(); ++i)
    if (m.weights()[i] != 0.0) w[m.space()->label(i)] = m.weights()[i];
  return Json{{"weights", std::move(w)}};
}

inline std::vector<SignedMeasure> parse_measure_list(const Json& j, const SpaceRef& space, const std::string& path) {
  if (!j.is_array() || j.empty()) schema_error(path, "expected a nonempty list of measures");
  std::vector<SignedMeasure> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(parse_measure(j[i], space, path + "[" + std::to_string(i) + "]"));
  return out;
}

/// {generators:[measure]}, {blocks:[[measure]]} (a sum of sups),
/// {measure: measure}, or {sup_diracs: points, mass: c}.
inline StrongSubmeasure parse_submeasure(const Json& j, const SpaceRef& space, const std::string& path) {
  if (!j.is_object()) schema_error(path, "expected a submeasure object");
  if (j.contains("generators")) return StrongSubmeasure(space, parse_measure_list(j["generators"], space, path + ".generators"));
  if (j.contains("blocks")) {
    const Json& b = j["blocks"];
    if (!b.is_array() || b.empty()) schema_error(path + ".blocks", "expected a nonempty list of generator lists");
    std::optional<StrongSubmeasure> acc;
    for (std::size_t i = 0; i < b.size(); ++i) {
      StrongSubmeasure part(space, parse_measure_list(b[i], space, path + ".blocks[" + std::to_string(i) + "]"));
      acc = acc ? acc->plus(part) : part;
    }
    return *acc;
  }
  if (j.contains("measure")) return StrongSubmeasure::from_measure(parse_measure(j["measure"], space, path + ".measure"));
  if (j.contains("sup_diracs")) {
    const PointSet pts = parse_point_set(j["sup_diracs"], *space, path + ".sup_diracs");
    if (pts.empty()) schema_error(path + ".sup_diracs", "expected at least one point");
    const double mass = j.contains("mass") ? as_number(j["mass"], path + ".mass") : 1.0;
    return StrongSubmeasure::sup_of_diracs(space, pts, mass);
  }
  schema_error(path, "expected one of generators, blocks, measure, sup_diracs");
}

inline Json to_json(const StrongSubmeasure& mu, std::size_t cap = 4096) {
  Json j;
  if (mu.blocks().size() == 1 || mu.generator_count() <= cap) {
    Json gens = Json::array();
    for (const auto& g : mu.generators()) gens.push_back(to_json(g));
    j["generators"] = std::move(gens);
  } else {
    Json blocks = Json::array();
    for (const auto& b : mu.blocks()) {
      Json list = Json::array();
      for (const auto& w : b) list.push_back(to_json(SignedMeasure(mu.space(), w)));
      blocks.push_back(std::move(list));
    }
    j["blocks"] = std::move(blocks);
  }
  return j;
}

/// {values:{label:v}}, {indicator: points}, or {constant: c}.
inline FunctionVector parse_function(const Json& j, const SpaceRef& space, const std::string& path) {
  if (!j.is_object()) schema_error(path, "expected a function object");
  if (j.contains("values")) {
    const Json& v = j["values"];
    std::vector<double> vals(space->size(), 0.0);
    if (v.is_object()) {
      for (const auto& [label, x] : v.items()) {
        auto idx = space->find(label);
        if (!idx) schema_error(path + ".values." + label, "unknown point '" + label + "'");
        vals[*idx] = as_number(x, path + ".values." + label);
      }
    } else if (v.is_array() && v.size() == space->size()) {
      for (std::size_t i = 0; i < v.size(); ++i) vals[i] = as_number(v[i], path + ".values[" + std::to_string(i) + "]");
    } else {
      schema_error(path + ".values", "expected label values or a full list");
    }
    return FunctionVector(space, std::move(vals));
  }
  if (j.contains("indicator")) return FunctionVector::indicator(space, parse_point_set(j["indicator"], *space, path + ".indicator"));
  if (j.contains("constant")) return FunctionVector::constant(space, as_number(j["constant"], path + ".constant"));
  schema_error(path, "expected one of values, indicator, constant");
}

inline Json to_json(const FunctionVector& phi) {
  Json v = Json::object();
  for (std::size_t i = 0; i < phi.size(); ++i) v[phi.space()->label(i)] = phi[i];
  return Json{{"values", std::move(v)}};
}

// ---------------------------------------------------------------------------
// Correspondences.

inline LimitGroup parse_limit_pair_list(const Json& j, const FiniteSpace& source, const std::string& path) {
  if (!j.is_array() || j.empty()) schema_error(path, "expected a nonempty list of [x, w] pairs");
  LimitGroup g;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string p = path + "[" + std::to_string(i) + "]";
    if (!j[i].is_array() || j[i].size() != 2) schema_error(p, "expected [x, w]");
    g.emplace_back(parse_point(j[i][0], source, p + "[0]"), as_number(j[i][1], p + "[1]"));
  }
  return g;
}

/// limit_fibers entries: a list of [x, w] pairs (one group per pair) or a
/// list of groups, each a list of [x, w] pairs.
inline LimitFibers parse_limit_fibers(const Json& j, const FiniteSpace& source, const FiniteSpace& target,
                                      const std::string& path) {
  if (!j.is_object()) schema_error(path, "expected an object keyed by target labels");
  LimitFibers out;
  for (const auto& [label, entry] : j.items()) {
    const std::string p = path + "." + label;
    auto y = target.find(label);
    if (!y) schema_error(p, "unknown target point '" + label + "'");
    if (!entry.is_array() || entry.empty()) schema_error(p, "expected a nonempty list");
    std::vector<LimitGroup> groups;
    const bool grouped = entry[0].is_array() && !entry[0].empty() && entry[0][0].is_array();
    if (grouped) {
      for (std::size_t i = 0; i < entry.size(); ++i)
        groups.push_back(parse_limit_pair_list(entry[i], source, p + "[" + std::to_string(i) + "]"));
    } else {
      for (auto& [x, w] : parse_limit_pair_list(entry, source, p)) groups.push_back({{x, w}});
    }
    out[*y] = std::move(groups);
  }
  return out;
}

/// {space} for an endomorphism or {source, target}; edges [[x, y, m]];
/// optional indeterminacy, generic_degree (default 1), limit_fibers and
/// equal_dimension (default true).
inline Correspondence parse_correspondence(const Json& j, const std::string& path) {
  if (!j.is_object()) schema_error(path, "expected a correspondence object");
  SpaceRef source, target;
  if (j.contains("space")) {
    source = target = parse_space(j["space"], path + ".space");
  } else {
    source = parse_space(require(j, "source", path), path + ".source");
    target = parse_space(require(j, "target", path), path + ".target");
  }
  const Json& e = require(j, "edges", path);
  if (!e.is_array()) schema_error(path + ".edges", "expected a list of [x, y, m]");
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < e.size(); ++i) {
    const std::string p = path + ".edges[" + std::to_string(i) + "]";
    if (!e[i].is_array() || e[i].size() < 2 || e[i].size() > 3) schema_error(p, "expected [x, y] or [x, y, m]");
    unsigned m = 1;
    if (e[i].size() == 3) {
      if (!e[i][2].is_number_integer() || e[i][2].get<long long>() < 1)
        schema_error(p + "[2]", "multiplicity must be a positive integer");
      m = e[i][2].get<unsigned>();
    }
    edges.push_back({parse_point(e[i][0], *source, p + "[0]"), parse_point(e[i][1], *target, p + "[1]"), m});
  }
  CorrespondenceOptions opt;
  if (j.contains("indeterminacy")) opt.indeterminacy = parse_point_set(j["indeterminacy"], *source, path + ".indeterminacy");
  if (j.contains("limit_fibers")) opt.limit_fibers = parse_limit_fibers(j["limit_fibers"], *source, *target, path + ".limit_fibers");
  if (j.contains("equal_dimension")) {
    if (!j["equal_dimension"].is_boolean()) schema_error(path + ".equal_dimension", "expected a boolean");
    opt.equal_dimension = j["equal_dimension"].get<bool>();
  }
  unsigned degree = 1;
  if (j.contains("generic_degree")) {
    const Json& d = j["generic_degree"];
    if (!d.is_number_integer() || d.get<long long>() < 1) schema_error(path + ".generic_degree", "expected a positive integer");
    degree = d.get<unsigned>();
  }
  try {
    return Correspondence(source, target, std::move(edges), degree, std::move(opt));
  } catch (const Error& err) {
    rethrow_at(path, err);
  }
}

inline Json to_json(const Correspondence& f) {
  Json j;
  const bool endo = f.is_endo();
  if (endo) {
    j["space"] = to_json(*f.source());
  } else {
    j["source"] = to_json(*f.source());
    j["target"] = to_json(*f.target());
  }
  Json edges = Json::array();
  for (const auto& e : f.edges()) edges.push_back(Json::array({f.source()->label(e.x), f.target()->label(e.y), e.multiplicity}));
  j["edges"] = std::move(edges);
  Json indet = Json::array();
  for (std::size_t x : f.indeterminacy()) indet.push_back(f.source()->label(x));
  j["indeterminacy"] = std::move(indet);
  j["generic_degree"] = f.generic_degree();
  j["equal_dimension"] = f.equal_dimension();
  if (!f.limit_fibers().empty()) {
    Json lf = Json::object();
    for (const auto& [y, groups] : f.limit_fibers()) {
      bool singletons = true;
      for (const auto& g : groups) singletons = singletons && g.size() == 1;
      Json list = Json::array();
      for (const auto& g : groups) {
        Json pairs = Json::array();
        for (const auto& [x, w] : g) pairs.push_back(Json::array({f.source()->label(x), w}));
        if (singletons) {
          list.push_back(pairs[0]);
        } else {
          list.push_back(std::move(pairs));
        }
      }
      lf[f.target()->label(y)] = std::move(list);
    }
    j["limit_fibers"] = std::move(lf);
  }
  return j;
}

// ---------------------------------------------------------------------------
// Families.

inline SignedFamily parse_family(const Json& j, const std::string& path) {
  SpaceRef space = parse_space(require(j, "space", path), path + ".space");
  auto members = parse_measure_list(require(j, "members", path), space, path + ".members");
  std::vector<SignedMeasure> limits;
  if (j.contains("declared_limits") && !j["declared_limits"].empty())
    limits = parse_measure_list(j["declared_limits"], space, path + ".declared_limits");
  const double c = as_number(require(j, "intersection_number", path), path + ".intersection_number");
  try {
    return SignedFamily(space, std::move(members), std::move(limits), c);
  } catch (const Error& e) {
    rethrow_at(path, e);
  }
}

inline Json to_json(const SignedFamily& f) {
  Json members = Json::array(), limits = Json::array();
  for (const auto& m : f.members()) members.push_back(to_json(m));
  for (const auto& m : f.declared_limits()) limits.push_back(to_json(m));
  return Json{{"space", to_json(*f.space())},
              {"members", std::move(members)},
              {"declared_limits", std::move(limits)},
              {"intersection_number", f.intersection_number()}};
}

// ---------------------------------------------------------------------------
// Builder registry.

inline std::size_t arg_count(const Json& args, const std::string& key, std::size_t fallback, const std::string& path) {
  if (!args.is_object() || !args.contains(key)) return fallback;
  return as_count(args[key], path + ".args." + key);
}

/// Named correspondence builders with their default arguments.
inline const std::map<std::string, Json>& builtin_models() {
  static const std::map<std::string, Json> table{
      {"blowup", {{"n_base", 5}, {"n_fiber", 4}}},
      {"cremona", {{"n_line", 3}, {"n_approach", 3}}},
      {"transcendental", {{"n_net", 20}}},
      {"attractor", {{"chain", 4}}},
      {"full_shift", {{"k", 2}}},
      {"golden_mean", Json::object()},
      {"cycle", {{"k", 5}}},
      {"identity", {{"k", 3}}},
      {"compactification_small", Json::object()},
      {"compactification_large", Json::object()},
  };
  return table;
}

inline const std::map<std::string, Json>& builtin_families() {
  static const std::map<std::string, Json> table{
      {"line_P2", {{"n", 4}}},
      {"exceptional_E", {{"n", 3}}},
      {"split_line_1", Json::object()},
      {"split_line_2", Json::object()},
  };
  return table;
}

/// Arguments merged over the builder defaults, so the canonical form is complete.
inline Json resolved_args(const std::map<std::string, Json>& table, const std::string& name, const Json& args,
                          const std::string& path) {
  auto it = table.find(name);
  if (it == table.end()) schema_error(path + ".builtin", "unknown builtin '" + name + "'");
  Json out = it->second;
  if (!args.is_null()) {
    if (!args.is_object()) schema_error(path + ".args", "expected an object");
    for (const auto& [k, v] : args.items()) {
      if (!out.contains(k)) schema_error(path + ".args." + k, "unknown argument for '" + name + "'");
      out[k] = v;
    }
  }
  return out;
}

inline Correspondence build_builtin_model(const std::string& name, const Json& args, const std::string& path) {
  const Json a = resolved_args(builtin_models(), name, args, path);
  auto n = [&](const char* key) { return arg_count(a, key, 0, path); };
  try {
    if (name == "blowup") return build_blowup_model(n("n_base"), n("n_fiber")).pi;
    if (name == "cremona") return build_cremona_model(n("n_line"), n("n_approach")).map;
    if (name == "transcendental") return build_transcendental_model(n("n_net")).map;
    if (name == "attractor") return build_attractor_model(n("chain"));
    if (name == "full_shift") return build_full_shift_model(n("k"));
    if (name == "golden_mean") return build_golden_mean_model();
    if (name == "cycle") return build_cycle_model(n("k"));
    if (name == "identity") return build_identity_model(n("k"));
    if (name == "compactification_small") return build_compactification_pair().first;
    return build_compactification_pair().second;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kSchema) throw;
    rethrow_at(path, e);
  }
}

inline SignedFamily build_builtin_family(const std::string& name, const Json& args, const std::string& path) {
  const Json a = resolved_args(builtin_families(), name, args, path);
  try {
    if (name == "line_P2") return build_divisor_model(DivisorKind::kLineP2, arg_count(a, "n", 0, path));
    if (name == "exceptional_E") return build_divisor_model(DivisorKind::kExceptionalE, arg_count(a, "n", 0, path));
    if (name == "split_line_1") return build_split_line_pair().first;
    return build_split_line_pair().second;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kSchema) throw;
    rethrow_at(path, e);
  }
}

/// Resolves a reference: a file path (relative to base), an inline object, or
/// {builtin, args}. Returns the inline JSON form for canonical reports.
inline Json resolve_reference(const Json& ref, const std::filesystem::path& base, const std::string& path,
                              const std::map<std::string, Json>& builtins) {
  if (ref.is_string()) {
    std::filesystem::path p = ref.get<std::string>();
    if (p.is_relative()) p = base / p;
    try {
      return read_file(p);
    } catch (const Error& e) {
      throw Error(e.code(), e.what(), path);
    }
  }
  if (!ref.is_object()) schema_error(path, "expected a file path, an inline object or a builtin");
  if (ref.contains("builtin")) {
    const std::string name = as_string(ref["builtin"], path + ".builtin");
    return Json{{"builtin", name},
                {"args", resolved_args(builtins, name, ref.contains("args") ? ref["args"] : Json(), path)}};
  }
  return ref;
}

inline Correspondence load_model(const Json& resolved, const std::string& path) {
  if (resolved.is_object() && resolved.contains("builtin"))
    return build_builtin_model(as_string(resolved["builtin"], path + ".builtin"), resolved.value("args", Json()), path);
  return parse_correspondence(resolved, path);
}

inline SignedFamily load_family(const Json& resolved, const std::string& path) {
  if (resolved.is_object() && resolved.contains("builtin"))
    return build_builtin_family(as_string(resolved["builtin"], path + ".builtin"), resolved.value("args", Json()), path);
  return parse_family(resolved, path);
}

}  // namespace submeasure::io
