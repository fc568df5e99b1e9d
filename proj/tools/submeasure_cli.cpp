// submeasure: command-line front end for the finite-model library.

#include <openssl/evp.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "submeasure/io.hpp"
#include "submeasure/scenario.hpp"
#include "verify_suite.hpp"

namespace fs = std::filesystem;
using submeasure::Error;
using submeasure::ErrorCode;
using submeasure::io::Json;

namespace {

enum class LogLevel { kQuiet, kInfo, kDebug };

LogLevel log_level() {
  const char* env = std::getenv("SUBMEASURE_LOG");
  if (!env) return LogLevel::kInfo;
  const std::string v = env;
  if (v == "quiet") return LogLevel::kQuiet;
  if (v == "debug") return LogLevel::kDebug;
  return LogLevel::kInfo;
}

void log(LogLevel at, const std::string& message) {
  if (log_level() >= at) std::cerr << "[submeasure] " << message << "\n";
}

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSchema:
    case ErrorCode::kInvalidModel:
    case ErrorCode::kSpaceMismatch:
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kPrecondition:
    case ErrorCode::kNotPositive:
      return 2;
    case ErrorCode::kNonConvergence:
    case ErrorCode::kUnboundedNorm:
      return 3;
    default:
      return 1;
  }
}

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw Error(ErrorCode::kInvalidArgument, "SHA-256 failed", "digest");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

/// JSON text, or @path to read it from a file.
Json json_argument(const std::string& text, const std::string& what) {
  if (!text.empty() && text[0] == '@') return submeasure::io::read_file(text.substr(1));
  return submeasure::io::parse_text(text, what);
}

/// --model: inline JSON, builtin:name[:k=v,...], or a file path.
Json model_argument(const std::string& text) {
  if (!text.empty() && text[0] == '{') return submeasure::io::parse_text(text, "--model");
  if (text.rfind("builtin:", 0) == 0) {
    std::string rest = text.substr(8);
    Json ref{{"builtin", rest.substr(0, rest.find(':'))}};
    if (auto colon = rest.find(':'); colon != std::string::npos) {
      Json args = Json::object();
      std::stringstream list(rest.substr(colon + 1));
      std::string item;
      while (std::getline(list, item, ',')) {
        auto eq = item.find('=');
        if (eq == std::string::npos) throw Error(ErrorCode::kSchema, "expected k=v in '" + item + "'", "--model");
        args[item.substr(0, eq)] = submeasure::io::parse_text(item.substr(eq + 1), "--model");
      }
      ref["args"] = std::move(args);
    }
    return ref;
  }
  return Json(text);
}

void flatten_csv(const Json& j, const std::string& path, std::ostream& out) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten_csv(v, path.empty() ? k : path + "/" + k, out);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten_csv(j[i], path + "/" + std::to_string(i), out);
  } else {
    out << path << "," << j.dump() << "\n";
  }
}

void emit(const Json& report, const std::string& format, const std::string& out_path) {
  std::ostringstream text;
  if (format == "csv") {
    text << "path,value\n";
    flatten_csv(report.at("results"), "", text);
  } else {
    text << report.dump(2) << "\n";
  }
  if (out_path.empty()) {
    std::cout << text.str();
    return;
  }
  std::ofstream f(out_path);
  if (!f) throw Error(ErrorCode::kInvalidArgument, "cannot write '" + out_path + "'", "--out");
  f << text.str();
}

struct Options {
  std::string model, scenario, out, format = "json", initial, family, family2, direction = "leq";
  std::vector<std::string> functions;
  std::vector<std::string> sets;
  std::optional<double> tol;
  std::optional<std::size_t> max_iter, n, depth;
  std::uint64_t seed = 20240607;
  bool timings = false;
};

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--model", o.model, "Model: file path, inline JSON, or builtin:name[:k=v,...]");
  sub->add_option("--scenario", o.scenario, "Scenario or report JSON file");
  sub->add_option("--out", o.out, "Write the report here instead of stdout");
  sub->add_option("--seed", o.seed, "Random seed");
  sub->add_option("--tol", o.tol, "Tolerance");
  sub->add_option("--max-iter", o.max_iter, "Iteration cap (0 selects 10 |X|^2)");
  sub->add_option("--format", o.format, "Report format")->check(CLI::IsMember({"json", "csv"}));
  sub->add_flag("--timings", o.timings, "Include wall-clock timings in the report");
  sub->add_option("--initial", o.initial, "Initial submeasure as JSON text or @file");
  sub->add_option("--function", o.functions, "Test function as JSON text or @file (repeatable)");
}

/// Builds the scenario for a subcommand from its scenario file and flags.
Json scenario_from(const std::string& op, const Options& o, fs::path& base) {
  Json sc = Json::object();
  base = fs::current_path();
  if (!o.scenario.empty()) {
    sc = submeasure::io::read_file(o.scenario);
    base = fs::absolute(o.scenario).parent_path();
    if (sc.is_object() && sc.contains("inputs_digest")) {
      const Json& inputs = submeasure::io::require(sc, "inputs", "$");
      if (sha256_hex(inputs.dump()) != sc["inputs_digest"])
        throw Error(ErrorCode::kSchema, "inputs do not match inputs_digest", "$.inputs_digest");
      log(LogLevel::kInfo, "replaying report " + sc["inputs_digest"].get<std::string>());
      sc = inputs;
    }
  }
  if (!sc.is_object()) throw Error(ErrorCode::kSchema, "scenario must be an object", "$");
  const bool keep_set_value = op == "eval" && sc.value("op", Json()) == "set_value";
  if (!op.empty() && !keep_set_value) sc["op"] = op;
  if (!o.model.empty()) sc["model"] = model_argument(o.model);
  if (!o.initial.empty()) sc["initial"] = json_argument(o.initial, "--initial");
  if (!o.family.empty()) sc["family"] = model_argument(o.family);
  if (!o.family2.empty()) sc["family2"] = model_argument(o.family2);
  if (!o.functions.empty()) {
    Json fns = Json::array();
    for (const auto& f : o.functions) fns.push_back(json_argument(f, "--function"));
    sc["functions"] = std::move(fns);
  }
  if (!o.sets.empty()) {
    Json sets = Json::array();
    for (const auto& s : o.sets) sets.push_back(json_argument(s, "--set"));
    sc["sets"] = std::move(sets);
  }
  if (!sc.contains("op")) throw Error(ErrorCode::kSchema, "missing field", "$.op");
  const std::string resolved_op = sc["op"].is_string() ? sc["op"].get<std::string>() : "";
  auto defaults = submeasure::scenario::operations().find(resolved_op);
  if (defaults != submeasure::scenario::operations().end()) {
    auto set_param = [&](const char* key, const Json& v) {
      if (defaults->second.contains(key)) sc["params"][key] = v;
    };
    if (o.tol) set_param("tol", *o.tol);
    if (o.max_iter) set_param("max_iter", *o.max_iter);
    if (o.n) set_param("n", *o.n);
    if (o.depth) set_param("depth", *o.depth);
  }
  return sc;
}

int run_scenario(const std::string& op, const Options& o) {
  const auto start = std::chrono::steady_clock::now();
  fs::path base;
  const Json sc = scenario_from(op, o, base);
  const Json inputs = submeasure::scenario::canonicalize(sc, base);
  log(LogLevel::kDebug, "inputs " + inputs.dump());
  const auto canon = std::chrono::steady_clock::now();
  auto outcome = submeasure::scenario::execute(inputs);
  const auto end = std::chrono::steady_clock::now();
  Json report{{"inputs", inputs},
              {"inputs_digest", sha256_hex(inputs.dump())},
              {"results", std::move(outcome.results)},
              {"traces", std::move(outcome.traces)}};
  if (o.timings) {
    using ms = std::chrono::duration<double, std::milli>;
    report["timings"] = {{"load_ms", ms(canon - start).count()}, {"execute_ms", ms(end - canon).count()}};
  }
  emit(report, o.format, o.out);
  log(LogLevel::kInfo, inputs["op"].get<std::string>() + " done");
  return 0;
}

int build_model(const std::string& name, const std::vector<std::string>& args, const Options& o) {
  Json a = Json::object();
  for (const auto& item : args) {
    auto eq = item.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::kSchema, "expected k=v in '" + item + "'", "--arg");
    a[item.substr(0, eq)] = submeasure::io::parse_text(item.substr(eq + 1), "--arg");
  }
  Json out;
  if (submeasure::io::builtin_models().count(name)) {
    out = submeasure::io::to_json(submeasure::io::build_builtin_model(name, a, "$"));
  } else if (submeasure::io::builtin_families().count(name)) {
    out = submeasure::io::to_json(submeasure::io::build_builtin_family(name, a, "$"));
  } else {
    throw Error(ErrorCode::kSchema, "unknown builtin '" + name + "'", "$.builtin");
  }
  std::ostringstream text;
  text << out.dump(2) << "\n";
  if (o.out.empty()) {
    std::cout << text.str();
  } else {
    std::ofstream f(o.out);
    if (!f) throw Error(ErrorCode::kInvalidArgument, "cannot write '" + o.out + "'", "--out");
    f << text.str();
  }
  return 0;
}

int run_verify(const std::string& filter, const Options& o) {
  const auto checks = submeasure::verify::registry();
  std::cout << "seed " << o.seed << "\n";
  std::size_t ran = 0, failed = 0;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    if (!submeasure::verify::matches(checks[i], filter)) continue;
    std::mt19937_64 rng(o.seed + i);
    const auto start = std::chrono::steady_clock::now();
    submeasure::verify::Outcome r;
    try {
      r = checks[i].run(rng);
    } catch (const Error& e) {
      r = {false, std::string("error at ") + e.where() + ": " + e.what()};
    }
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    ++ran;
    if (!r.pass) ++failed;
    std::cout << (r.pass ? "PASS " : "FAIL ") << checks[i].name << "  " << r.detail;
    if (o.timings) std::cout << "  (" << static_cast<long>(ms) << " ms)";
    std::cout << "\n";
  }
  if (ran == 0) {
    std::cerr << "no check matches '" << filter << "'\n";
    return 2;
  }
  std::cout << (ran - failed) << "/" << ran << " passed\n";
  return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Strong submeasures on finite models"};
  app.require_subcommand(1);
  Options o;
  std::string verify_filter, model_name;
  std::vector<std::string> model_args;

  auto* eval = app.add_subcommand("eval", "Evaluate a submeasure on test functions or sets");
  add_common(eval, o);
  eval->add_option("--set", o.sets, "Point set (JSON list) for set values (repeatable)");
  auto* push = app.add_subcommand("pushforward", "Push a submeasure forward along a model");
  add_common(push, o);
  auto* pull = app.add_subcommand("pullback", "Pull a submeasure back along a model");
  add_common(pull, o);
  auto* cesaro = app.add_subcommand("cesaro", "Cesaro averages of iterated pushforwards");
  add_common(cesaro, o);
  cesaro->add_option("--n", o.n, "Number of terms");
  auto* inv = app.add_subcommand("invariant", "Largest invariant below or smallest above a seed");
  add_common(inv, o);
  inv->add_option("--direction", o.direction, "leq or geq")->check(CLI::IsMember({"leq", "geq"}));
  auto* entropy = app.add_subcommand("entropy", "Topological and submeasure entropy");
  add_common(entropy, o);
  auto* intersect = app.add_subcommand("intersect", "Least negative intersection of a family");
  add_common(intersect, o);
  intersect->add_option("--family", o.family, "Family: file path, inline JSON, or builtin:name[:k=v,...]");
  intersect->add_option("--family2", o.family2, "Second family for sums and comparison");
  auto* run = app.add_subcommand("run", "Run a scenario file");
  add_common(run, o);
  run->add_option("--depth", o.depth, "Word depth for key_inequality");
  auto* build = app.add_subcommand("build-model", "Print a builtin model or family as JSON");
  build->add_option("name", model_name, "Builtin name")->required();
  build->add_option("--arg", model_args, "Builder argument k=v (repeatable)");
  build->add_option("--out", o.out, "Output file");
  auto* verify = app.add_subcommand("verify", "Run the built-in property suite");
  verify->add_option("--filter", verify_filter, "Check name or tag");
  verify->add_option("--seed", o.seed, "Random seed");
  verify->add_flag("--timings", o.timings, "Show per-check timings");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*build) return build_model(model_name, model_args, o);
    if (*verify) return run_verify(verify_filter, o);
    std::string op;
    if (*eval) op = o.sets.empty() ? "eval" : "set_value";
    if (*push) op = "pushforward";
    if (*pull) op = "pullback";
    if (*cesaro) op = "cesaro";
    if (*inv) op = o.direction == "leq" ? "inv_leq" : "inv_geq";
    if (*entropy) op = "entropy";
    if (*intersect) op = "intersect";
    return run_scenario(op, o);
  } catch (const Error& e) {
    std::cerr << "error (" << submeasure::to_string(e.code()) << ") " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
