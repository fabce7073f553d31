#include "seqprod/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "seqprod/suite.hpp"

namespace seqprod {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::uint64_t parse_seed(const std::string& text) {
  try {
    std::size_t used = 0;
    const auto value = std::stoull(text, &used, 0);
    if (used != text.size() || text.front() == '-') throw std::invalid_argument(text);
    return value;
  } catch (const std::logic_error&) {
    throw UsageError("invalid seed \"" + text + "\"");
  }
}

std::size_t parse_count(const std::string& text, const char* what) {
  try {
    std::size_t used = 0;
    const auto value = std::stoull(text, &used, 10);
    if (used != text.size() || text.front() == '-') throw std::invalid_argument(text);
    return value;
  } catch (const std::logic_error&) {
    throw UsageError(std::string("invalid ") + what + " \"" + text + "\"");
  }
}

// "2,2;3" -> {{2, 2}, {3}}
std::vector<std::vector<std::size_t>> parse_dims(const std::string& text) {
  std::vector<std::vector<std::size_t>> out;
  std::stringstream groups(text);
  std::string group;
  while (std::getline(groups, group, ';')) {
    std::vector<std::size_t> shape;
    std::stringstream items(group);
    std::string item;
    while (std::getline(items, item, ',')) shape.push_back(parse_count(item, "block dimension"));
    if (shape.empty()) throw UsageError("empty algebra shape in --dims \"" + text + "\"");
    out.push_back(std::move(shape));
  }
  if (out.empty()) throw UsageError("--dims needs at least one shape");
  return out;
}

void apply_tolerance(Tolerances& tol, const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos) throw UsageError("--tol expects name=value, got \"" + spec + "\"");
  const std::string name = spec.substr(0, eq);
  const std::string value = spec.substr(eq + 1);
  double x = 0.0;
  try {
    std::size_t used = 0;
    x = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
  } catch (const std::logic_error&) {
    throw UsageError("invalid tolerance value \"" + value + "\"");
  }
  if (!std::isfinite(x) || x < 0.0) throw UsageError("tolerance " + name + " must be finite and non-negative");
  if (!tol.set(name, x)) throw UsageError("unknown tolerance \"" + name + "\"");
}

std::string shape_text(const std::vector<std::size_t>& shape) {
  if (shape.empty()) return "-";
  std::string out;
  for (std::size_t k = 0; k < shape.size(); ++k) out += (k ? "+" : "") + std::to_string(shape[k]);
  return out;
}

std::string number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

void emit(const Json& report, bool as_json, const std::optional<std::string>& path, std::ostream& out) {
  if (path) {
    std::ofstream file(*path);
    if (!file) throw UsageError("cannot write " + *path);
    file << report.dump(2) << '\n';
  }
  if (as_json) out << report.dump(2) << '\n';
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sequential product verification toolkit", "seqprod"};
  app.require_subcommand(1);

  std::string seed_text;
  std::string samples_text;
  std::string dims_text;
  std::vector<std::string> tol_specs;
  std::string out_path;
  bool as_json = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", seed_text, "Base seed (default: $SEQPROD_SEED or 1504)");
    sub->add_option("--samples", samples_text, "Samples per property and shape");
    sub->add_option("--dims", dims_text, "Algebra shapes, e.g. \"2;3;2,2\"");
    sub->add_option("--tol", tol_specs, "Tolerance override name=value")->take_all();
    sub->add_option("--out", out_path, "Write the JSON report to this path");
    sub->add_flag("--json", as_json, "Print the JSON report");
  };

  std::string suite;
  auto* verify = app.add_subcommand("verify", "Run a property suite");
  verify->add_option("suite", suite, "linalg | effects | processes | universal | axioms | all")->required();
  add_common(verify);

  std::string example;
  auto* counter = app.add_subcommand("counterexample", "Reproduce a built-in counterexample");
  counter->add_option("name", example, "ax1-pqp | ax2-sign | ax4-phase")->required();
  add_common(counter);

  std::string map_path;
  auto* certify = app.add_subcommand("certify", "Certify a map given as JSON");
  certify->add_option("path", map_path, "Map file")->required();
  add_common(certify);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    err << "seqprod: " << e.what() << '\n';
    return kExitUsage;
  }

  RunConfig config;
  try {
    if (!seed_text.empty()) {
      config.seed = parse_seed(seed_text);
    } else if (const char* env = std::getenv("SEQPROD_SEED"); env != nullptr && *env != '\0') {
      config.seed = parse_seed(env);
    }
    if (!samples_text.empty()) config.samples = parse_count(samples_text, "sample count");
    if (!dims_text.empty()) config.dims = parse_dims(dims_text);
    for (const auto& spec : tol_specs) apply_tolerance(config.tol, spec);
    if (!out_path.empty()) config.output_path = out_path;
    config.validate();
  } catch (const UsageError& e) {
    err << "seqprod: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "seqprod: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (verify->parsed()) {
      if (suite != "all" && std::find(suite_names().begin(), suite_names().end(), suite) == suite_names().end())
        throw UsageError("unknown suite \"" + suite + "\"");
      const auto results = run_suite(suite, config);
      const bool passed = all_passed(results);
      emit(suite_report(suite, config, results), as_json, config.output_path, out);
      if (!as_json) {
        for (const auto& r : results)
          out << (r.passed ? "PASS " : "FAIL ") << r.suite << '/' << r.name << " [" << shape_text(r.shape)
              << "] residual=" << number(r.residual) << '\n';
        out << (passed ? "all properties passed" : "some properties failed") << '\n';
      }
      return passed ? kExitPass : kExitPropertyFailure;
    }
    if (counter->parsed()) {
      const auto& names = counterexample_names();
      if (std::find(names.begin(), names.end(), example) == names.end())
        throw UsageError("unknown counterexample \"" + example + "\"");
      const CommandReport r = counterexample_report(example, config);
      emit(r.report, as_json, config.output_path, out);
      if (!as_json) {
        out << example << ": witness " << (r.report["witness_reproduced"].get<bool>() ? "reproduced" : "NOT reproduced")
            << '\n';
        out << r.report["witness"].dump(2) << '\n';
        for (const auto& s : r.report["sampled"]) {
          out << "shape " << shape_text(s["shape"].get<std::vector<std::size_t>>()) << ':';
          for (const auto& a : s["report"]["results"])
            out << ' ' << a["axiom"].get<std::string>() << '=' << a["status"].get<std::string>();
          out << (s["matches_expected"].get<bool>() ? "" : "  (differs from the expected pattern)") << '\n';
        }
      }
      return r.expected ? kExitPass : kExitPropertyFailure;
    }
    const Json input = load_json(map_path);
    const BlockLinearMap f = linear_map_from_json(input, config.tol);
    const Json report = certify_report(f, config);
    emit(report, as_json, config.output_path, out);
    if (!as_json)
      for (const auto& [k, v] : report["certificate"].items()) out << k << ": " << (v.get<bool>() ? "true" : "false") << '\n';
    return kExitPass;
  } catch (const UsageError& e) {
    err << "seqprod: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "seqprod: " << to_string(e.code()) << ": " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace seqprod
