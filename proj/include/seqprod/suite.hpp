#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "seqprod/io.hpp"

namespace seqprod {

inline constexpr std::uint64_t kDefaultSeed = 1504;  // 0x5E0
inline constexpr std::size_t kMaxBlockDim = 8;

struct RunConfig {
  std::uint64_t seed = kDefaultSeed;
  std::vector<std::vector<std::size_t>> dims{{2}, {3}, {4}, {2, 2}};
  std::size_t samples = 100;
  Tolerances tol;
  std::optional<std::string> output_path;

  /// PreconditionViolated for samples == 0, an empty shape list, an empty
  /// shape, or a block dimension outside [1, kMaxBlockDim].
  void validate() const;
};

/// One property evaluated on one algebra shape (shape is empty for
/// properties tied to a fixed example).
struct PropertyResult {
  std::string suite;
  std::string name;
  std::vector<std::size_t> shape;
  bool passed = false;
  double residual = 0.0;
  std::size_t samples = 0;
  Json witness;  // null unless failed
  Json details;  // null or object
};

const std::vector<std::string>& suite_names();                          // without "all"
std::vector<std::string> property_names(const std::string& suite);      // UnknownName

/// Every property of the suite ("all" runs every suite), in a fixed order.
std::vector<PropertyResult> run_suite(const std::string& suite, const RunConfig& config);
/// A single property across config.dims.
std::vector<PropertyResult> run_property(const std::string& suite, const std::string& property,
                                         const RunConfig& config);

bool all_passed(const std::vector<PropertyResult>& results);
Json to_json(const PropertyResult& r);
/// {"schema": 1, "command", "suite", "seed", "samples", "dims", "passed",
/// "properties": [...]}
Json suite_report(const std::string& suite, const RunConfig& config, const std::vector<PropertyResult>& results);

struct CommandReport {
  Json report;  // carries "schema": 1
  bool expected = false;
};

const std::vector<std::string>& counterexample_names();
/// Reproduces a built-in counterexample; `expected` holds iff the intended
/// axiom fails and the other three pass. UnknownName for other names.
CommandReport counterexample_report(const std::string& name, const RunConfig& config);

/// A map given either by Kraus operators ("kraus") or by its matrix on the
/// matrix-unit basis ("matrix"), together with "source" and "target".
BlockLinearMap linear_map_from_json(const Json& j, const Tolerances& tol = kDefaultTolerances);

/// {positive, 2-positive, completely-positive, unital, contractive,
/// multiplicative, projection-preserving} plus supporting numbers.
Json certify_report(const BlockLinearMap& f, const RunConfig& config);

}  // namespace seqprod
