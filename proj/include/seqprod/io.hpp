#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "seqprod/axioms.hpp"

namespace seqprod {

using Json = nlohmann::ordered_json;

/// Square matrices: {"dim": n, "entries": [[re, im], ...]} in row-major order.
/// Rectangular matrices carry "rows" and "cols" instead of "dim".
Json to_json(const CMatrix& m);
CMatrix matrix_from_json(const Json& j);

Json to_json(const Algebra& algebra);
Algebra algebra_from_json(const Json& j);

/// {"algebra": [n1, ...], "blocks": [matrix, ...]}
Json to_json(const Element& a);
Element element_from_json(const Json& j);
Effect effect_from_json(const Json& j, const Tolerances& tol = kDefaultTolerances);
Projection projection_from_json(const Json& j, const Tolerances& tol = kDefaultTolerances);

/// {"source": [...], "target": [...], "kraus": {"i->j": [matrix, ...]}}
/// with each Kraus operator n_i x n_j and f(a) = sum K* a K.
Json to_json(const Process& f);
Process process_from_json(const Json& j, const Tolerances& tol = kDefaultTolerances);

Json to_json(const Witness& w);
Json to_json(const AxiomResult& r);
Json to_json(const AxiomReport& r);

/// Reads and parses a JSON file; ParseError on I/O or syntax problems.
Json load_json(const std::filesystem::path& path);

}  // namespace seqprod
