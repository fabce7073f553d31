#include "seqprod/io.hpp"

#include <fstream>
#include <sstream>

namespace seqprod {

namespace {

[[noreturn]] void parse_error(const std::string& what) { throw Error(ErrorCode::ParseError, what); }

const Json& field(const Json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) parse_error(std::string("missing field \"") + name + "\"");
  return j.at(name);
}

std::size_t size_field(const Json& j, const char* name) {
  const Json& v = field(j, name);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
    parse_error(std::string("\"") + name + "\" must be a non-negative integer");
  return v.get<std::size_t>();
}

Route parse_route(const std::string& key) {
  const auto arrow = key.find("->");
  if (arrow == std::string::npos) parse_error("route key \"" + key + "\" is not of the form i->j");
  try {
    std::size_t used_i = 0;
    std::size_t used_j = 0;
    const std::string left = key.substr(0, arrow);
    const std::string right = key.substr(arrow + 2);
    const auto i = std::stoul(left, &used_i);
    const auto j = std::stoul(right, &used_j);
    if (used_i != left.size() || used_j != right.size()) throw std::invalid_argument(key);
    return {i, j};
  } catch (const std::logic_error&) {
    parse_error("route key \"" + key + "\" is not of the form i->j");
  }
}

}  // namespace

Json to_json(const CMatrix& m) {
  Json out;
  if (m.is_square()) {
    out["dim"] = m.rows();
  } else {
    out["rows"] = m.rows();
    out["cols"] = m.cols();
  }
  Json entries = Json::array();
  for (const auto& z : m.data()) entries.push_back({z.real(), z.imag()});
  out["entries"] = std::move(entries);
  return out;
}

CMatrix matrix_from_json(const Json& j) {
  std::size_t rows = 0;
  std::size_t cols = 0;
  if (j.is_object() && j.contains("dim")) {
    rows = cols = size_field(j, "dim");
  } else {
    rows = size_field(j, "rows");
    cols = size_field(j, "cols");
  }
  const Json& entries = field(j, "entries");
  if (!entries.is_array() || entries.size() != rows * cols)
    parse_error("matrix needs " + std::to_string(rows * cols) + " entries");
  CMatrix out(rows, cols);
  std::size_t k = 0;
  for (const auto& e : entries) {
    if (e.is_number()) {
      out.data()[k++] = e.get<double>();
    } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
      out.data()[k++] = Complex(e[0].get<double>(), e[1].get<double>());
    } else {
      parse_error("matrix entries are numbers or [re, im] pairs");
    }
  }
  if (!out.all_finite()) parse_error("matrix entries must be finite");
  return out;
}

Json to_json(const Algebra& algebra) { return Json(algebra.block_dims()); }

Algebra algebra_from_json(const Json& j) {
  if (!j.is_array()) parse_error("algebra is a list of block dimensions");
  std::vector<std::size_t> dims;
  for (const auto& d : j) {
    if (!d.is_number_integer() || d.get<long long>() <= 0) parse_error("block dimensions are positive integers");
    dims.push_back(d.get<std::size_t>());
  }
  return Algebra(std::move(dims));
}

Json to_json(const Element& a) {
  Json out;
  out["algebra"] = to_json(a.algebra());
  Json blocks = Json::array();
  for (const auto& b : a.blocks()) blocks.push_back(to_json(b));
  out["blocks"] = std::move(blocks);
  return out;
}

Element element_from_json(const Json& j) {
  const Algebra algebra = algebra_from_json(field(j, "algebra"));
  const Json& blocks = field(j, "blocks");
  if (!blocks.is_array() || blocks.size() != algebra.block_count()) parse_error("one matrix per block expected");
  std::vector<CMatrix> mats;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    CMatrix m = matrix_from_json(blocks[i]);
    if (m.rows() != algebra.block_dim(i) || m.cols() != algebra.block_dim(i))
      parse_error("block " + std::to_string(i) + " has the wrong shape");
    mats.push_back(std::move(m));
  }
  return {algebra, std::move(mats)};
}

Effect effect_from_json(const Json& j, const Tolerances& tol) { return Effect(element_from_json(j), tol); }

Projection projection_from_json(const Json& j, const Tolerances& tol) {
  return Projection(element_from_json(j), tol);
}

Json to_json(const Process& f) {
  Json out;
  out["source"] = to_json(f.source());
  out["target"] = to_json(f.target());
  Json kraus = Json::object();
  for (const auto& [route, list] : f.kraus()) {
    Json ops = Json::array();
    for (const auto& k : list) ops.push_back(to_json(k));
    kraus[std::to_string(route.first) + "->" + std::to_string(route.second)] = std::move(ops);
  }
  out["kraus"] = std::move(kraus);
  return out;
}

Process process_from_json(const Json& j, const Tolerances& tol) {
  const Algebra source = algebra_from_json(field(j, "source"));
  const Algebra target = algebra_from_json(field(j, "target"));
  const Json& kraus = field(j, "kraus");
  if (!kraus.is_object()) parse_error("\"kraus\" maps route keys i->j to operator lists");
  Process::KrausMap map;
  for (const auto& [key, ops] : kraus.items()) {
    const Route route = parse_route(key);
    if (!ops.is_array()) parse_error("route " + key + " needs a list of operators");
    auto& list = map[route];
    for (const auto& op : ops) list.push_back(matrix_from_json(op));
  }
  return {source, target, std::move(map), tol};
}

Json to_json(const Witness& w) {
  Json out;
  out["p"] = to_json(w.p.element());
  if (w.q) out["q"] = to_json(w.q->element());
  if (w.e1) out["e1"] = to_json(w.e1->element());
  if (w.e2) out["e2"] = to_json(w.e2->element());
  if (!w.map.empty()) out["map"] = w.map;
  out["violation"] = w.violation;
  return out;
}

Json to_json(const AxiomResult& r) {
  Json out;
  out["axiom"] = to_string(r.axiom);
  out["status"] = to_string(r.status);
  out["max_residual"] = r.max_residual;
  if (!r.detail.empty()) out["detail"] = r.detail;
  if (!r.metrics.empty()) {
    Json metrics = Json::object();
    for (const auto& [k, v] : r.metrics) metrics[k] = v;
    out["metrics"] = std::move(metrics);
  }
  if (r.witness) out["witness"] = to_json(*r.witness);
  return out;
}

Json to_json(const AxiomReport& r) {
  Json out;
  out["candidate"] = r.candidate;
  Json results = Json::array();
  for (const auto& x : r.results) results.push_back(to_json(x));
  out["results"] = std::move(results);
  return out;
}

Json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) parse_error("cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return Json::parse(buffer.str());
  } catch (const nlohmann::json::parse_error& e) {
    parse_error(path.string() + ": " + e.what());
  }
}

}  // namespace seqprod
