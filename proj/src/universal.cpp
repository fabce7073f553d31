#include "seqprod/universal.hpp"

#include <algorithm>
#include <cmath>

#include "seqprod/random.hpp"

namespace seqprod {

Element CornerEmbedding::restrict(const Element& a) const {
  require_same_algebra(a.algebra(), parent, "corner restriction");
  std::vector<CMatrix> blocks;
  for (std::size_t c = 0; c < corner.block_count(); ++c) {
    const CMatrix& v = isometries[parent_block[c]];
    blocks.push_back(v.adjoint() * a.block(parent_block[c]) * v);
  }
  return {corner, std::move(blocks)};
}

Element CornerEmbedding::extend(const Element& b) const {
  require_same_algebra(b.algebra(), corner, "corner extension");
  auto out = Element::zero(parent);
  for (std::size_t c = 0; c < corner.block_count(); ++c) {
    const CMatrix& v = isometries[parent_block[c]];
    out.block(parent_block[c]) = v * b.block(c) * v.adjoint();
  }
  return out;
}

namespace {

// Columns of each block's eigenbasis selected by `keep`, ascending order.
template <typename Keep>
CornerEmbedding build_embedding(const Algebra& parent, const std::vector<EigenDecomposition>& eigs, Keep&& keep) {
  CornerEmbedding out{parent, Projection::zero(parent), {}, Algebra::zero(), {}, {}};
  std::vector<std::size_t> corner_dims;
  std::vector<CMatrix> projection_blocks;
  for (std::size_t i = 0; i < parent.block_count(); ++i) {
    const auto& eig = eigs[i];
    const std::size_t n = parent.block_dim(i);
    std::vector<CMatrix> cols;
    for (std::size_t k = 0; k < n; ++k)
      if (keep(eig, k)) cols.push_back(eig.eigenvectors.column(k));
    CMatrix v = cols.empty() ? CMatrix(n, 0) : CMatrix::hstack(cols);
    projection_blocks.push_back(cols.empty() ? CMatrix::zero(n) : CMatrix(v * v.adjoint()));
    if (!cols.empty()) {
      out.corner_block.emplace_back(corner_dims.size());
      out.parent_block.push_back(i);
      corner_dims.push_back(cols.size());
    } else {
      out.corner_block.emplace_back(std::nullopt);
    }
    out.isometries.push_back(std::move(v));
  }
  out.corner = Algebra(corner_dims);
  out.projection = Projection(Element(parent, std::move(projection_blocks)));
  return out;
}

}  // namespace

CornerEmbedding support_embedding(const Element& a, const Tolerances& tol) {
  std::vector<EigenDecomposition> eigs;
  for (const auto& b : a.blocks()) eigs.push_back(eig_hermitian(b, tol));
  return build_embedding(a.algebra(), eigs, [&](const EigenDecomposition& eig, std::size_t k) {
    return eig.eigenvalues[k] > rank_threshold(eig.max_eigenvalue(), tol);
  });
}

CornerEmbedding floor_embedding(const Effect& p, const Tolerances& tol) {
  std::vector<EigenDecomposition> eigs;
  const Element rest = Element::unit(p.algebra()) - p.element();
  for (const auto& b : rest.blocks()) eigs.push_back(eig_hermitian(b, tol));
  return build_embedding(p.algebra(), eigs, [&](const EigenDecomposition& eig, std::size_t k) {
    return eig.eigenvalues[k] <= rank_threshold(eig.max_eigenvalue(), tol);
  });
}

Process corner_process(const CornerEmbedding& embedding) {
  Process::KrausMap kraus;
  for (std::size_t c = 0; c < embedding.corner.block_count(); ++c) {
    const auto i = embedding.parent_block[c];
    kraus[{i, c}] = {embedding.isometries[i]};
  }
  return {embedding.parent, embedding.corner, std::move(kraus)};
}

Process compression_process(const CornerEmbedding& embedding, const Effect& p, const Tolerances& tol) {
  require_same_algebra(embedding.parent, p.algebra(), "compression");
  const Element root = sqrt_psd(p.element(), tol);
  Process::KrausMap kraus;
  for (std::size_t c = 0; c < embedding.corner.block_count(); ++c) {
    const auto i = embedding.parent_block[c];
    kraus[{c, i}] = {embedding.isometries[i].adjoint() * root.block(i)};
  }
  return {embedding.corner, embedding.parent, std::move(kraus), tol};
}

std::pair<CornerEmbedding, Process> make_corner(const Effect& p, const Tolerances& tol) {
  auto embedding = floor_embedding(p, tol);
  auto pi = corner_process(embedding);
  return {std::move(embedding), std::move(pi)};
}

std::pair<CornerEmbedding, Process> make_compression(const Effect& p, const Tolerances& tol) {
  auto embedding = support_embedding(p.element(), tol);
  auto c = compression_process(embedding, p, tol);
  return {std::move(embedding), std::move(c)};
}

namespace {

double max_basis_distance(const Process& lhs, const Process& rhs, const Tolerances& tol) {
  require_same_algebra(lhs.source(), rhs.source(), "comparing processes");
  double out = 0.0;
  for (const auto& e : Element::basis(lhs.source())) out = std::max(out, distance(lhs.apply(e), rhs.apply(e), tol));
  return out;
}

Tolerances mediator_tolerances(const Tolerances& tol) {
  Tolerances relaxed = tol;
  relaxed.contractive = std::max(tol.contractive, tol.factorization);
  return relaxed;
}

// Kraus operators K s V for a route m -> i of f, landing in corner block c.
Process compression_mediator(const Process& f, const CornerEmbedding& embedding, const Element& s,
                             const Tolerances& tol) {
  Process::KrausMap kraus;
  for (const auto& [route, list] : f.kraus()) {
    const auto c = embedding.corner_block[route.second];
    if (!c) continue;
    auto& out = kraus[{route.first, *c}];
    const CMatrix tail = s.block(route.second) * embedding.isometries[route.second];
    for (const auto& k : list) out.push_back(k * tail);
  }
  return {f.source(), embedding.corner, std::move(kraus), mediator_tolerances(tol)};
}

}  // namespace

double factorization_residual(const Process& outer, const Process& mediator, const Process& given,
                              const Tolerances& tol) {
  return max_basis_distance(compose(outer, mediator), given, tol);
}

FactorizationResult factor_through_compression(const Process& f, const Effect& p, const Tolerances& tol) {
  require_same_algebra(f.target(), p.algebra(), "factor_through_compression");
  if (!is_positive(p.element() - f.unit_image(), tol.precondition, tol))
    throw Error(ErrorCode::PreconditionViolated, "f(1) <= p fails");
  auto [embedding, c] = make_compression(p, tol);
  const Element s = pinv_psd(sqrt_psd(p.element(), tol), tol);
  Process mediator = compression_mediator(f, embedding, s, tol);
  const double residual = factorization_residual(c, mediator, f, tol);
  const bool unique = mediator_uniqueness_probe(c, f, tol);
  return {std::move(mediator), residual, unique};
}

LimitFactorization factor_through_compression_by_limit(const Process& f, const Effect& p, std::size_t n_max,
                                                       const Tolerances& tol) {
  require_same_algebra(f.target(), p.algebra(), "factor_through_compression_by_limit");
  if (n_max == 0) throw Error(ErrorCode::PreconditionViolated, "n_max must be positive");
  if (!is_positive(p.element() - f.unit_image(), tol.precondition, tol))
    throw Error(ErrorCode::PreconditionViolated, "f(1) <= p fails");
  auto [embedding, c] = make_compression(p, tol);

  std::vector<EigenDecomposition> eigs;
  for (const auto& b : p.element().blocks()) eigs.push_back(eig_hermitian(b, tol));
  auto cutoff = [&](std::size_t n) {
    std::vector<CMatrix> blocks;
    for (const auto& eig : eigs) {
      const double floor_ = rank_threshold(eig.max_eigenvalue(), tol);
      blocks.push_back(apply_function(eig, [&](double lambda) {
        const bool kept = lambda > floor_ && lambda * static_cast<double>(n) >= 1.0 - 1e-12;
        return Complex(kept ? 1.0 / std::sqrt(lambda) : 0.0);
      }));
    }
    return Element(p.algebra(), std::move(blocks));
  };

  const auto basis = Element::basis(f.source());
  std::vector<std::vector<Element>> values;  // values[n-1][basis index]
  std::vector<Element> cutoffs;
  for (std::size_t n = 1; n <= n_max; ++n) {
    const Element q = cutoff(n);
    std::vector<Element> row;
    for (const auto& b : basis) row.push_back(embedding.restrict(q * f.apply(b) * q));
    values.push_back(std::move(row));
    cutoffs.push_back(q);
  }

  LimitFactorization out{{compression_mediator(f, embedding, cutoffs.back(), tol), 0.0, false}, std::nullopt, {}};
  const auto& last = values.back();
  for (const auto& row : values) {
    double d = 0.0;
    for (std::size_t k = 0; k < row.size(); ++k) d = std::max(d, distance(row[k], last[k], tol));
    out.distance_to_last.push_back(d);
  }
  // Exact stabilization: identical blocks from some n onward.
  auto same = [&](const std::vector<Element>& a, const std::vector<Element>& b) {
    for (std::size_t k = 0; k < a.size(); ++k)
      if (a[k].blocks() != b[k].blocks()) return false;
    return true;
  };
  std::size_t first = n_max;
  while (first > 1 && same(values[first - 2], last)) --first;
  // Agreement with itself at n_max alone is no evidence of settling.
  if (first < n_max || n_max == 1) out.stabilized_at = first;

  out.result.residual = factorization_residual(c, out.result.mediator, f, tol);
  out.result.unique = mediator_uniqueness_probe(c, f, tol);
  return out;
}

namespace {

struct MatrixSolution {
  CMatrix solution;
  double residual = 0.0;
  CMatrix kernel;
};

// Least-squares O Y = G via the pseudoinverse of O*O.
MatrixSolution solve_matrix(const CMatrix& o, const CMatrix& g, const Tolerances& tol) {
  const CMatrix gram = o.adjoint() * o;
  MatrixSolution out;
  if (gram.rows() == 0) {
    out.solution = CMatrix(0, g.cols());
    out.residual = g.frobenius_norm();
    out.kernel = CMatrix(0, 0);
    return out;
  }
  const auto eig = eig_hermitian_unchecked(gram, tol);
  const double cut = rank_threshold(eig.max_eigenvalue(), tol);
  const CMatrix inverse = apply_function(eig, [cut](double x) { return Complex(x > cut ? 1.0 / x : 0.0); });
  out.solution = inverse * (o.adjoint() * g);
  out.residual = (o * out.solution - g).frobenius_norm();
  std::vector<CMatrix> cols;
  for (std::size_t k = 0; k < eig.eigenvalues.size(); ++k)
    if (eig.eigenvalues[k] <= cut) cols.push_back(eig.eigenvectors.column(k));
  out.kernel = cols.empty() ? CMatrix(gram.rows(), 0) : CMatrix::hstack(cols);
  return out;
}

bool is_process_map(const BlockLinearMap& x, const Tolerances& tol) {
  for (const auto& route : x.routes()) {
    const CMatrix c = x.choi(route);
    if (!is_self_adjoint(c, tol)) return false;
    const auto eig = eig_hermitian_unchecked(c, tol);
    if (eig.min_eigenvalue() < -tol.choi * std::max(1.0, eig.spectral_radius())) return false;
  }
  const Element one = x.apply(Element::unit(x.source()));
  if (!one.is_self_adjoint(tol)) return false;
  return one.hermitian_part().norm(tol) <= 1.0 + tol.contractive;
}

BlockLinearMap hermitize(const BlockLinearMap& d) {
  return BlockLinearMap::from_function(d.source(), d.target(), [&](const Element& b) {
    return (d.apply(b) + d.apply(b.adjoint()).adjoint()) * 0.5;
  });
}

// Map whose Choi matrices are the positive parts of those of d.
BlockLinearMap choi_positive_part(const BlockLinearMap& d, const Tolerances& tol) {
  CMatrix m(d.matrix().rows(), d.matrix().cols());
  for (const auto& route : d.routes()) {
    const auto [i, j] = route;
    const std::size_t n = d.source().block_dim(i);
    const std::size_t k = d.target().block_dim(j);
    const CMatrix plus = apply_function(eig_hermitian_unchecked(d.choi(route), tol),
                                        [](double x) { return Complex(std::max(x, 0.0)); });
    const std::size_t col0 = d.source().offset(i);
    const std::size_t row0 = d.target().offset(j);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t l = 0; l < n; ++l)
        for (std::size_t a = 0; a < k; ++a)
          for (std::size_t b = 0; b < k; ++b) m(row0 + a * k + b, col0 + r * n + l) = plus(r * k + a, l * k + b);
  }
  return {d.source(), d.target(), std::move(m)};
}

// x0 is a linear solution; `to_map` turns a matrix direction into a map and
// `project` maps a map back into the solution kernel (or returns nullopt).
template <typename ToMap, typename Project>
bool probe_kernel(const BlockLinearMap& x0, const CMatrix& kernel, std::size_t free_cols, ToMap&& to_map,
                  Project&& project, const Tolerances& tol) {
  if (kernel.cols() == 0) return true;
  Rng rng(0x5eed5eedULL);
  const double scale = std::max(1.0, x0.matrix().frobenius_norm());
  for (int trial = 0; trial < 4; ++trial) {
    const CMatrix direction = kernel * rng.gaussian(kernel.cols(), free_cols);
    const BlockLinearMap d = hermitize(to_map(direction));
    std::vector<BlockLinearMap> candidates;
    const double dn = d.matrix().frobenius_norm();
    if (dn > 0.0) {
      candidates.emplace_back(d.source(), d.target(), d.matrix() * (1.0 / dn));
      candidates.emplace_back(d.source(), d.target(), d.matrix() * (-1.0 / dn));
    }
    if (auto plus = project(choi_positive_part(d, tol))) {
      const double pn = plus->matrix().frobenius_norm();
      if (pn > 1e-12) candidates.emplace_back(plus->source(), plus->target(), plus->matrix() * (1.0 / pn));
    }
    for (const auto& cand : candidates)
      for (double t : {1e-1, 1e-3}) {
        const BlockLinearMap x(x0.source(), x0.target(), x0.matrix() + cand.matrix() * (t * scale));
        if (is_process_map(x, tol)) return false;
      }
  }
  return true;
}

}  // namespace

LinearSolution solve_linear_factorization(const BlockLinearMap& outer, const BlockLinearMap& given,
                                          const Tolerances& tol) {
  require_same_algebra(outer.target(), given.target(), "factorization targets");
  auto sol = solve_matrix(outer.matrix(), given.matrix(), tol);
  if (sol.residual > tol.factorization * std::max(1.0, given.matrix().frobenius_norm()))
    throw Error(ErrorCode::NoSolution, "outer o X = given is inconsistent");
  return {BlockLinearMap(given.source(), outer.source(), sol.solution), sol.residual, sol.kernel.cols(), sol.kernel};
}

bool mediator_uniqueness_probe(const Process& outer, const Process& given, const Tolerances& tol) {
  const auto o = outer.linear_map();
  const auto g = given.linear_map();
  const auto sol = solve_linear_factorization(o, g, tol);
  const CMatrix projector = sol.kernel * sol.kernel.adjoint();
  return probe_kernel(
      sol.solution, sol.kernel, g.matrix().cols(),
      [&](const CMatrix& m) { return BlockLinearMap(g.source(), o.source(), m); },
      [&](const BlockLinearMap& d) -> std::optional<BlockLinearMap> {
        return BlockLinearMap(d.source(), d.target(), projector * d.matrix());
      },
      tol);
}

bool mediator_uniqueness_probe_right(const Process& inner, const Process& given, const Tolerances& tol) {
  // X o inner = given  <=>  inner^T X^T = given^T
  const auto p = inner.linear_map();
  const auto g = given.linear_map();
  require_same_algebra(p.source(), g.source(), "factorization sources");
  auto sol = solve_matrix(p.matrix().transpose(), g.matrix().transpose(), tol);
  if (sol.residual > tol.factorization * std::max(1.0, g.matrix().frobenius_norm()))
    throw Error(ErrorCode::NoSolution, "X o inner = given is inconsistent");
  const BlockLinearMap x0(p.target(), g.target(), sol.solution.transpose());
  const CMatrix projector = sol.kernel * sol.kernel.adjoint();
  return probe_kernel(
      x0, sol.kernel, g.matrix().rows(),
      [&](const CMatrix& m) { return BlockLinearMap(p.target(), g.target(), m.transpose()); },
      [&](const BlockLinearMap& d) -> std::optional<BlockLinearMap> {
        return BlockLinearMap(d.source(), d.target(), (projector * d.matrix().transpose()).transpose());
      },
      tol);
}

FactorizationResult factor_through_corner(const Process& g, const Effect& p, const Tolerances& tol) {
  require_same_algebra(g.source(), p.algebra(), "factor_through_corner");
  if (distance(g.apply(p.element()), g.unit_image(), tol) > tol.precondition)
    throw Error(ErrorCode::PreconditionViolated, "g(p) != g(1)");
  auto [embedding, pi] = make_corner(p, tol);
  Process::KrausMap kraus;
  for (const auto& [route, list] : g.kraus()) {
    const auto c = embedding.corner_block[route.first];
    if (!c) continue;
    auto& out = kraus[{*c, route.second}];
    const CMatrix head = embedding.isometries[route.first].adjoint();
    for (const auto& l : list) out.push_back(head * l);
  }
  Process mediator(embedding.corner, g.target(), std::move(kraus), mediator_tolerances(tol));
  const double residual = max_basis_distance(compose(mediator, pi), g, tol);
  const bool unique = mediator_uniqueness_probe_right(pi, g, tol);
  return {std::move(mediator), residual, unique};
}

}  // namespace seqprod
