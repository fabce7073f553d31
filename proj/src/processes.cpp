#include "seqprod/processes.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "seqprod/random.hpp"

namespace seqprod {

namespace {

// Choi matrices of computed maps carry rounding, so symmetry is judged at the
// same scale as positivity.
bool choi_self_adjoint(const CMatrix& c, const Tolerances& tol) {
  return (c - c.adjoint()).frobenius_norm() <= tol.choi * std::max(1.0, c.frobenius_norm());
}

}  // namespace

// ---------------------------------------------------------------------------
// BlockLinearMap

BlockLinearMap::BlockLinearMap(Algebra source, Algebra target, CMatrix matrix)
    : source_(std::move(source)), target_(std::move(target)), matrix_(std::move(matrix)) {
  if (matrix_.rows() != target_.dimension() || matrix_.cols() != source_.dimension())
    throw Error(ErrorCode::ShapeMismatch, "linear map matrix does not match algebras");
}

BlockLinearMap BlockLinearMap::from_function(const Algebra& source, const Algebra& target,
                                             const std::function<Element(const Element&)>& fn) {
  CMatrix m(target.dimension(), source.dimension());
  const auto basis = Element::basis(source);
  for (std::size_t c = 0; c < basis.size(); ++c) {
    const Element image = fn(basis[c]);
    require_same_algebra(image.algebra(), target, "map image lies outside the target algebra");
    const auto v = image.to_vector();
    for (std::size_t r = 0; r < v.size(); ++r) m(r, c) = v[r];
  }
  return {source, target, std::move(m)};
}

BlockLinearMap BlockLinearMap::identity(const Algebra& algebra) {
  return {algebra, algebra, CMatrix::identity(algebra.dimension())};
}

BlockLinearMap BlockLinearMap::transpose(const Algebra& algebra) {
  return from_function(algebra, algebra, [](const Element& a) {
    auto out = a;
    for (std::size_t i = 0; i < out.blocks().size(); ++i) out.block(i) = a.block(i).transpose();
    return out;
  });
}

Element BlockLinearMap::apply(const Element& a) const {
  require_same_algebra(a.algebra(), source_, "linear map argument");
  const auto v = a.to_vector();
  std::vector<Complex> out(matrix_.rows(), Complex(0.0, 0.0));
  for (std::size_t r = 0; r < matrix_.rows(); ++r)
    for (std::size_t c = 0; c < matrix_.cols(); ++c) out[r] += matrix_(r, c) * v[c];
  return Element::from_vector(target_, out);
}

CMatrix BlockLinearMap::choi(const Route& route) const {
  const auto [i, j] = route;
  const std::size_t n = source_.block_dim(i);
  const std::size_t m = target_.block_dim(j);
  const std::size_t col0 = source_.offset(i);
  const std::size_t row0 = target_.offset(j);
  CMatrix c(n * m, n * m);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t l = 0; l < n; ++l)
      for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b) c(k * m + a, l * m + b) = matrix_(row0 + a * m + b, col0 + k * n + l);
  return c;
}

std::vector<Route> BlockLinearMap::routes() const {
  std::vector<Route> out;
  for (std::size_t i = 0; i < source_.block_count(); ++i)
    for (std::size_t j = 0; j < target_.block_count(); ++j) out.emplace_back(i, j);
  return out;
}

double BlockLinearMap::choi_min_eigenvalue(const Tolerances& tol) const {
  double out = 0.0;
  bool first = true;
  for (const auto& route : routes()) {
    const CMatrix c = choi(route);
    const double lo = min_eigenvalue(c, tol);
    out = first ? lo : std::min(out, lo);
    first = false;
  }
  return out;
}

bool BlockLinearMap::choi_positive(const Tolerances& tol) const {
  for (const auto& route : routes()) {
    const CMatrix c = choi(route);
    if (!choi_self_adjoint(c, tol)) return false;
    if (!is_positive(c.hermitian_part(), tol.choi, tol)) return false;
  }
  return true;
}

BlockLinearMap compose(const BlockLinearMap& outer, const BlockLinearMap& inner) {
  require_same_algebra(outer.source_, inner.target_, "composition");
  return {inner.source_, outer.target_, outer.matrix_ * inner.matrix_};
}

// ---------------------------------------------------------------------------
// Process

Process::Process(Unchecked, Algebra source, Algebra target, KrausMap kraus)
    : source_(std::move(source)), target_(std::move(target)), kraus_(std::move(kraus)) {}

Process::Process(Algebra source, Algebra target, KrausMap kraus, const Tolerances& tol)
    : Process(Unchecked{}, std::move(source), std::move(target), std::move(kraus)) {
  for (const auto& [route, list] : kraus_) {
    if (route.first >= source_.block_count() || route.second >= target_.block_count())
      throw Error(ErrorCode::ShapeMismatch, "Kraus route outside the algebras");
    for (const auto& k : list) {
      if (k.rows() != source_.block_dim(route.first) || k.cols() != target_.block_dim(route.second))
        throw Error(ErrorCode::ShapeMismatch, "Kraus operator shape does not match its route");
      if (!k.all_finite()) throw Error(ErrorCode::ShapeMismatch, "non-finite Kraus entry");
    }
  }
  if (unit_image().norm(tol) > 1.0 + tol.contractive)
    throw Error(ErrorCode::NotContractive, "||f(1)|| exceeds 1");
}

Process Process::identity(const Algebra& algebra) {
  KrausMap kraus;
  for (std::size_t i = 0; i < algebra.block_count(); ++i) kraus[{i, i}] = {CMatrix::identity(algebra.block_dim(i))};
  return {Unchecked{}, algebra, algebra, std::move(kraus)};
}

Process Process::conjugation(const Element& u) {
  KrausMap kraus;
  for (std::size_t i = 0; i < u.algebra().block_count(); ++i) kraus[{i, i}] = {u.block(i)};
  return {u.algebra(), u.algebra(), std::move(kraus)};
}

Process Process::single(const CMatrix& k) {
  return {Algebra::matrix(k.rows()), Algebra::matrix(k.cols()), KrausMap{{{0, 0}, {k}}}};
}

Process Process::from_linear_map(const BlockLinearMap& map, const Tolerances& tol) {
  KrausMap kraus;
  for (const auto& route : map.routes()) {
    const CMatrix c = map.choi(route);
    if (!choi_self_adjoint(c, tol)) throw Error(ErrorCode::NotHermitian, "Choi matrix is not self-adjoint");
    const auto eig = eig_hermitian(c.hermitian_part(), tol);
    const double scale = eig.spectral_radius();
    if (eig.min_eigenvalue() < -tol.choi * std::max(1.0, scale))
      throw Error(ErrorCode::NotPositive, "Choi matrix is not positive semidefinite");
    const std::size_t n = map.source().block_dim(route.first);
    const std::size_t m = map.target().block_dim(route.second);
    const double cut = rank_threshold(eig.max_eigenvalue(), tol);
    std::vector<CMatrix> list;
    for (std::size_t e = 0; e < eig.eigenvalues.size(); ++e) {
      const double lambda = eig.eigenvalues[e];
      if (lambda <= cut) continue;
      const double w = std::sqrt(lambda);
      CMatrix k(n, m);
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t s = 0; s < m; ++s) k(r, s) = std::conj(w * eig.eigenvectors(r * m + s, e));
      list.push_back(std::move(k));
    }
    if (!list.empty()) kraus[route] = std::move(list);
  }
  return {map.source(), map.target(), std::move(kraus), tol};
}

Element Process::apply(const Element& a) const {
  require_same_algebra(a.algebra(), source_, "process argument");
  auto out = Element::zero(target_);
  for (const auto& [route, list] : kraus_) {
    const CMatrix& block = a.block(route.first);
    for (const auto& k : list) out.block(route.second) += k.adjoint() * block * k;
  }
  return out;
}

Effect Process::apply(const Effect& p, const Tolerances& tol) const { return Effect(apply(p.element()), tol); }

const std::map<Route, CMatrix>& Process::choi() const {
  std::call_once(choi_cache_->once, [this] {
    std::map<Route, CMatrix> out;
    for (const auto& [route, list] : kraus_) {
      const std::size_t n = source_.block_dim(route.first);
      const std::size_t m = target_.block_dim(route.second);
      CMatrix c(n * m, n * m);
      for (const auto& k : list) {
        // C = sum w w*, w_{(k, a)} = conj(K_{k a})
        CMatrix w(n * m, 1);
        for (std::size_t r = 0; r < n; ++r)
          for (std::size_t s = 0; s < m; ++s) w(r * m + s, 0) = std::conj(k(r, s));
        c += w * w.adjoint();
      }
      out.emplace(route, std::move(c));
    }
    choi_cache_->value = std::move(out);
  });
  return choi_cache_->value;
}

BlockLinearMap Process::linear_map() const {
  return BlockLinearMap::from_function(source_, target_, [this](const Element& a) { return apply(a); });
}

Process compose(const Process& outer, const Process& inner) {
  require_same_algebra(outer.source_, inner.target_, "process composition");
  Process::KrausMap kraus;
  for (const auto& [r1, first] : inner.kraus_)
    for (const auto& [r2, second] : outer.kraus_) {
      if (r1.second != r2.first) continue;
      auto& list = kraus[{r1.first, r2.second}];
      for (const auto& k : first)
        for (const auto& l : second) list.push_back(k * l);
    }
  return {Process::Unchecked{}, inner.source_, outer.target_, std::move(kraus)};
}

// ---------------------------------------------------------------------------
// Positivity and multiplicativity

bool is_n_positive(const BlockLinearMap& f, std::size_t n, Rng& rng, std::size_t samples, const Tolerances& tol) {
  if (n == 0) throw Error(ErrorCode::ShapeMismatch, "N must be at least 1");
  const Algebra& src = f.source();
  const Algebra& tgt = f.target();

  bool sampled_ok = true;
  for (std::size_t s = 0; s < samples && sampled_ok; ++s) {
    // Positive X in M_N(A), one (N n_i)-square block per source block.
    std::vector<CMatrix> x;
    for (auto dim : src.block_dims()) {
      const CMatrix g = (s % 2 == 0) ? rng.gaussian(n * dim, 1) : rng.gaussian(n * dim, n * dim);
      x.push_back(g * g.adjoint());
    }
    std::vector<CMatrix> y;
    for (auto dim : tgt.block_dims()) y.emplace_back(n * dim, n * dim);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) {
        std::vector<CMatrix> entry;
        for (std::size_t i = 0; i < src.block_count(); ++i) {
          const auto dim = src.block_dim(i);
          CMatrix sub(dim, dim);
          for (std::size_t a = 0; a < dim; ++a)
            for (std::size_t b = 0; b < dim; ++b) sub(a, b) = x[i](r * dim + a, c * dim + b);
          entry.push_back(std::move(sub));
        }
        const Element image = f.apply(Element(src, std::move(entry)));
        for (std::size_t j = 0; j < tgt.block_count(); ++j) {
          const auto dim = tgt.block_dim(j);
          for (std::size_t a = 0; a < dim; ++a)
            for (std::size_t b = 0; b < dim; ++b) y[j](r * dim + a, c * dim + b) = image.block(j)(a, b);
        }
      }
    for (const auto& block : y) {
      if (!is_self_adjoint(block, tol)) {
        sampled_ok = false;
        break;
      }
      const auto eig = eig_hermitian_unchecked(block, tol);
      if (eig.min_eigenvalue() < -tol.choi * std::max(1.0, eig.spectral_radius())) {
        sampled_ok = false;
        break;
      }
    }
  }

  const bool cp = f.choi_positive(tol);
  std::size_t largest = 0;
  for (auto dim : src.block_dims()) largest = std::max(largest, dim);
  if (cp && !sampled_ok) throw std::logic_error("sampled N-positivity violation for a completely positive map");
  if (cp) return true;
  if (n >= largest) return false;
  return sampled_ok;
}

bool is_two_positive_certified(const BlockLinearMap& f, const Tolerances& tol) { return f.choi_positive(tol); }

namespace {

Element unit_norm(Element a, const Tolerances& tol) {
  const double norm = a.norm(tol);
  return norm > 0.0 ? a * (1.0 / norm) : a;
}

}  // namespace

bool is_multiplicative(const Process& f, Rng& rng, std::size_t samples, const Tolerances& tol) {
  const Element f1 = f.unit_image();
  for (std::size_t s = 0; s < samples; ++s) {
    const Element a = unit_norm(rng.gaussian(f.source()), tol);
    const Element b = unit_norm(rng.gaussian(f.source()), tol);
    const Element lhs = f1 * f.apply(a * b);
    const Element rhs = f.apply(a) * f.apply(b);
    if (distance(lhs, rhs, tol) > tol.multiplicative) return false;
  }
  return true;
}

bool is_unital(const Process& f, const Tolerances& tol) {
  return distance(f.unit_image(), Element::unit(f.target()), tol) <= tol.unital;
}

AwmultReport awmult_equivalence(const Process& f, Rng& rng, std::size_t samples, const Tolerances& tol) {
  if (!is_unital(f, tol)) throw Error(ErrorCode::NotUnital, "awmult needs a unital map");
  if (!is_two_positive_certified(f.linear_map(), tol)) throw Error(ErrorCode::Not2Positive, "awmult needs 2-positivity");
  AwmultReport out;
  out.multiplicative = is_multiplicative(f, rng, samples, tol);

  out.preserves_projections = true;
  for (std::size_t s = 0; s < samples && out.preserves_projections; ++s) {
    const Element e = (s % 2 == 0) ? rng.projection(f.source()).element() : rng.rank_one_projection(f.source()).element();
    const Element fe = f.apply(e);
    if ((fe * fe - fe).norm(tol) > tol.multiplicative) out.preserves_projections = false;
  }

  out.preserves_ceilings = true;
  for (std::size_t s = 0; s < samples && out.preserves_ceilings; ++s) {
    const Effect a = (s % 2 == 0) ? rng.low_rank_effect(f.source())
                                  : Effect(rng.rank_one_projection(f.source()).element() * rng.uniform(0.1, 1.0));
    const Element lhs = support(f.apply(a.element()), tol).element();
    const Element rhs = f.apply(ceil(a, tol).element());
    if (distance(lhs, rhs, tol) > tol.multiplicative) out.preserves_ceilings = false;
  }
  return out;
}

bool support_ineq_check(const Process& f, const Effect& a, const Tolerances& tol) {
  const Element fa = f.apply(a.element());
  const Element ceil_fa = support(fa, tol).element();
  const Element f_ceil_a = f.apply(ceil(a, tol).element());
  if (!leq(f_ceil_a, ceil_fa, tol)) return false;
  return distance(support(f_ceil_a, tol).element(), ceil_fa, tol) <= tol.factorization;
}

CauchySchwarzReport cs_inequalities(const BlockLinearMap& f, const Element& a, const Element& b, const Tolerances& tol) {
  if (!is_two_positive_certified(f, tol)) throw Error(ErrorCode::Not2Positive, "Cauchy-Schwarz needs a 2-positive map");
  const Element faa = f.apply(a.adjoint() * a);
  const Element fbb = f.apply(b.adjoint() * b);
  const Element fab = f.apply(a.adjoint() * b);
  const Element fba = f.apply(b.adjoint() * a);
  const double naa = faa.norm(tol);
  const double nbb = fbb.norm(tol);
  const double scale = std::max(1.0, naa * nbb);

  const double slack1 = order_margin(fba * fab, fbb * naa, tol);
  const double slack2 = order_margin(fab * fba, faa * nbb, tol);
  const double nab = fab.norm(tol);
  const double slack3 = naa * nbb - nab * nab;

  CauchySchwarzReport out;
  const double floor_ = -tol.inequality_slack * scale;
  out.item1 = slack1 >= floor_;
  out.item2 = slack2 >= floor_;
  out.item3 = slack3 >= floor_;
  out.min_slack = std::min({slack1, slack2, slack3});
  return out;
}

CauchySchwarzReport cs_inequalities(const Process& f, const Element& a, const Element& b, const Tolerances& tol) {
  return cs_inequalities(f.linear_map(), a, b, tol);
}

double kadison_slack(const CMatrix& rho, const CMatrix& a, const CMatrix& b) {
  auto phi = [&](const CMatrix& x) { return (x * rho).trace(); };
  const Complex ab = phi(a.adjoint() * b);
  const double aa = phi(a.adjoint() * a).real();
  const double bb = phi(b.adjoint() * b).real();
  return aa * bb - std::norm(ab);
}

Block2Report block2_positivity(const CMatrix& p, const CMatrix& a, const CMatrix& q, const Tolerances& tol) {
  const std::size_t n = p.rows();
  const std::size_t m = q.rows();
  if (!p.is_square() || !q.is_square() || a.rows() != n || a.cols() != m)
    throw Error(ErrorCode::ShapeMismatch, "block matrix [[P, A], [A*, Q]] shapes");
  if (!is_self_adjoint(p, tol) || !is_self_adjoint(q, tol))
    throw Error(ErrorCode::NotHermitian, "P and Q must be self-adjoint");

  CMatrix t(n + m, n + m);
  const CMatrix ad = a.adjoint();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) t(i, j) = p(i, j);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) t(n + i, n + j) = q(i, j);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      t(i, n + j) = a(i, j);
      t(n + j, i) = ad(j, i);
    }

  Block2Report out;
  out.positive = is_positive(t, tol.order, tol);
  if (!out.positive) return out;

  const double np = op_norm(p, tol);
  const double nq = op_norm(q, tol);
  const double na = op_norm(a, tol);
  const double floor_ = -tol.inequality_slack * std::max(1.0, np * nq);
  const double slack3 = min_eigenvalue((q * np - ad * a).hermitian_part(), tol);
  const double slack4 = min_eigenvalue((p * nq - a * ad).hermitian_part(), tol);
  const double slack5 = np * nq - na * na;
  out.item3 = slack3 >= floor_;
  out.item4 = slack4 >= floor_;
  out.item5 = slack5 >= floor_;
  out.min_slack = std::min({slack3, slack4, slack5});
  return out;
}

bool conjugation_is_cp(const CMatrix& a, const Tolerances& tol) {
  const Algebra src = Algebra::matrix(a.rows());
  const Algebra tgt = Algebra::matrix(a.cols());
  const auto map = BlockLinearMap::from_function(src, tgt, [&](const Element& b) {
    return Element(a.adjoint() * b.block(0) * a);
  });
  return map.choi_positive(tol);
}

bool invertible_process_is_iso(const Process& f, const Process& f_inv, Rng& rng, std::size_t samples,
                               const Tolerances& tol) {
  const auto forward = compose(f_inv, f);
  const auto backward = compose(f, f_inv);
  require_same_algebra(forward.target(), f.source(), "f_inv o f");
  require_same_algebra(backward.target(), f_inv.source(), "f o f_inv");
  for (const auto& e : Element::basis(f.source()))
    if (distance(forward.apply(e), e, tol) > tol.multiplicative)
      throw Error(ErrorCode::NotMutuallyInverse, "f_inv o f is not the identity");
  for (const auto& e : Element::basis(f_inv.source()))
    if (distance(backward.apply(e), e, tol) > tol.multiplicative)
      throw Error(ErrorCode::NotMutuallyInverse, "f o f_inv is not the identity");
  return is_unital(f, tol) && is_multiplicative(f, rng, samples, tol);
}

Process block_doubling(std::size_t n) {
  CMatrix left(n, 2 * n);
  CMatrix right(n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    left(i, i) = 1.0;
    right(i, n + i) = 1.0;
  }
  return {Algebra::matrix(n), Algebra::matrix(2 * n), Process::KrausMap{{{0, 0}, {left, right}}}};
}

Process coordinate_projection(const Algebra& algebra, std::size_t keep) {
  const auto n = algebra.block_dim(keep);
  return {algebra, Algebra::matrix(n), Process::KrausMap{{{keep, 0}, {CMatrix::identity(n)}}}};
}

Process block_permutation(const Algebra& algebra, const std::vector<std::size_t>& perm) {
  if (perm.size() != algebra.block_count()) throw Error(ErrorCode::ShapeMismatch, "permutation length");
  Process::KrausMap kraus;
  for (std::size_t j = 0; j < perm.size(); ++j) {
    const auto i = perm[j];
    if (algebra.block_dim(i) != algebra.block_dim(j))
      throw Error(ErrorCode::ShapeMismatch, "only equal blocks can be permuted");
    kraus[{i, j}] = {CMatrix::identity(algebra.block_dim(i))};
  }
  return {algebra, algebra, std::move(kraus)};
}

}  // namespace seqprod
