#include "seqprod/effects.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "seqprod/random.hpp"

namespace seqprod {

Algebra::Algebra(std::vector<std::size_t> block_dims) : dims_(std::move(block_dims)) {
  for (auto n : dims_)
    if (n == 0) throw Error(ErrorCode::ShapeMismatch, "algebra blocks must have positive dimension");
}

std::size_t Algebra::dimension() const noexcept {
  return std::accumulate(dims_.begin(), dims_.end(), std::size_t{0},
                         [](std::size_t acc, std::size_t n) { return acc + n * n; });
}

std::size_t Algebra::offset(std::size_t block) const {
  std::size_t acc = 0;
  for (std::size_t i = 0; i < block; ++i) acc += dims_.at(i) * dims_.at(i);
  return acc;
}

void require_same_algebra(const Algebra& a, const Algebra& b, const char* what) {
  if (!(a == b)) throw Error(ErrorCode::AlgebraMismatch, what);
}

Element::Element(Algebra algebra, std::vector<CMatrix> blocks)
    : algebra_(std::move(algebra)), blocks_(std::move(blocks)) {
  if (blocks_.size() != algebra_.block_count())
    throw Error(ErrorCode::AlgebraMismatch, "block count does not match algebra");
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    const auto n = algebra_.block_dim(i);
    if (blocks_[i].rows() != n || blocks_[i].cols() != n)
      throw Error(ErrorCode::ShapeMismatch, "block shape does not match algebra");
    if (!blocks_[i].all_finite()) throw Error(ErrorCode::ShapeMismatch, "non-finite entry");
  }
}

Element::Element(CMatrix block) : Element(Algebra::matrix(block.dim()), {std::move(block)}) {}

Element Element::zero(const Algebra& algebra) {
  std::vector<CMatrix> blocks;
  for (auto n : algebra.block_dims()) blocks.push_back(CMatrix::zero(n));
  return {algebra, std::move(blocks)};
}

Element Element::unit(const Algebra& algebra) {
  std::vector<CMatrix> blocks;
  for (auto n : algebra.block_dims()) blocks.push_back(CMatrix::identity(n));
  return {algebra, std::move(blocks)};
}

Element Element::matrix_unit(const Algebra& algebra, std::size_t b, std::size_t i, std::size_t j) {
  auto out = zero(algebra);
  out.block(b)(i, j) = 1.0;
  return out;
}

std::vector<Element> Element::basis(const Algebra& algebra) {
  std::vector<Element> out;
  out.reserve(algebra.dimension());
  for (std::size_t b = 0; b < algebra.block_count(); ++b) {
    const auto n = algebra.block_dim(b);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) out.push_back(matrix_unit(algebra, b, i, j));
  }
  return out;
}

Element Element::from_vector(const Algebra& algebra, std::span<const Complex> values) {
  if (values.size() != algebra.dimension()) throw Error(ErrorCode::ShapeMismatch, "vector length");
  auto out = zero(algebra);
  std::size_t k = 0;
  for (auto& block : out.blocks_)
    for (auto& z : block.data()) z = values[k++];
  return out;
}

std::vector<Complex> Element::to_vector() const {
  std::vector<Complex> out;
  out.reserve(algebra_.dimension());
  for (const auto& block : blocks_) out.insert(out.end(), block.data().begin(), block.data().end());
  return out;
}

Element Element::adjoint() const {
  auto out = *this;
  for (auto& b : out.blocks_) b = b.adjoint();
  return out;
}

Element Element::hermitian_part() const {
  auto out = *this;
  for (auto& b : out.blocks_) b = b.hermitian_part();
  return out;
}

double Element::norm(const Tolerances& tol) const {
  double out = 0.0;
  for (const auto& b : blocks_) out = std::max(out, op_norm(b, tol));
  return out;
}

double Element::frobenius_norm() const {
  double acc = 0.0;
  for (const auto& b : blocks_) acc += std::pow(b.frobenius_norm(), 2);
  return std::sqrt(acc);
}

bool Element::is_self_adjoint(const Tolerances& tol) const {
  return std::all_of(blocks_.begin(), blocks_.end(),
                     [&](const CMatrix& b) { return seqprod::is_self_adjoint(b, tol); });
}

Element& Element::operator+=(const Element& other) {
  require_same_algebra(algebra_, other.algebra_, "element sum");
  for (std::size_t i = 0; i < blocks_.size(); ++i) blocks_[i] += other.blocks_[i];
  return *this;
}

Element& Element::operator-=(const Element& other) {
  require_same_algebra(algebra_, other.algebra_, "element difference");
  for (std::size_t i = 0; i < blocks_.size(); ++i) blocks_[i] -= other.blocks_[i];
  return *this;
}

Element& Element::operator*=(Complex s) {
  for (auto& b : blocks_) b *= s;
  return *this;
}

Element operator*(const Element& a, const Element& b) {
  require_same_algebra(a.algebra_, b.algebra_, "element product");
  auto out = a;
  for (std::size_t i = 0; i < out.blocks_.size(); ++i) out.blocks_[i] = a.blocks_[i] * b.blocks_[i];
  return out;
}

double distance(const Element& a, const Element& b, const Tolerances& tol) { return (a - b).norm(tol); }

namespace {

template <typename Fn>
Element map_blocks(const Element& a, Fn&& fn) {
  std::vector<CMatrix> blocks;
  blocks.reserve(a.blocks().size());
  for (const auto& b : a.blocks()) blocks.push_back(fn(b));
  return {a.algebra(), std::move(blocks)};
}

}  // namespace

Element apply_function(const Element& a, const RealFunction& g, const Tolerances& tol) {
  return map_blocks(a, [&](const CMatrix& b) { return apply_function(b, g, tol); });
}

Element sqrt_psd(const Element& a, const Tolerances& tol) {
  return map_blocks(a, [&](const CMatrix& b) { return sqrt_psd(b, tol); });
}

Element pinv_psd(const Element& a, const Tolerances& tol) {
  return map_blocks(a, [&](const CMatrix& b) { return pinv_psd(b, tol); });
}

double min_eigenvalue(const Element& a, const Tolerances& tol) {
  double out = std::numeric_limits<double>::infinity();
  for (const auto& b : a.blocks()) out = std::min(out, min_eigenvalue(b, tol));
  return a.blocks().empty() ? 0.0 : out;
}

bool is_positive(const Element& a, double eps, const Tolerances& tol) {
  return std::all_of(a.blocks().begin(), a.blocks().end(),
                     [&](const CMatrix& b) { return is_positive(b, eps, tol); });
}

bool leq(const Element& a, const Element& b, const Tolerances& tol) {
  return is_positive(b - a, tol.order, tol);
}

double order_margin(const Element& a, const Element& b, const Tolerances& tol) {
  return min_eigenvalue((b - a).hermitian_part(), tol);
}

// ---------------------------------------------------------------------------
// Effects and projections

namespace {

Element validated_effect(const Element& value, const Tolerances& tol) {
  std::vector<CMatrix> blocks;
  for (const auto& b : value.blocks()) {
    if (!is_self_adjoint(b, tol)) throw Error(ErrorCode::NotHermitian, "effect block is not self-adjoint");
    CMatrix h = b.hermitian_part();
    const auto eig = eig_hermitian_unchecked(h, tol);
    const double lo = eig.min_eigenvalue();
    const double hi = eig.max_eigenvalue();
    if (lo < -tol.effect_clamp || hi > 1.0 + tol.effect_clamp)
      throw Error(ErrorCode::NotEffect, "spectrum outside [0, 1]: [" + std::to_string(lo) + ", " +
                                            std::to_string(hi) + "]");
    if (lo < 0.0 || hi > 1.0)
      h = apply_function(eig, [](double x) { return Complex(std::clamp(x, 0.0, 1.0)); });
    blocks.push_back(std::move(h));
  }
  return {value.algebra(), std::move(blocks)};
}

}  // namespace

Effect::Effect(const Element& value, const Tolerances& tol) : value_(validated_effect(value, tol)) {}

Effect Effect::zero(const Algebra& algebra) { return Effect(Trusted{}, Element::zero(algebra)); }
Effect Effect::unit(const Algebra& algebra) { return Effect(Trusted{}, Element::unit(algebra)); }

Projection::Projection(const Element& value, const Tolerances& tol) : effect_(value, tol) {
  const auto& p = effect_.element();
  if ((p * p - p).norm(tol) > tol.projection) throw Error(ErrorCode::NotProjection, "p^2 != p");
}

Projection Projection::zero(const Algebra& algebra) { return Projection(Element::zero(algebra)); }
Projection Projection::unit(const Algebra& algebra) { return Projection(Element::unit(algebra)); }

bool is_effect(const Element& a, const Tolerances& tol) {
  try {
    Effect e(a, tol);
    return true;
  } catch (const Error&) {
    return false;
  }
}

bool is_projection(const Element& a, const Tolerances& tol) {
  try {
    Projection e(a, tol);
    return true;
  } catch (const Error&) {
    return false;
  }
}

Effect complement(const Effect& p) { return Effect(Element::unit(p.algebra()) - p.element()); }
Projection complement(const Projection& p) { return Projection(Element::unit(p.algebra()) - p.element()); }

Effect seq_product(const Effect& p, const Effect& q, const Tolerances& tol) {
  require_same_algebra(p.algebra(), q.algebra(), "seq_product");
  const Element root = sqrt_psd(p.element(), tol);
  return Effect(root * q.element() * root, tol);
}

Projection support(const Element& a, const Tolerances& tol) {
  return Projection(map_blocks(a, [&](const CMatrix& b) { return support_projection(b, tol); }), tol);
}

Projection ceil(const Effect& p, const Tolerances& tol) { return support(p.element(), tol); }

Projection floor(const Effect& p, const Tolerances& tol) {
  return complement(ceil(complement(p), tol));
}

Effect ceil_by_limit(const Effect& p, int n, const Tolerances& tol) {
  const double exponent = std::ldexp(1.0, -n);
  std::vector<CMatrix> blocks;
  for (const auto& b : p.element().blocks()) {
    const auto eig = eig_hermitian(b, tol);
    const double cut = rank_threshold(eig.max_eigenvalue(), tol);
    blocks.push_back(apply_function(eig, [&](double x) { return Complex(x > cut ? std::pow(x, exponent) : 0.0); }));
  }
  return Effect(Element(p.algebra(), std::move(blocks)), tol);
}

ConnectedReport check_connected(const Element& a, const Projection& e1, const Projection& e2, const Tolerances& tol) {
  require_same_algebra(a.algebra(), e1.algebra(), "check_connected");
  require_same_algebra(a.algebra(), e2.algebra(), "check_connected");
  if (a.norm(tol) > 1.0 + tol.contractive) throw Error(ErrorCode::NormTooLarge, "need a*a <= 1");
  const Element one = Element::unit(a.algebra());
  const Element& p1 = e1.element();
  const Element& p2 = e2.element();
  const Element ad = a.adjoint();
  const double eps = tol.axiom_positivity;
  // ||e1 a e2||^2 is the size of the violation in a* e1 a <= 1 - e2, so the
  // product tests use the square root of the positivity tolerance.
  const double product_eps = std::sqrt(eps);
  ConnectedReport out;
  out.sandwich_e1 = order_margin(ad * p1 * a, one - p2, tol) >= -eps;
  out.sandwich_e2 = order_margin(a * p2 * ad, one - p1, tol) >= -eps;
  out.product_12 = (p1 * a * p2).norm(tol) <= product_eps;
  out.product_21 = (p2 * ad * p1).norm(tol) <= product_eps;
  return out;
}

bool projection_order_tests(const Effect& p, Rng& rng, std::size_t samples, const Tolerances& tol) {
  if (!is_projection(p.element(), tol)) return true;
  const Element& e = p.element();
  const Element one = Element::unit(p.algebra());
  const Element not_e = one - e;
  bool ok = true;
  for (std::size_t s = 0; s < samples && ok; ++s) {
    // 0 <= a <= p
    const Element a = e * rng.effect(p.algebra()).element() * e;
    ok = ok && distance(a * e, a, tol) <= tol.projection && distance(e * a, a, tol) <= tol.projection;
    // a <= p and a <= 1 - p only for a = 0
    if (a.norm(tol) > 1e-6) ok = ok && !leq(a, not_e, tol);
    // projections below 1 - p are orthogonal to p
    const Element q = support(not_e * rng.projection(p.algebra()).element() * not_e, tol).element();
    ok = ok && leq(e + q, one, tol) && (e * q).norm(tol) <= tol.projection && (q * e).norm(tol) <= tol.projection;
  }
  return ok;
}

}  // namespace seqprod
