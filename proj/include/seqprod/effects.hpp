#pragma once

#include <cstddef>
#include <vector>

#include "seqprod/linalg.hpp"

namespace seqprod {

/// Finite-dimensional von Neumann algebra M_{n_1} (+) ... (+) M_{n_k}.
/// The empty block list is the zero algebra, which only arises as the corner
/// of the zero projection.
class Algebra {
 public:
  Algebra() = default;
  explicit Algebra(std::vector<std::size_t> block_dims);

  static Algebra matrix(std::size_t n) { return Algebra({n}); }
  static Algebra zero() { return Algebra(); }

  const std::vector<std::size_t>& block_dims() const noexcept { return dims_; }
  std::size_t block_count() const noexcept { return dims_.size(); }
  std::size_t block_dim(std::size_t i) const { return dims_.at(i); }
  bool is_zero() const noexcept { return dims_.empty(); }
  /// sum n_i^2, the complex dimension.
  std::size_t dimension() const noexcept;
  /// Offset of block i in the concatenated row-major vectorization.
  std::size_t offset(std::size_t block) const;

  friend bool operator==(const Algebra&, const Algebra&) = default;

 private:
  std::vector<std::size_t> dims_;
};

/// General element of an Algebra: one square matrix per block.
class Element {
 public:
  Element() = default;
  Element(Algebra algebra, std::vector<CMatrix> blocks);
  /// Single-block convenience.
  explicit Element(CMatrix block);

  static Element zero(const Algebra& algebra);
  static Element unit(const Algebra& algebra);
  /// Matrix unit E_{ij} inside block b.
  static Element matrix_unit(const Algebra& algebra, std::size_t b, std::size_t i, std::size_t j);
  /// Basis of matrix units in vectorization order.
  static std::vector<Element> basis(const Algebra& algebra);
  static Element from_vector(const Algebra& algebra, std::span<const Complex> values);

  const Algebra& algebra() const noexcept { return algebra_; }
  const std::vector<CMatrix>& blocks() const noexcept { return blocks_; }
  const CMatrix& block(std::size_t i) const { return blocks_.at(i); }
  CMatrix& block(std::size_t i) { return blocks_.at(i); }
  std::vector<Complex> to_vector() const;

  Element adjoint() const;
  Element hermitian_part() const;
  double norm(const Tolerances& tol = kDefaultTolerances) const;
  double frobenius_norm() const;
  bool is_self_adjoint(const Tolerances& tol = kDefaultTolerances) const;

  Element& operator+=(const Element& other);
  Element& operator-=(const Element& other);
  Element& operator*=(Complex s);
  friend Element operator+(Element a, const Element& b) { return a += b; }
  friend Element operator-(Element a, const Element& b) { return a -= b; }
  friend Element operator*(Element a, Complex s) { return a *= s; }
  friend Element operator*(Complex s, Element a) { return a *= s; }
  friend Element operator*(Element a, double s) { return a *= Complex(s); }
  friend Element operator*(double s, Element a) { return a *= Complex(s); }
  friend Element operator*(const Element& a, const Element& b);

 private:
  Algebra algebra_;
  std::vector<CMatrix> blocks_;
};

void require_same_algebra(const Algebra& a, const Algebra& b, const char* what);

/// Blockwise distance: max over blocks of the operator norm.
double distance(const Element& a, const Element& b, const Tolerances& tol = kDefaultTolerances);

Element apply_function(const Element& a, const RealFunction& g, const Tolerances& tol = kDefaultTolerances);
Element sqrt_psd(const Element& a, const Tolerances& tol = kDefaultTolerances);
Element pinv_psd(const Element& a, const Tolerances& tol = kDefaultTolerances);

/// min over blocks of lambda_min; the element is assumed self-adjoint.
double min_eigenvalue(const Element& a, const Tolerances& tol = kDefaultTolerances);
bool is_positive(const Element& a, double eps, const Tolerances& tol = kDefaultTolerances);
/// a <= b, decided as positivity of b - a at the `order` tolerance.
bool leq(const Element& a, const Element& b, const Tolerances& tol = kDefaultTolerances);
/// lambda_min(b - a): negative means a <= b fails by that much.
double order_margin(const Element& a, const Element& b, const Tolerances& tol = kDefaultTolerances);

/// Element of [0, 1]. Construction symmetrizes, clamps spectra that lie within
/// effect_clamp outside [0, 1], and rejects anything further out.
class Effect {
 public:
  explicit Effect(const Element& value, const Tolerances& tol = kDefaultTolerances);
  explicit Effect(const CMatrix& block, const Tolerances& tol = kDefaultTolerances)
      : Effect(Element(block), tol) {}

  static Effect zero(const Algebra& algebra);
  static Effect unit(const Algebra& algebra);

  const Element& element() const noexcept { return value_; }
  const Algebra& algebra() const noexcept { return value_.algebra(); }
  const CMatrix& block(std::size_t i) const { return value_.block(i); }
  operator const Element&() const noexcept { return value_; }

 private:
  struct Trusted {};
  Effect(Trusted, Element value) : value_(std::move(value)) {}
  friend class Projection;

  Element value_;
};

/// Effect with p^2 = p.
class Projection {
 public:
  explicit Projection(const Element& value, const Tolerances& tol = kDefaultTolerances);
  explicit Projection(const CMatrix& block, const Tolerances& tol = kDefaultTolerances)
      : Projection(Element(block), tol) {}

  static Projection zero(const Algebra& algebra);
  static Projection unit(const Algebra& algebra);

  const Effect& effect() const noexcept { return effect_; }
  const Element& element() const noexcept { return effect_.element(); }
  const Algebra& algebra() const noexcept { return effect_.algebra(); }
  const CMatrix& block(std::size_t i) const { return effect_.block(i); }
  operator const Effect&() const noexcept { return effect_; }
  operator const Element&() const noexcept { return effect_.element(); }

 private:
  Effect effect_;
};

bool is_effect(const Element& a, const Tolerances& tol = kDefaultTolerances);
bool is_projection(const Element& a, const Tolerances& tol = kDefaultTolerances);

/// 1 - p
Effect complement(const Effect& p);
Projection complement(const Projection& p);

/// p * q = sqrt(p) q sqrt(p)
Effect seq_product(const Effect& p, const Effect& q, const Tolerances& tol = kDefaultTolerances);

/// Least projection above a positive element (support projection).
Projection support(const Element& a, const Tolerances& tol = kDefaultTolerances);
Projection ceil(const Effect& p, const Tolerances& tol = kDefaultTolerances);
/// 1 - ceil(1 - p): the eigenvalue-1 spectral projection.
Projection floor(const Effect& p, const Tolerances& tol = kDefaultTolerances);
/// p^(1/2^n), with eigenvalues under the rank threshold sent to 0.
Effect ceil_by_limit(const Effect& p, int n, const Tolerances& tol = kDefaultTolerances);

/// The four equivalent conditions for a contraction a and projections e1, e2.
struct ConnectedReport {
  bool sandwich_e1 = false;   // a* e1 a <= 1 - e2
  bool sandwich_e2 = false;   // a e2 a* <= 1 - e1
  bool product_12 = false;    // e1 a e2 = 0
  bool product_21 = false;    // e2 a* e1 = 0

  bool agree() const {
    return sandwich_e1 == sandwich_e2 && sandwich_e2 == product_12 && product_12 == product_21;
  }
};

ConnectedReport check_connected(const Element& a, const Projection& e1, const Projection& e2,
                                const Tolerances& tol = kDefaultTolerances);

class Rng;

/// For a projection p: a = ap = pa for sampled 0 <= a <= p, sampled nonzero
/// a <= p is never also below 1 - p, and sampled projections q <= 1 - p give
/// p + q <= 1 with pq = 0. Vacuously true for non-projections.
bool projection_order_tests(const Effect& p, Rng& rng, std::size_t samples = 16,
                            const Tolerances& tol = kDefaultTolerances);

}  // namespace seqprod
