#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "seqprod/effects.hpp"

namespace seqprod {

class Rng;

/// (source block, target block)
using Route = std::pair<std::size_t, std::size_t>;

/// Linear map between algebras, stored as a matrix acting on the
/// concatenated row-major vectorization of the blocks. No positivity claim.
class BlockLinearMap {
 public:
  BlockLinearMap(Algebra source, Algebra target, CMatrix matrix);

  static BlockLinearMap from_function(const Algebra& source, const Algebra& target,
                                      const std::function<Element(const Element&)>& fn);
  static BlockLinearMap identity(const Algebra& algebra);
  static BlockLinearMap transpose(const Algebra& algebra);

  const Algebra& source() const noexcept { return source_; }
  const Algebra& target() const noexcept { return target_; }
  const CMatrix& matrix() const noexcept { return matrix_; }

  Element apply(const Element& a) const;
  /// Choi matrix sum_{kl} E_kl (x) f(E_kl) of one route, indexed
  /// [(k, a), (l, b)] -> f(E_kl)_{ab} restricted to the target block.
  CMatrix choi(const Route& route) const;
  std::vector<Route> routes() const;
  /// Every route has a positive semidefinite Choi matrix.
  bool choi_positive(const Tolerances& tol = kDefaultTolerances) const;
  /// Smallest Choi eigenvalue over all routes.
  double choi_min_eigenvalue(const Tolerances& tol = kDefaultTolerances) const;

  friend BlockLinearMap compose(const BlockLinearMap& outer, const BlockLinearMap& inner);

 private:
  Algebra source_;
  Algebra target_;
  CMatrix matrix_;
};

BlockLinearMap compose(const BlockLinearMap& outer, const BlockLinearMap& inner);

/// Normal completely positive contractive map f(a)_j = sum_i sum_k K* a_i K,
/// with an independent Kraus list for every (source block -> target block)
/// route. Normality holds automatically in finite dimension and is not
/// checked. Contractivity is enforced on construction as ||f(1)|| <= 1.
class Process {
 public:
  using KrausMap = std::map<Route, std::vector<CMatrix>>;

  Process(Algebra source, Algebra target, KrausMap kraus, const Tolerances& tol = kDefaultTolerances);

  static Process identity(const Algebra& algebra);
  /// a -> u* a u on a single-block or per-block unitary.
  static Process conjugation(const Element& u);
  static Process single(const CMatrix& kraus);
  /// Kraus decomposition of a map whose Choi matrices are PSD.
  static Process from_linear_map(const BlockLinearMap& map, const Tolerances& tol = kDefaultTolerances);

  const Algebra& source() const noexcept { return source_; }
  const Algebra& target() const noexcept { return target_; }
  const KrausMap& kraus() const noexcept { return kraus_; }

  Element apply(const Element& a) const;
  Effect apply(const Effect& p, const Tolerances& tol = kDefaultTolerances) const;
  Element unit_image() const { return apply(Element::unit(source_)); }

  /// Per-route Choi matrices, computed once and shared between copies.
  const std::map<Route, CMatrix>& choi() const;
  BlockLinearMap linear_map() const;

  friend Process compose(const Process& outer, const Process& inner);

 private:
  struct Unchecked {};
  Process(Unchecked, Algebra source, Algebra target, KrausMap kraus);

  struct ChoiCache {
    std::once_flag once;
    std::map<Route, CMatrix> value;
  };

  Algebra source_;
  Algebra target_;
  KrausMap kraus_;
  std::shared_ptr<ChoiCache> choi_cache_ = std::make_shared<ChoiCache>();
};

/// outer o inner
Process compose(const Process& outer, const Process& inner);

/// Positivity of id_N (x) f, by sampling rank-one and mixed positive inputs,
/// and exactly through the Choi matrix when N is at least every source block
/// dimension. The two routes are required not to contradict.
bool is_n_positive(const BlockLinearMap& f, std::size_t n, Rng& rng, std::size_t samples = 200,
                   const Tolerances& tol = kDefaultTolerances);

/// ||f(1) f(ab) - f(a) f(b)|| <= multiplicative on sampled unit-norm pairs.
bool is_multiplicative(const Process& f, Rng& rng, std::size_t samples,
                       const Tolerances& tol = kDefaultTolerances);

bool is_unital(const Process& f, const Tolerances& tol = kDefaultTolerances);

/// Sufficient certificate for 2-positivity (Choi PSD means completely positive).
bool is_two_positive_certified(const BlockLinearMap& f, const Tolerances& tol = kDefaultTolerances);

struct AwmultReport {
  bool multiplicative = false;
  bool preserves_projections = false;
  bool preserves_ceilings = false;
  bool agree() const {
    return multiplicative == preserves_projections && preserves_projections == preserves_ceilings;
  }
};

/// Three equivalent characterizations of *-homomorphisms among unital
/// 2-positive maps, each evaluated on samples.
AwmultReport awmult_equivalence(const Process& f, Rng& rng, std::size_t samples,
                                const Tolerances& tol = kDefaultTolerances);

/// f(ceil a) <= ceil f(a) and ceil f(ceil a) = ceil f(a).
bool support_ineq_check(const Process& f, const Effect& a, const Tolerances& tol = kDefaultTolerances);

struct CauchySchwarzReport {
  bool item1 = false;  // f(b*a) f(a*b) <= ||f(a*a)|| f(b*b)
  bool item2 = false;  // f(a*b) f(b*a) <= ||f(b*b)|| f(a*a)
  bool item3 = false;  // ||f(a*b)||^2 <= ||f(a*a)|| ||f(b*b)||
  double min_slack = 0.0;
  bool all() const { return item1 && item2 && item3; }
};

CauchySchwarzReport cs_inequalities(const BlockLinearMap& f, const Element& a, const Element& b,
                                    const Tolerances& tol = kDefaultTolerances);
CauchySchwarzReport cs_inequalities(const Process& f, const Element& a, const Element& b,
                                    const Tolerances& tol = kDefaultTolerances);

/// |phi(a*b)|^2 <= phi(a*a) phi(b*b) for the state phi(a) = tr(a rho);
/// returns the slack phi(a*a) phi(b*b) - |phi(a*b)|^2.
double kadison_slack(const CMatrix& rho, const CMatrix& a, const CMatrix& b);

struct Block2Report {
  bool positive = false;
  // Only evaluated when positive.
  std::optional<bool> item3;  // A*A <= ||P|| Q
  std::optional<bool> item4;  // AA* <= ||Q|| P
  std::optional<bool> item5;  // ||A||^2 <= ||P|| ||Q||
  double min_slack = 0.0;
  bool consequences_hold() const {
    return !positive || (item3.value_or(false) && item4.value_or(false) && item5.value_or(false));
  }
};

Block2Report block2_positivity(const CMatrix& p, const CMatrix& a, const CMatrix& q,
                               const Tolerances& tol = kDefaultTolerances);

/// b -> a* b a has a PSD Choi matrix.
bool conjugation_is_cp(const CMatrix& a, const Tolerances& tol = kDefaultTolerances);

/// Requires f o f_inv = id and f_inv o f = id; returns whether f is unital and
/// multiplicative on samples.
bool invertible_process_is_iso(const Process& f, const Process& f_inv, Rng& rng, std::size_t samples,
                               const Tolerances& tol = kDefaultTolerances);

/// Unital *-homomorphisms used as Ax.3 test maps.
Process block_doubling(std::size_t n);
/// (+)_i M_{n_i} -> M_{n_k}, keeping block k.
Process coordinate_projection(const Algebra& algebra, std::size_t keep);
/// Permutes equal-dimension blocks: target block j receives source block perm[j].
Process block_permutation(const Algebra& algebra, const std::vector<std::size_t>& perm);

}  // namespace seqprod
