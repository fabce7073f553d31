#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "seqprod/processes.hpp"

namespace seqprod {

/// A projection e of `parent` together with isometries V_i whose columns span
/// range(e) block by block, so that the corner eAe is an algebra of its own.
/// Blocks where e vanishes are dropped from the corner.
struct CornerEmbedding {
  Algebra parent;
  Projection projection;
  std::vector<CMatrix> isometries;           // one per parent block, n_i x rank_i
  Algebra corner;
  std::vector<std::size_t> parent_block;     // corner block -> parent block
  std::vector<std::optional<std::size_t>> corner_block;  // parent block -> corner block

  /// Parent element e a e moved into the corner: V* a V.
  Element restrict(const Element& a) const;
  /// Corner element b moved into the parent: V b V*.
  Element extend(const Element& b) const;
};

/// Embedding for the support of a positive element, with basis columns taken
/// from its eigenvectors in ascending order.
CornerEmbedding support_embedding(const Element& a, const Tolerances& tol = kDefaultTolerances);
/// Embedding for floor(p) = 1 - ceil(1 - p).
CornerEmbedding floor_embedding(const Effect& p, const Tolerances& tol = kDefaultTolerances);

/// a -> V* a V, from the parent onto the corner.
Process corner_process(const CornerEmbedding& embedding);
/// b -> sqrt(p) V b V* sqrt(p), from the support corner of p into the parent.
Process compression_process(const CornerEmbedding& embedding, const Effect& p,
                            const Tolerances& tol = kDefaultTolerances);

std::pair<CornerEmbedding, Process> make_corner(const Effect& p, const Tolerances& tol = kDefaultTolerances);
std::pair<CornerEmbedding, Process> make_compression(const Effect& p, const Tolerances& tol = kDefaultTolerances);

struct FactorizationResult {
  Process mediator;
  double residual = 0.0;
  bool unique = false;
};

/// Largest ||(outer o mediator - given)(E)|| over the matrix units E of the
/// mediator's source.
double factorization_residual(const Process& outer, const Process& mediator, const Process& given,
                              const Tolerances& tol = kDefaultTolerances);

/// Mediator f_bar into the support corner of p with c o f_bar = f, where c is
/// the compression of p; closed form f_bar(b) = V* s f(b) s V, s = pinv(sqrt p).
FactorizationResult factor_through_compression(const Process& f, const Effect& p,
                                               const Tolerances& tol = kDefaultTolerances);

struct LimitFactorization {
  FactorizationResult result;
  /// First n from which q_n f(b) q_n is constant on every basis element;
  /// absent if it has not settled by n_max.
  std::optional<std::size_t> stabilized_at;
  /// ||f_bar_n - f_bar_{n_max}|| over the basis, for n = 1..n_max.
  std::vector<double> distance_to_last;
};

/// Same mediator reached through the spectral cut-offs
/// q_n = sum_{lambda_k >= 1/n} lambda_k^{-1/2} e_k.
LimitFactorization factor_through_compression_by_limit(const Process& f, const Effect& p, std::size_t n_max,
                                                       const Tolerances& tol = kDefaultTolerances);

/// Mediator g_bar on the corner of floor(p) with g_bar o pi = g;
/// g_bar(b) = g(V b V*).
FactorizationResult factor_through_corner(const Process& g, const Effect& p,
                                          const Tolerances& tol = kDefaultTolerances);

/// Least-squares solution X of outer o X = given among all linear maps.
struct LinearSolution {
  BlockLinearMap solution;
  double residual = 0.0;
  std::size_t kernel_dimension = 0;
  CMatrix kernel;  // columns span ker(outer)
};

LinearSolution solve_linear_factorization(const BlockLinearMap& outer, const BlockLinearMap& given,
                                          const Tolerances& tol = kDefaultTolerances);

/// Whether outer o X = given pins X down among processes: unique when outer
/// is injective; otherwise kernel directions are probed for perturbations
/// that keep X a process.
bool mediator_uniqueness_probe(const Process& outer, const Process& given,
                               const Tolerances& tol = kDefaultTolerances);

/// Same probe for X o inner = given.
bool mediator_uniqueness_probe_right(const Process& inner, const Process& given,
                                     const Tolerances& tol = kDefaultTolerances);

}  // namespace seqprod
