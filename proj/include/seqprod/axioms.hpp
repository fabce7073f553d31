#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "seqprod/universal.hpp"

namespace seqprod {

class Rng;

/// Binary operation on effects, defined for every algebra.
using ProductRule = std::function<Effect(const Effect& p, const Effect& q)>;
/// p -> u_p, a unitary of the corner ceil(p) A ceil(p), returned as a parent
/// element supported on ceil(p).
using UnitaryCertificate = std::function<Element(const Effect& p)>;

struct Candidate {
  std::string name;
  ProductRule rule;
  /// When present, the rule claims the form p * q = sqrt(p) u_p* q u_p sqrt(p).
  std::optional<UnitaryCertificate> certificate;
  /// Scalar phase g behind a twisted candidate, u_p = g(p).
  std::optional<RealFunction> phase;
};

Candidate standard_candidate(const Tolerances& tol = kDefaultTolerances);
/// p * q = sqrt(p) g(p)* q g(p) sqrt(p); throws NotUnimodular if |g| != 1 on
/// a grid of [0, 1].
Candidate twisted_candidate(RealFunction g, std::string name, const Tolerances& tol = kDefaultTolerances);
Candidate pqp_candidate(const Tolerances& tol = kDefaultTolerances);

/// g = +1 above 1/2 and -1 elsewhere: g(2/3) = 1, g(4/9) = -1.
double sign_phase(double lambda);
/// g(lambda) = exp(i (pi / ln 2) ln lambda), g(0) = 1; g(lambda)^2 = g(lambda^2).
Complex log_phase(double lambda);
Candidate ax2_sign_candidate(const Tolerances& tol = kDefaultTolerances);
Candidate ax4_phase_candidate(const Tolerances& tol = kDefaultTolerances);

enum class Axiom { Ax1, Ax2, Ax3, Ax4 };
enum class Status { Pass, Fail, NotDecidable };

std::string to_string(Axiom axiom);
std::string to_string(Status status);

struct Witness {
  Effect p;
  std::optional<Effect> q;
  std::optional<Projection> e1;
  std::optional<Projection> e2;
  std::string map;
  double violation = 0.0;
};

struct AxiomResult {
  Axiom axiom = Axiom::Ax1;
  Status status = Status::NotDecidable;
  double max_residual = 0.0;
  std::optional<Witness> witness;
  std::string detail;
  std::map<std::string, double> metrics;
};

struct AxiomReport {
  std::string candidate;
  std::vector<AxiomResult> results;  // Ax1..Ax4 in order
  const AxiomResult& at(Axiom axiom) const;
  bool all_pass() const;
};

struct ProductInstance {
  Effect p;
  Effect q;
};

struct OrthogonalityInstance {
  Effect p;
  Projection e1;
  Projection e2;
};

struct InstanceSet {
  Algebra algebra;
  std::vector<ProductInstance> products;
  std::vector<OrthogonalityInstance> orthogonality;
};

/// `count` product and `count` orthogonality instances. p ranges over full,
/// low-rank and projection effects; e1, e2 alternate between rank-one and
/// random-rank projections.
InstanceSet make_instances(const Algebra& algebra, std::size_t count, Rng& rng);

using NamedProcess = std::pair<std::string, Process>;

/// Unital *-homomorphisms out of `algebra`: a unitary conjugation, block
/// doubling (single block), coordinate projections and block swaps (direct
/// sums).
std::vector<NamedProcess> standard_homs(const Algebra& algebra, Rng& rng);

/// Linear extension of q -> rule(p, q) from its values on effects, as a map
/// on the whole algebra.
BlockLinearMap linear_extension(const Candidate& cand, const Effect& p);

AxiomResult check_ax1(const Candidate& cand, const InstanceSet& instances, const Tolerances& tol = kDefaultTolerances);
AxiomResult check_ax2(const Candidate& cand, const InstanceSet& instances, const Tolerances& tol = kDefaultTolerances);
AxiomResult check_ax3(const Candidate& cand, const std::vector<NamedProcess>& homs, const InstanceSet& instances,
                      const Tolerances& tol = kDefaultTolerances);
/// Besides the supplied (p, e1, e2), every instance is also evaluated with e2
/// replaced by the complement of ceil(p * e1) and by a rank-one projection
/// inside it, where the left-hand side holds by construction.
AxiomResult check_ax4(const Candidate& cand, const InstanceSet& instances, const Tolerances& tol = kDefaultTolerances);

/// Margins of both sides of the Ax.4 equivalence:
/// first = lambda_min(1 - e2 - p * e1), second = lambda_min(1 - e1 - p * e2).
std::pair<double, double> ax4_margins(const Candidate& cand, const Effect& p, const Projection& e1,
                                      const Projection& e2, const Tolerances& tol = kDefaultTolerances);

AxiomReport check_all(const Candidate& cand, const std::vector<NamedProcess>& homs, const InstanceSet& instances,
                      const Tolerances& tol = kDefaultTolerances);

struct UniquenessDemoReport {
  bool passed = false;
  double max_residual = 0.0;       // ||cand(p, q) - sqrt(p) q sqrt(p)||
  double waypoint_residual = 0.0;  // ||cand(p^2, q) - p q p||
};

/// Requires a certified Ax.1 pass and passes of Ax.2-Ax.4 (AxiomPrereqFailed
/// otherwise), then compares the candidate with the standard product.
UniquenessDemoReport uniqueness_demo(const Candidate& cand, const std::vector<NamedProcess>& homs,
                                     const InstanceSet& instances, const Tolerances& tol = kDefaultTolerances);

// ---------------------------------------------------------------------------
// Worked counterexamples

struct Ax2SignWitness {
  Effect p;        // diag(1, 2/3)
  Effect q;        // projection onto (1, 1)/sqrt(2)
  Element u_p;     // g(p)
  Element u_p2;    // g(p^2)
  Effect lhs;      // p * (p * q)
  Effect rhs;      // (p * p) * q
  double gap = 0.0;
};

Ax2SignWitness ax2_sign_witness(const Tolerances& tol = kDefaultTolerances);

struct Ax1PqpWitness {
  Effect p;  // diag(1, 1/4)
  Effect unit_product;  // p * 1 = p^2
  double gap = 0.0;     // ||p^2 - p|| = 3/16
};

Ax1PqpWitness ax1_pqp_witness(const Tolerances& tol = kDefaultTolerances);

/// Rank-one Ax.4 instance in M_2 where p * e1 <= 1 - e2 holds and
/// p * e2 <= 1 - e1 fails, for p = diag(1, lambda) and e1 = |v><v| with v at
/// Bloch angles (theta, phi). e2 is the projection orthogonal to p * e1.
struct Ax4Instance {
  double lambda = 0.0;
  double theta = 0.0;
  double phi = 0.0;
};

OrthogonalityInstance ax4_instance(const Candidate& cand, const Ax4Instance& angles,
                                   const Tolerances& tol = kDefaultTolerances);

/// Grid over lambda and Bloch directions, then random rank-one pairs; returns
/// the first instance whose violated side misses by more than witness_margin.
std::optional<Ax4Instance> search_ax4_witness(const Candidate& cand, Rng& rng, std::size_t random_trials = 1000,
                                              const Tolerances& tol = kDefaultTolerances);

/// The frozen result of search_ax4_witness for ax4_phase_candidate.
Ax4Instance ax4_phase_frozen_witness();

}  // namespace seqprod
