#include "seqprod/axioms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "seqprod/random.hpp"

namespace seqprod {

// ---------------------------------------------------------------------------
// Candidates

namespace {

// K = g(p) sqrt(p) from one eigendecomposition per block; p * q = K* q K.
Element twisted_root(const Effect& p, const RealFunction& g, const Tolerances& tol) {
  std::vector<CMatrix> blocks;
  for (const auto& b : p.element().blocks()) {
    const auto eig = eig_hermitian(b, tol);
    const double cut = noise_floor(eig.max_eigenvalue(), tol);
    blocks.push_back(apply_function(eig, [&](double x) { return x > cut ? g(x) * std::sqrt(x) : Complex(0.0); }));
  }
  return {p.algebra(), std::move(blocks)};
}

Element support_phase(const Effect& p, const RealFunction& g, const Tolerances& tol) {
  std::vector<CMatrix> blocks;
  for (const auto& b : p.element().blocks()) {
    const auto eig = eig_hermitian(b, tol);
    const double cut = rank_threshold(eig.max_eigenvalue(), tol);
    blocks.push_back(apply_function(eig, [&](double x) { return x > cut ? g(x) : Complex(0.0); }));
  }
  return {p.algebra(), std::move(blocks)};
}

}  // namespace

Candidate standard_candidate(const Tolerances& tol) {
  Candidate out;
  out.name = "standard";
  out.rule = [tol](const Effect& p, const Effect& q) { return seq_product(p, q, tol); };
  out.certificate = [tol](const Effect& p) { return ceil(p, tol).element(); };
  return out;
}

Candidate twisted_candidate(RealFunction g, std::string name, const Tolerances& tol) {
  for (int k = 0; k <= 1000; ++k) {
    const double x = k / 1000.0;
    if (std::abs(std::abs(g(x)) - 1.0) > tol.unimodular)
      throw Error(ErrorCode::NotUnimodular, "|g(" + std::to_string(x) + ")| != 1");
  }
  Candidate out;
  out.name = std::move(name);
  out.rule = [g, tol](const Effect& p, const Effect& q) {
    require_same_algebra(p.algebra(), q.algebra(), "twisted product");
    const Element k = twisted_root(p, g, tol);
    return Effect(k.adjoint() * q.element() * k, tol);
  };
  out.certificate = [g, tol](const Effect& p) { return support_phase(p, g, tol); };
  out.phase = g;
  return out;
}

Candidate pqp_candidate(const Tolerances& tol) {
  Candidate out;
  out.name = "pqp";
  out.rule = [tol](const Effect& p, const Effect& q) {
    require_same_algebra(p.algebra(), q.algebra(), "pqp product");
    return Effect(p.element() * q.element() * p.element(), tol);
  };
  return out;
}

double sign_phase(double lambda) { return lambda > 0.5 ? 1.0 : -1.0; }

Complex log_phase(double lambda) {
  if (lambda <= 0.0) return 1.0;
  const double beta = std::numbers::pi / std::numbers::ln2;
  return std::polar(1.0, beta * std::log(lambda));
}

Candidate ax2_sign_candidate(const Tolerances& tol) {
  return twisted_candidate([](double x) { return Complex(sign_phase(x)); }, "ax2-sign", tol);
}

Candidate ax4_phase_candidate(const Tolerances& tol) { return twisted_candidate(log_phase, "ax4-phase", tol); }

std::string to_string(Axiom axiom) {
  switch (axiom) {
    case Axiom::Ax1: return "Ax1";
    case Axiom::Ax2: return "Ax2";
    case Axiom::Ax3: return "Ax3";
    case Axiom::Ax4: return "Ax4";
  }
  return "?";
}

std::string to_string(Status status) {
  switch (status) {
    case Status::Pass: return "pass";
    case Status::Fail: return "fail";
    case Status::NotDecidable: return "not-decidable";
  }
  return "?";
}

const AxiomResult& AxiomReport::at(Axiom axiom) const {
  for (const auto& r : results)
    if (r.axiom == axiom) return r;
  throw Error(ErrorCode::UnknownName, "axiom missing from report");
}

bool AxiomReport::all_pass() const {
  return std::all_of(results.begin(), results.end(), [](const AxiomResult& r) { return r.status == Status::Pass; });
}

// ---------------------------------------------------------------------------
// Instances

InstanceSet make_instances(const Algebra& algebra, std::size_t count, Rng& rng) {
  InstanceSet out{algebra, {}, {}};
  auto pick_effect = [&](std::size_t kind) -> Effect {
    switch (kind) {
      case 0: return rng.effect(algebra);
      case 1: return rng.low_rank_effect(algebra);
      default: return rng.projection(algebra).effect();
    }
  };
  auto pick_projection = [&](std::size_t kind) -> Projection {
    return kind == 0 ? rng.rank_one_projection(algebra) : rng.projection(algebra);
  };
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t p_kind = (k % 4 == 3) ? 1 : (k % 4 == 2 ? 2 : 0);
    Effect p = pick_effect(p_kind);
    Effect q = pick_effect(k % 3);
    out.products.push_back({std::move(p), std::move(q)});
  }
  for (std::size_t k = 0; k < count; ++k) {
    Effect p = pick_effect(k % 3 == 2 ? 1 : 0);
    Projection e1 = pick_projection(k % 2);
    Projection e2 = pick_projection((k / 2) % 2);
    out.orthogonality.push_back({std::move(p), std::move(e1), std::move(e2)});
  }
  return out;
}

std::vector<NamedProcess> standard_homs(const Algebra& algebra, Rng& rng) {
  std::vector<NamedProcess> out;
  out.emplace_back("unitary-conjugation", Process::conjugation(rng.unitary(algebra)));
  if (algebra.block_count() == 1) out.emplace_back("block-doubling", block_doubling(algebra.block_dim(0)));
  if (algebra.block_count() > 1) {
    for (std::size_t k = 0; k < algebra.block_count(); ++k)
      out.emplace_back("coordinate-projection-" + std::to_string(k), coordinate_projection(algebra, k));
    for (std::size_t i = 0; i + 1 < algebra.block_count(); ++i)
      for (std::size_t j = i + 1; j < algebra.block_count(); ++j) {
        if (algebra.block_dim(i) != algebra.block_dim(j)) continue;
        std::vector<std::size_t> perm(algebra.block_count());
        for (std::size_t k = 0; k < perm.size(); ++k) perm[k] = k;
        std::swap(perm[i], perm[j]);
        out.emplace_back("block-swap-" + std::to_string(i) + "-" + std::to_string(j),
                         block_permutation(algebra, perm));
      }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Checkers

BlockLinearMap linear_extension(const Candidate& cand, const Effect& p) {
  const Algebra& algebra = p.algebra();
  CMatrix m(algebra.dimension(), algebra.dimension());
  auto value = [&](const Element& e) { return cand.rule(p, Effect(e)).element(); };
  auto store = [&](std::size_t b, std::size_t k, std::size_t l, const Element& image) {
    const std::size_t n = algebra.block_dim(b);
    const auto v = image.to_vector();
    const std::size_t col = algebra.offset(b) + k * n + l;
    for (std::size_t r = 0; r < v.size(); ++r) m(r, col) = v[r];
  };
  for (std::size_t b = 0; b < algebra.block_count(); ++b) {
    const std::size_t n = algebra.block_dim(b);
    std::vector<Element> diag;
    for (std::size_t k = 0; k < n; ++k) {
      diag.push_back(value(Element::matrix_unit(algebra, b, k, k)));
      store(b, k, k, diag.back());
    }
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t l = k + 1; l < n; ++l) {
        const Element ekk = Element::matrix_unit(algebra, b, k, k);
        const Element ell = Element::matrix_unit(algebra, b, l, l);
        const Element ekl = Element::matrix_unit(algebra, b, k, l);
        const Element elk = Element::matrix_unit(algebra, b, l, k);
        const Complex i(0.0, 1.0);
        // Projections onto (e_k + e_l)/sqrt 2 and (e_k + i e_l)/sqrt 2.
        const Element x = (ekk + ell + ekl + elk) * 0.5;
        const Element y = (ekk + ell - ekl * i + elk * i) * 0.5;
        const Element fs = value(x) * 2.0 - diag[k] - diag[l];  // f(E_kl + E_lk)
        const Element ft = value(y) * 2.0 - diag[k] - diag[l];  // f(i E_lk - i E_kl)
        store(b, k, l, (fs + ft * i) * 0.5);
        store(b, l, k, (fs - ft * i) * 0.5);
      }
  }
  return {algebra, algebra, std::move(m)};
}

namespace {

Status classify(double residual, const Tolerances& tol) {
  if (residual <= tol.axiom_residual) return Status::Pass;
  if (residual > tol.witness_margin) return Status::Fail;
  return Status::NotDecidable;
}

void finish(AxiomResult& out, const Tolerances& tol) {
  out.status = classify(out.max_residual, tol);
  if (out.status != Status::Fail) out.witness.reset();
  if (out.status == Status::NotDecidable && out.detail.empty())
    out.detail = "residual between the pass tolerance and the witness margin";
}

}  // namespace

AxiomResult check_ax1(const Candidate& cand, const InstanceSet& instances, const Tolerances& tol) {
  AxiomResult out;
  out.axiom = Axiom::Ax1;
  double unit_gap = 0.0;
  double choi_gap = 0.0;
  double linearity_gap = 0.0;
  double support_gap = 0.0;

  auto bump = [&](double value, const ProductInstance& inst, const char* what) {
    if (value > out.max_residual) {
      out.max_residual = value;
      out.witness = Witness{inst.p, inst.q, std::nullopt, std::nullopt, what, value};
    }
  };

  // Tier 1: necessary conditions for p * q = c(pi(q)).
  for (const auto& inst : instances.products) {
    const Effect& p = inst.p;
    const Element one_product = cand.rule(p, Effect::unit(p.algebra())).element();
    const double g_unit = distance(one_product, p.element(), tol);
    unit_gap = std::max(unit_gap, g_unit);
    bump(g_unit, inst, "p * 1 != p");

    const BlockLinearMap ext = linear_extension(cand, p);
    const double g_choi = std::max(0.0, -ext.choi_min_eigenvalue(tol));
    choi_gap = std::max(choi_gap, g_choi);
    bump(g_choi, inst, "q -> p * q is not completely positive");

    const Element pq = cand.rule(p, inst.q).element();
    const double g_lin = distance(pq, ext.apply(inst.q.element()), tol);
    linearity_gap = std::max(linearity_gap, g_lin);
    bump(g_lin, inst, "q -> p * q is not linear");

    const Element cp = ceil(p, tol).element();
    const Element cpq = support(pq, tol).element();
    const double g_sup = distance(cp * cpq, cpq, tol);
    support_gap = std::max(support_gap, g_sup);
    bump(g_sup, inst, "ceil(p * q) is not below ceil(p)");
  }
  out.metrics["unit_gap"] = unit_gap;
  out.metrics["choi_gap"] = choi_gap;
  out.metrics["linearity_gap"] = linearity_gap;
  out.metrics["support_gap"] = support_gap;
  const double tier1 = out.max_residual;

  if (classify(tier1, tol) != Status::Pass) {
    out.detail = "necessary conditions fail";
    finish(out, tol);
    return out;
  }
  if (!cand.certificate) {
    out.status = Status::NotDecidable;
    out.detail = "necessary conditions hold; no unitary certificate";
    out.witness.reset();
    return out;
  }

  // Tier 2: u_p is a unitary of the corner and reproduces the rule.
  double unitarity = 0.0;
  double form = 0.0;
  for (const auto& inst : instances.products) {
    const Effect& p = inst.p;
    const auto embedding = support_embedding(p.element(), tol);
    const Element u = (*cand.certificate)(p);
    const Element w = embedding.restrict(u);
    const Element corner_one = Element::unit(embedding.corner);
    const double g_unit = std::max(distance(w.adjoint() * w, corner_one, tol), distance(w * w.adjoint(), corner_one, tol));
    unitarity = std::max(unitarity, g_unit);
    bump(g_unit, inst, "certificate is not a unitary of the corner");

    const Element in_corner = embedding.extend(w);
    const Element root = sqrt_psd(p.element(), tol);
    const Element expected = root * in_corner.adjoint() * inst.q.element() * in_corner * root;
    const double g_form = distance(cand.rule(p, inst.q).element(), expected, tol);
    form = std::max(form, g_form);
    bump(g_form, inst, "rule differs from sqrt(p) u* q u sqrt(p)");
  }
  out.metrics["certificate_unitarity"] = unitarity;
  out.metrics["certificate_form"] = form;
  out.detail = "certified";
  finish(out, tol);
  return out;
}

AxiomResult check_ax2(const Candidate& cand, const InstanceSet& instances, const Tolerances& tol) {
  AxiomResult out;
  out.axiom = Axiom::Ax2;
  double phase_identity = 0.0;
  for (const auto& inst : instances.products) {
    const Effect lhs = cand.rule(inst.p, cand.rule(inst.p, inst.q));
    const Effect rhs = cand.rule(cand.rule(inst.p, inst.p), inst.q);
    const double r = distance(lhs.element(), rhs.element(), tol);
    if (r > out.max_residual) {
      out.max_residual = r;
      out.witness = Witness{inst.p, inst.q, std::nullopt, std::nullopt, "", r};
    }
    if (cand.phase) {
      for (const auto& b : inst.p.element().blocks())
        for (double lambda : eig_hermitian(b, tol).eigenvalues) {
          const double x = std::clamp(lambda, 0.0, 1.0);
          const Complex g = (*cand.phase)(x);
          phase_identity = std::max(phase_identity, std::abs(g * g - (*cand.phase)(x * x)));
        }
    }
  }
  if (cand.phase) out.metrics["phase_square_identity"] = phase_identity;
  finish(out, tol);
  return out;
}

AxiomResult check_ax3(const Candidate& cand, const std::vector<NamedProcess>& homs, const InstanceSet& instances,
                      const Tolerances& tol) {
  AxiomResult out;
  out.axiom = Axiom::Ax3;
  std::size_t used = 0;
  for (const auto& [name, f] : homs) {
    if (!(f.source() == instances.algebra)) continue;
    Rng rng(0xa3a3a3ULL);
    // f(1) f(ab) = f(a) f(b) with f(1) idempotent is f(ab) = f(a) f(b).
    if (!is_projection(f.unit_image(), tol) || !is_multiplicative(f, rng, 8, tol))
      throw Error(ErrorCode::NotMultiplicative, name + " is not a *-homomorphism");
    ++used;
    for (const auto& inst : instances.products) {
      const Element lhs = f.apply(cand.rule(inst.p, inst.q).element());
      const Element rhs = cand.rule(f.apply(inst.p, tol), f.apply(inst.q, tol)).element();
      const double r = distance(lhs, rhs, tol);
      if (r > out.max_residual) {
        out.max_residual = r;
        out.witness = Witness{inst.p, inst.q, std::nullopt, std::nullopt, name, r};
      }
    }
  }
  out.metrics["homs"] = static_cast<double>(used);
  finish(out, tol);
  return out;
}

std::pair<double, double> ax4_margins(const Candidate& cand, const Effect& p, const Projection& e1,
                                      const Projection& e2, const Tolerances& tol) {
  const Element one = Element::unit(p.algebra());
  const double first = order_margin(cand.rule(p, e1.effect()).element(), one - e2.element(), tol);
  const double second = order_margin(cand.rule(p, e2.effect()).element(), one - e1.element(), tol);
  return {first, second};
}

namespace {

// Complement of ceil(x) and a rank-one projection inside it, when nonzero.
std::vector<Projection> orthogonal_partners(const Element& x, const Tolerances& tol) {
  std::vector<Projection> out;
  const Element comp = Element::unit(x.algebra()) - support(x, tol).element();
  if (comp.norm(tol) < 0.5) return out;
  out.emplace_back(comp, tol);
  const auto embedding = support_embedding(comp, tol);
  if (embedding.corner.block_count() > 0 && embedding.corner.block_dim(0) > 1) {
    const std::size_t b = embedding.parent_block[0];
    const CMatrix v = embedding.isometries[b].column(0);
    auto e = Element::zero(x.algebra());
    e.block(b) = v * v.adjoint();
    out.emplace_back(e, tol);
  }
  return out;
}

}  // namespace

AxiomResult check_ax4(const Candidate& cand, const InstanceSet& instances, const Tolerances& tol) {
  AxiomResult out;
  out.axiom = Axiom::Ax4;
  std::size_t evaluated = 0;
  std::size_t one_sided_true = 0;
  auto evaluate = [&](const Effect& p, const Projection& e1, const Projection& e2) {
    ++evaluated;
    const auto [m1, m2] = ax4_margins(cand, p, e1, e2, tol);
    const bool t1 = m1 >= -tol.axiom_positivity;
    const bool t2 = m2 >= -tol.axiom_positivity;
    if (!t1 && !t2) return;
    ++one_sided_true;
    const double r = std::max(0.0, -std::min(m1, m2));
    if (r > out.max_residual) {
      out.max_residual = r;
      out.witness = Witness{p, std::nullopt, e1, e2, "", r};
    }
  };
  for (const auto& inst : instances.orthogonality) {
    evaluate(inst.p, inst.e1, inst.e2);
    for (const auto& e2 : orthogonal_partners(cand.rule(inst.p, inst.e1.effect()).element(), tol))
      evaluate(inst.p, inst.e1, e2);
    for (const auto& e1 : orthogonal_partners(cand.rule(inst.p, inst.e2.effect()).element(), tol))
      evaluate(inst.p, e1, inst.e2);
  }
  out.metrics["evaluated"] = static_cast<double>(evaluated);
  out.metrics["with_a_true_side"] = static_cast<double>(one_sided_true);
  finish(out, tol);
  return out;
}

AxiomReport check_all(const Candidate& cand, const std::vector<NamedProcess>& homs, const InstanceSet& instances,
                      const Tolerances& tol) {
  AxiomReport out;
  out.candidate = cand.name;
  out.results.push_back(check_ax1(cand, instances, tol));
  out.results.push_back(check_ax2(cand, instances, tol));
  out.results.push_back(check_ax3(cand, homs, instances, tol));
  out.results.push_back(check_ax4(cand, instances, tol));
  return out;
}

UniquenessDemoReport uniqueness_demo(const Candidate& cand, const std::vector<NamedProcess>& homs,
                                     const InstanceSet& instances, const Tolerances& tol) {
  if (!cand.certificate) throw Error(ErrorCode::AxiomPrereqFailed, cand.name + " has no Ax.1 certificate");
  const AxiomReport report = check_all(cand, homs, instances, tol);
  for (const auto& r : report.results)
    if (r.status != Status::Pass)
      throw Error(ErrorCode::AxiomPrereqFailed, cand.name + " does not pass " + to_string(r.axiom));

  UniquenessDemoReport out;
  for (const auto& inst : instances.products) {
    const Element got = cand.rule(inst.p, inst.q).element();
    out.max_residual = std::max(out.max_residual, distance(got, seq_product(inst.p, inst.q, tol).element(), tol));
    const Element& p = inst.p.element();
    const Effect p2(p * p, tol);
    const Element waypoint = cand.rule(p2, inst.q).element();
    out.waypoint_residual = std::max(out.waypoint_residual, distance(waypoint, p * inst.q.element() * p, tol));
  }
  out.passed = out.max_residual <= tol.uniqueness_demo && out.waypoint_residual <= tol.uniqueness_demo;
  return out;
}

// ---------------------------------------------------------------------------
// Worked counterexamples

Ax2SignWitness ax2_sign_witness(const Tolerances& tol) {
  const Candidate cand = ax2_sign_candidate(tol);
  const Effect p(CMatrix::diagonal({1.0, 2.0 / 3.0}), tol);
  const Effect q(CMatrix{{0.5, 0.5}, {0.5, 0.5}}, tol);
  const auto g = [](double x) { return Complex(sign_phase(x)); };
  const Element u_p = apply_function(p.element(), g, tol);
  const Element u_p2 = apply_function(p.element() * p.element(), g, tol);
  Effect lhs = cand.rule(p, cand.rule(p, q));
  Effect rhs = cand.rule(cand.rule(p, p), q);
  const double gap = distance(lhs.element(), rhs.element(), tol);
  return {p, q, u_p, u_p2, std::move(lhs), std::move(rhs), gap};
}

Ax1PqpWitness ax1_pqp_witness(const Tolerances& tol) {
  const Candidate cand = pqp_candidate(tol);
  const Effect p(CMatrix::diagonal({1.0, 0.25}), tol);
  Effect product = cand.rule(p, Effect::unit(p.algebra()));
  const double gap = distance(product.element(), p.element(), tol);
  return {p, std::move(product), gap};
}

OrthogonalityInstance ax4_instance(const Candidate& cand, const Ax4Instance& angles, const Tolerances& tol) {
  const Effect p(CMatrix::diagonal({1.0, angles.lambda}), tol);
  const CMatrix v{{std::cos(angles.theta / 2)}, {std::polar(std::sin(angles.theta / 2), angles.phi)}};
  const Projection e1(CMatrix(v * v.adjoint()), tol);
  const Element image = cand.rule(p, e1.effect()).element();
  const Projection e2(Element::unit(p.algebra()) - support(image, tol).element(), tol);
  return {p, e1, e2};
}

std::optional<Ax4Instance> search_ax4_witness(const Candidate& cand, Rng& rng, std::size_t random_trials,
                                              const Tolerances& tol) {
  auto violates = [&](const Ax4Instance& a) {
    const auto inst = ax4_instance(cand, a, tol);
    const auto [m1, m2] = ax4_margins(cand, inst.p, inst.e1, inst.e2, tol);
    return m1 >= -tol.axiom_positivity && m2 < -tol.witness_margin;
  };
  const double pi = std::numbers::pi;
  for (double lambda : {0.75, 0.6, 0.45, 0.3, 0.15})
    for (int t = 1; t < 8; ++t)
      for (int f = 0; f < 8; ++f) {
        const Ax4Instance a{lambda, t * pi / 8, f * pi / 4};
        if (violates(a)) return a;
      }
  for (std::size_t k = 0; k < random_trials; ++k) {
    const Ax4Instance a{rng.uniform(0.05, 0.95), std::acos(rng.uniform(-1.0, 1.0)), rng.uniform(0.0, 2 * pi)};
    if (violates(a)) return a;
  }
  return std::nullopt;
}

Ax4Instance ax4_phase_frozen_witness() { return {0.75, std::numbers::pi / 8, 0.0}; }

}  // namespace seqprod
