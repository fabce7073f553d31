#include "seqprod/suite.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numbers>

#include "seqprod/random.hpp"

namespace seqprod {

void RunConfig::validate() const {
  if (samples == 0) throw Error(ErrorCode::PreconditionViolated, "samples must be at least 1");
  if (dims.empty()) throw Error(ErrorCode::PreconditionViolated, "at least one algebra shape is needed");
  for (const auto& shape : dims) {
    if (shape.empty()) throw Error(ErrorCode::PreconditionViolated, "an algebra shape needs at least one block");
    for (auto n : shape)
      if (n == 0 || n > kMaxBlockDim)
        throw Error(ErrorCode::PreconditionViolated,
                    "block dimension " + std::to_string(n) + " outside [1, " + std::to_string(kMaxBlockDim) + "]");
  }
}

namespace {

struct Context {
  const Algebra& algebra;
  Rng& rng;
  const RunConfig& config;
  const Tolerances& tol;
  std::size_t samples;
};

struct Outcome {
  bool passed = true;
  double residual = 0.0;
  Json witness;
  Json details;
};

/// Running maximum of a residual; the first sample attaining it supplies the
/// witness.
struct Tracker {
  double value = 0.0;
  Json witness;
  template <typename Make>
  void update(double v, Make&& make) {
    if (v > value || (witness.is_null() && v > 0.0 && v >= value)) {
      value = v;
      witness = make();
    }
  }
};

using PropertyFn = std::function<Outcome(Context&)>;

struct PropertyDef {
  std::string name;
  bool per_shape = true;
  PropertyFn fn;
};

std::size_t total_dim(const Algebra& algebra) {
  std::size_t n = 0;
  for (auto d : algebra.block_dims()) n += d;
  return n;
}

Outcome bounded(const Tracker& t, double bound) {
  Outcome out;
  out.residual = t.value;
  out.passed = t.value <= bound;
  if (!out.passed) out.witness = t.witness;
  out.details = {{"bound", bound}};
  return out;
}

std::vector<Complex> as_complex(const std::vector<double>& xs) { return {xs.begin(), xs.end()}; }

CMatrix slice(const CMatrix& m, std::size_t r0, std::size_t c0, std::size_t rows, std::size_t cols) {
  CMatrix out(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) out(i, j) = m(r0 + i, c0 + j);
  return out;
}

// Effect whose blocks have a random number of eigenvalues exactly 1.
Effect effect_with_unit_eigenvalues(const Algebra& algebra, Rng& rng) {
  std::vector<CMatrix> blocks;
  for (auto n : algebra.block_dims()) {
    const std::size_t ones = rng.uniform_int(0, n);
    std::vector<double> d(n);
    for (std::size_t k = 0; k < n; ++k) d[k] = k < ones ? 1.0 : rng.uniform(0.0, 0.95);
    const CMatrix u = rng.unitary(n);
    blocks.push_back(u * CMatrix::diagonal(d) * u.adjoint());
  }
  return Effect(Element(algebra, std::move(blocks)));
}

// Random projection below a given projection e.
Projection sub_projection(const Element& e, Rng& rng, const Tolerances& tol) {
  const auto embedding = support_embedding(e, tol);
  auto out = Element::zero(e.algebra());
  for (std::size_t b = 0; b < e.algebra().block_count(); ++b) {
    const CMatrix& v = embedding.isometries[b];
    if (v.cols() == 0) continue;
    const std::size_t k = rng.uniform_int(0, v.cols());
    if (k == 0) continue;
    const CMatrix cols = (v * rng.unitary(v.cols())).columns(0, k);
    out.block(b) = cols * cols.adjoint();
  }
  return Projection(out, tol);
}

double positive_lambda_min(const Effect& p, const Tolerances& tol) {
  double out = std::numeric_limits<double>::infinity();
  for (const auto& b : p.element().blocks()) {
    const auto eig = eig_hermitian(b, tol);
    const double cut = rank_threshold(eig.max_eigenvalue(), tol);
    for (double x : eig.eigenvalues)
      if (x > cut) out = std::min(out, x);
  }
  return out;
}

double max_basis_distance(const Process& a, const Process& b, const Tolerances& tol) {
  double out = 0.0;
  for (const auto& e : Element::basis(a.source())) out = std::max(out, distance(a.apply(e), b.apply(e), tol));
  return out;
}

// ---------------------------------------------------------------------------
// linalg

std::vector<PropertyDef> linalg_properties() {
  std::vector<PropertyDef> out;
  out.push_back({"eig_reconstruction", true, [](Context& c) {
                   Tracker t;
                   const std::size_t n = total_dim(c.algebra);
                   for (std::size_t s = 0; s < c.samples; ++s) {
                     const CMatrix a = c.rng.hermitian(n) * c.rng.uniform(0.1, 10.0);
                     const auto eig = eig_hermitian(a, c.tol);
                     const double r =
                         distance(eig.rebuild(as_complex(eig.eigenvalues)), a) / std::max(1.0, op_norm(a, c.tol));
                     t.update(r, [&] { return Json{{"a", to_json(a)}}; });
                   }
                   return bounded(t, 1e-10);
                 }});
  out.push_back({"eig_unitarity", true, [](Context& c) {
                   Tracker t;
                   const std::size_t n = total_dim(c.algebra);
                   for (std::size_t s = 0; s < c.samples; ++s) {
                     const CMatrix a = c.rng.hermitian(n) * c.rng.uniform(0.1, 10.0);
                     const auto eig = eig_hermitian(a, c.tol);
                     const CMatrix& v = eig.eigenvectors;
                     const double r = distance(v.adjoint() * v, CMatrix::identity(n));
                     t.update(r, [&] { return Json{{"a", to_json(a)}}; });
                   }
                   return bounded(t, 1e-10);
                 }});
  out.push_back({"sqrt_squares_and_commutes", true, [](Context& c) {
                   Tracker t;
                   const std::size_t n = total_dim(c.algebra);
                   for (std::size_t s = 0; s < c.samples; ++s) {
                     const CMatrix m = c.rng.gaussian(n, c.rng.uniform_int(1, n));
                     const CMatrix a = m * m.adjoint();
                     const CMatrix root = sqrt_psd(a, c.tol);
                     const double scale = std::max(1.0, op_norm(a, c.tol));
                     const double r = std::max(op_norm(root * root - a, c.tol), op_norm(root * a - a * root, c.tol)) / scale;
                     t.update(r, [&] { return Json{{"a", to_json(a)}}; });
                   }
                   return bounded(t, 1e-9);
                 }});
  out.push_back({"functional_calculus_homomorphism", true, [](Context& c) {
                   Tracker t;
                   const std::size_t n = total_dim(c.algebra);
                   auto g = [](double x) { return Complex(1.0 + 2.0 * x - x * x); };
                   auto h = [](double x) { return Complex(0.5 * x * x * x - x, x); };
                   auto gh = [&](double x) { return g(x) * h(x); };
                   for (std::size_t s = 0; s < c.samples; ++s) {
                     CMatrix a = c.rng.hermitian(n);
                     a *= c.rng.uniform(0.5, 2.0) / std::max(op_norm(a, c.tol), 1e-300);
                     const CMatrix ga = apply_function(a, g, c.tol);
                     const CMatrix ha = apply_function(a, h, c.tol);
                     const CMatrix direct = CMatrix::identity(n) + a * 2.0 - a * a;
                     const double r = std::max(op_norm(ga * ha - apply_function(a, gh, c.tol), c.tol),
                                               op_norm(ga - direct, c.tol));
                     t.update(r, [&] { return Json{{"a", to_json(a)}}; });
                   }
                   return bounded(t, 1e-9);
                 }});
  out.push_back({"positivity_tests_agree", true, [](Context& c) {
                   Outcome out;
                   const std::size_t n = total_dim(c.algebra);
                   std::size_t disagreements = 0;
                   std::size_t positives = 0;
                   for (std::size_t s = 0; s < c.samples; ++s) {
                     const CMatrix h = c.rng.hermitian(n);
                     const double delta = (s % 2 == 0 ? 1.0 : -1.0) * c.rng.uniform(1e-3, 1.0);
                     const CMatrix a = h - CMatrix::identity(n) * (min_eigenvalue(h, c.tol) + delta);
                     const bool spectral = is_positive(a, c.tol.not_positive, c.tol);
                     const bool by_norm = is_positive_by_norm(a, c.tol.not_positive, c.tol);
                     positives += spectral ? 1 : 0;
                     if (spectral != by_norm || spectral != (delta < 0)) {
                       if (out.witness.is_null()) out.witness = {{"a", to_json(a)}};
                       ++disagreements;
                     }
                   }
                   out.passed = disagreements == 0;
                   out.residual = static_cast<double>(disagreements);
                   out.details = {{"positive", positives}, {"disagreements", disagreements}};
                   return out;
                 }});
  out.push_back({"c_star_identity", true, [](Context& c) {
                   Tracker t;
                   const std::size_t n = total_dim(c.algebra);
                   for (std::size_t s = 0; s < c.samples; ++s) {
                     const CMatrix a = c.rng.gaussian(n, n) * c.rng.uniform(0.1, 10.0);
                     // ||a|| as the spectral radius of the dilation [[0, a], [a*, 0]].
                     CMatrix d(2 * n, 2 * n);
                     for (std::size_t i = 0; i < n; ++i)
                       for (std::size_t j = 0; j < n; ++j) {
                         d(i, n + j) = a(i, j);
                         d(n + j, i) = std::conj(a(i, j));
                       }
                     const double norm = eig_hermitian(d, c.tol).spectral_radius();
                     const double r = std::abs(op_norm(a.adjoint() * a, c.tol) - norm * norm) / (norm * norm);
                     t.update(r, [&] { return Json{{"a", to_json(a)}}; });
                   }
                   return bounded(t, 1e-9);
                 }});
  return out;
}

// ---------------------------------------------------------------------------
// effects

Effect mixed_effect(Rng& rng, const Algebra& algebra, std::size_t s) {
  switch (s % 3) {
    case 0: return rng.effect(algebra);
    case 1: return rng.low_rank_effect(algebra);
    default: return rng.projection(algebra).effect();
  }
}

std::vector<PropertyDef> effects_properties() {
  std::vector<PropertyDef> out;
  out.push_back({"unit_laws", true, [](Context& c) {
                   Tracker t;
                   const Effect one = Effect::unit(c.algebra);
                   for (std::size_t s = 0; s < c.samples; ++s) {
                     const Effect p = mixed_effect(c.rng, c.algebra, s);
                     const double r = std::max(distance(seq_product(one, p, c.tol).element(), p.element(), c.tol),
                                               distance(seq_product(p, one, c.tol).element(), p.element(), c.tol));
                     t.update(r, [&] { return Json{{"p", to_json(p.element())}}; });
                   }
                   return bounded(t, 1e-10);
                 }});
  out.push_back({"standard_ax2_identity", true, [](Context& c) {
                   Tracker t;
                   for (std::size_t s = 0; s < c.samples; ++s) {
                     const Effect p = mixed_effect(c.rng, c.algebra, s);
                     const Effect q = mixed_effect(c.rng, c.algebra, s + 1);
                     const Effect lhs = seq_product(p, seq_product(p, q, c.tol), c.tol);
                     const Effect rhs = seq_product(seq_product(p, p, c.tol), q, c.tol);
                     const double r = distance(lhs.element(), rhs.element(), c.tol);
                     t.update(r, [&] { return Json{{"p", to_json(p.element())}, {"q", to_json(q.element())}}; });
                   }
                   return bounded(t, 1e-9);
                 }});
  out.push_back({"ceil_idempotent_and_fixes_sqrt", true, [](Context& c) {
                   Tracker t;
                   for (std::size_t s = 0; s < c.samples; ++s) {
                     const Effect p = mixed_effect(c.rng, c.algebra, s);
                     const Projection cp = ceil(p, c.tol);
                     const Element root = sqrt_psd(p.element(), c.tol);
                     const double r = std::max(distance(ceil(cp.effect(), c.tol).element(), cp.element(), c.tol),
                                               distance(cp.element() * root, root, c.tol));
                     t.update(r, [&] { return Json{{"p", to_json(p.element())}}; });
                   }
                   return bounded(t, 1e-9);
                 }});
  out.push_back({"floor_below_p_below_ceil", true, [](Context& c) {
                   Tracker t;
                   for (std::size_t s = 0; s < c.samples; ++s) {
                     const Effect p = s % 2 == 0 ? effect_with_unit_eigenvalues(c.algebra, c.rng)
                                                 : mixed_effect(c.rng, c.algebra, s / 2);
                     const double lower = order_margin(floor(p, c.tol).element(), p.element(), c.tol);
                     const double upper = order_margin(p.element(), ceil(p, c.tol).element(), c.tol);
                     const double r = std::max(0.0, -std::min(lower, upper));
                     t.update(r, [&] { return Json{{"p", to_json(p.element())}}; });
                   }
                   return bounded(t, c.tol.order);
                 }});
  out.push_back({"connected_agreement", true, [](Context& c) {
                   Outcome out;
                   std::size_t disagreements = 0;
                   std::size_t all_true = 0;
                   for (std::size_t s = 0; s < c.samples; ++s) {
                     const Element a = c.rng.contraction(c.algebra);
                     const Projection e1 = c.rng.projection(c.algebra);
                     const Element comp =
                         Element::unit(c.algebra) - support(a.adjoint() * e1.element() * a, c.tol).element();
                     const Projection e2 = (s % 2 == 0) ? sub_projection(comp, c.rng, c.tol) : c.rng.projection(c.algebra);
                     const ConnectedReport r = check_connected(a, e1, e2, c.tol);
                     if (r.sandwich_e1 && r.agree()) ++all_true;
                     if (!r.agree()) {
                       ++disagreements;
                       if (out.witness.is_null())
                         out.witness = {{"a", to_json(a)}, {"e1", to_json(e1.element())}, {"e2", to_json(e2.element())}};
                     }
                   }
                   out.passed = disagreements == 0;
                   out.residual = static_cast<double>(disagreements);
                   out.details = {{"all_true", all_true}, {"disagreements", disagreements}};
                   return out;
                 }});
  out.push_back({"commuting_sqrt", true, [](Context& c) {
                   Tracker t;
                   for (std::size_t s = 0; s < c.samples; ++s) {
                     std::vector<CMatrix> bs;
                     std::vector<CMatrix> as;
                     for (auto n : c.algebra.block_dims()) {
                       const CMatrix u = c.rng.unitary(n);
                       std::vector<double> lambda(n);
                       std::vector<Complex> mu(n);
                       for (std::size_t k = 0; k < n; ++k) {
                         lambda[k] = c.rng.uniform(0.0, 3.0);
                         mu[k] = c.rng.complex_normal();
                       }
                       bs.push_back(u * CMatrix::diagonal(lambda) * u.adjoint());
                       as.push_back(u * CMatrix::diagonal(mu) * u.adjoint());
                     }
                     const Element b(c.algebra, std::move(bs));
                     const Element a(c.algebra, std::move(as));
                     const Element root = sqrt_psd(b, c.tol);
                     const double r = distance(a * root, root * a, c.tol) / std::max(1.0, a.norm(c.tol));
                     t.update(r, [&] { return Json{{"a", to_json(a)}, {"b", to_json(b)}}; });
                   }
                   return bounded(t, 1e-9);
                 }});
  return out;
}

// ---------------------------------------------------------------------------
// processes

Process unitary_mixture(const Algebra& algebra, Rng& rng) {
  const double t = rng.uniform(0.2, 0.8);
  const Element u1 = rng.unitary(algebra);
  const Element u2 = rng.unitary(algebra);
  Process::KrausMap kraus;
  for (std::size_t i = 0; i < algebra.block_count(); ++i)
    kraus[{i, i}] = {u1.block(i) * std::sqrt(t), u2.block(i) * std::sqrt(1.0 - t)};
  return {algebra, algebra, std::move(kraus)};
}

std::vector<PropertyDef> processes_properties() {
  std::vector<PropertyDef> out;
  out.push_back({"choi_psd_for_kraus_maps", true, [](Context& c) {
                   Tracker t;
                   std::size_t failures = 0;
                   for (std::size_t s = 0; s < c.samples; ++s) {
                     const Process f = c.rng.process(c.algebra, c.algebra);
                     const BlockLinearMap m = f.linear_map();
                     const double r = std::max(0.0, -m.choi_min_eigenvalue(c.tol));
                     if (!m.choi_positive(c.tol)) ++failures;
                     t.update(r, [&] { return Json{{"process", to_json(f)}}; });
                   }
                   Outcome o = bounded(t, c.tol.choi);
                   o.passed = failures == 0;
                   return o;
                 }});
  out.push_back({"transpose_not_cp", true, [](Context& c) {
                   Outcome out;
                   const BlockLinearMap tr = BlockLinearMap::transpose(c.algebra);
                   const double lambda = tr.choi_min_eigenvalue(c.tol);
                   const bool has_nontrivial_block =
                       std::any_of(c.algebra.block_dims().begin(), c.algebra.block_dims().end(),
                                   [](std::size_t n) { return n > 1; });
                   const double expected = has_nontrivial_block ? -1.0 : 1.0;
                   out.residual = std::abs(lambda - expected);
                   out.passed = out.residual <= 1e-9 && tr.choi_positive(c.tol) == !has_nontrivial_block;
                   out.details = {{"choi_min_eigenvalue", lambda}};
                   return out;
                 }});
  out.push_back({"kadison_inequality", true, [](Context& c) {
                   Tracker t;
                   const std::size_t n = total_dim(c.algebra);
                   for (std::size_t s = 0; s < c.samples; ++s) {
                     const CMatrix m = c.rng.gaussian(n, c.rng.uniform_int(1, n));
                     CMatrix rho = m * m.adjoint();
                     rho *= 1.0 / rho.trace().real();
                     CMatrix a = c.rng.gaussian(n, n);
                     CMatrix b = c.rng.gaussian(n, n);
                     a *= 1.0 / op_norm(a, c.tol);
                     b *= 1.0 / op_norm(b, c.tol);
                     const double r = std::max(0.0, -kadison_slack(rho, a, b));
                     t.update(r, [&] { return Json{{"rho", to_json(rho)}, {"a", to_json(a)}, {"b", to_json(b)}}; });
                   }
                   return bounded(t, c.tol.inequality_slack);
                 }});
  out.push_back({"block_positivity_consequences", true, [](Context& c) {
                   Tracker t;
                   std::size_t failures = 0;
                   const std::size_t n = c.algebra.block_dims().front();
                   const std::size_t m = c.algebra.block_dims().back();
                   for (std::size_t s = 0; s < c.samples; ++s) {
                     const CMatrix g = c.rng.gaussian(n + m, c.rng.uniform_int(1, n + m));
                     CMatrix whole = g * g.adjoint();
                     whole *= 1.0 / op_norm(whole, c.tol);
                     const CMatrix p = slice(whole, 0, 0, n, n);
                     const CMatrix a = slice(whole, 0, n, n, m);
                     const CMatrix q = slice(whole, n, n, m, m);
                     const Block2Report r = block2_positivity(p, a, q, c.tol);
                     const bool ok = r.positive && r.consequences_hold();
                     if (!ok) ++failures;
                     t.update(ok ? std::max(0.0, -r.min_slack) : std::max(1.0, -r.min_slack),
                              [&] { return Json{{"block_matrix", to_json(whole)}}; });
                   }
                   Outcome o = bounded(t, c.tol.inequality_slack);
                   o.passed = o.passed && failures == 0;
                   return o;
                 }});
  out.push_back({"cauchy_schwarz", true, [](Context& c) {
                   Tracker t;
                   std::size_t failures = 0;
                   for (std::size_t s = 0; s < c.samples; ++s) {
                     const Process f = c.rng.process(c.algebra, c.algebra);
                     const Element a = c.rng.contraction(c.algebra);
                     const Element b = c.rng.contraction(c.algebra);
                     const CauchySchwarzReport r = cs_inequalities(f, a, b, c.tol);
                     if (!r.all()) ++failures;
                     t.update(std::max(0.0, -r.min_slack),
                              [&] { return Json{{"process", to_json(f)}, {"a", to_json(a)}, {"b", to_json(b)}}; });
                   }
                   Outcome o = bounded(t, c.tol.inequality_slack);
                   o.passed = o.passed && failures == 0;
                   return o;
                 }});
  out.push_back({"multiplicativity_characterizations", true, [](Context& c) {
                   Outcome out;
                   std::size_t failures = 0;
                   std::size_t multiplicative = 0;
                   const auto homs = [&] {
                     Rng r(c.rng.engine()());
                     return standard_homs(c.algebra, r);
                   }();
                   for (std::size_t s = 0; s < c.samples; ++s) {
                     bool expected = true;
                     std::optional<Process> f;
                     switch (s % 3) {
                       case 0: f = Process::conjugation(c.rng.unitary(c.algebra)); break;
                       case 1:
                         f = unitary_mixture(c.algebra, c.rng);
                         expected = false;
                         break;
                       default: f = homs[(s / 3) % homs.size()].second; break;
                     }
                     const AwmultReport r = awmult_equivalence(*f, c.rng, 16, c.tol);
                     multiplicative += r.multiplicative ? 1 : 0;
                     if (!r.agree() || r.multiplicative != expected) {
                       ++failures;
                       if (out.witness.is_null()) out.witness = {{"process", to_json(*f)}};
                     }
                   }
                   out.passed = failures == 0;
                   out.residual = static_cast<double>(failures);
                   out.details = {{"multiplicative", multiplicative}, {"failures", failures}};
                   return out;
                 }});
  out.push_back({"proportionality_coefficient", true, [](Context& c) {
                   Tracker t;
                   const std::size_t n = total_dim(c.algebra);
                   for (std::size_t s = 0; s < c.samples; ++s) {
                     const CMatrix g = c.rng.gaussian(n, n);
                     const Complex alpha = c.rng.complex_normal();
                     const auto got = proportionality_coefficient(g * alpha, g, c.tol);
                     const double r = got ? std::abs(*got - alpha) : 1.0;
                     t.update(r, [&] { return Json{{"g", to_json(g)}, {"alpha", {alpha.real(), alpha.imag()}}}; });
                   }
                   return bounded(t, 1e-9);
                 }});
  return out;
}

// ---------------------------------------------------------------------------
// universal

// f = c o pi o h, so that f(1) = sqrt(p) h(1) sqrt(p) <= p.
Process below_compression(const Effect& p, Rng& rng, const Tolerances& tol) {
  const auto embedding = support_embedding(p.element(), tol);
  const Process h = rng.process(p.algebra(), p.algebra());
  return compose(compression_process(embedding, p, tol), compose(corner_process(embedding), h));
}

// lambda_max / lambda_min over the nonzero spectrum of p.
double support_condition_number(const Effect& p, const Tolerances& tol) {
  double hi = 0.0;
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t b = 0; b < p.algebra().block_count(); ++b) {
    const auto eig = eig_hermitian(p.block(b), tol);
    hi = std::max(hi, eig.max_eigenvalue());
    for (double x : eig.eigenvalues)
      if (x > rank_threshold(eig.max_eigenvalue(), tol)) lo = std::min(lo, x);
  }
  return std::isfinite(lo) && hi > 0.0 ? std::max(1.0, hi / lo) : 1.0;
}

std::vector<PropertyDef> universal_properties() {
  std::vector<PropertyDef> out;
  out.push_back({"compression_finality", true, [](Context& c) {
                   Tracker t;
                   std::size_t not_unique = 0;
                   for (std::size_t s = 0; s < c.samples; ++s) {
                     const Effect p = s % 2 == 0 ? c.rng.effect(c.algebra) : c.rng.low_rank_effect(c.algebra);
                     const Process f = below_compression(p, c.rng, c.tol);
                     const FactorizationResult r = factor_through_compression(f, p, c.tol);
                     if (!r.unique) ++not_unique;
                     t.update(r.unique ? r.residual : std::max(1.0, r.residual),
                              [&] { return Json{{"p", to_json(p.element())}, {"f", to_json(f)}}; });
                   }
                   Outcome o = bounded(t, c.tol.factorization);
                   o.details["not_unique"] = not_unique;
                   return o;
                 }});
  out.push_back({"compression_limit", true, [](Context& c) {
                   Tracker t;
                   std::size_t wrong_index = 0;
                   std::size_t checked = 0;
                   for (std::size_t s = 0; s < c.samples; ++s) {
                     Effect p = c.rng.low_rank_effect(c.algebra);
                     if (p.element().norm(c.tol) == 0.0) continue;
                     const double lambda = positive_lambda_min(p, c.tol);
                     if (!std::isfinite(lambda)) continue;
                     ++checked;
                     const auto expected = static_cast<std::size_t>(std::ceil(1.0 / lambda));
                     const Process f = below_compression(p, c.rng, c.tol);
                     const LimitFactorization lim = factor_through_compression_by_limit(f, p, expected + 2, c.tol);
                     const FactorizationResult closed = factor_through_compression(f, p, c.tol);
                     double r = std::max(lim.result.residual, max_basis_distance(lim.result.mediator, closed.mediator, c.tol));
                     const bool index_ok = lim.stabilized_at && *lim.stabilized_at == expected;
                     if (!index_ok) {
                       ++wrong_index;
                       r = std::max(r, 1.0);
                     }
                     t.update(r, [&] {
                       return Json{{"p", to_json(p.element())},
                                   {"expected_index", expected},
                                   {"stabilized_at", lim.stabilized_at ? Json(*lim.stabilized_at) : Json()}};
                     });
                   }
                   Outcome o = bounded(t, c.tol.factorization);
                   o.details["checked"] = checked;
                   o.details["wrong_index"] = wrong_index;
                   return o;
                 }});
  out.push_back({"corner_initiality", true, [](Context& c) {
                   Tracker t;
                   std::size_t not_unique = 0;
                   for (std::size_t s = 0; s < c.samples; ++s) {
                     const Effect p = effect_with_unit_eigenvalues(c.algebra, c.rng);
                     const auto embedding = floor_embedding(p, c.tol);
                     const Process h = c.rng.process(embedding.corner, c.algebra);
                     const Process g = compose(h, corner_process(embedding));
                     const FactorizationResult r = factor_through_corner(g, p, c.tol);
                     if (!r.unique) ++not_unique;
                     t.update(r.unique ? r.residual : std::max(1.0, r.residual),
                              [&] { return Json{{"p", to_json(p.element())}, {"g", to_json(g)}}; });
                   }
                   Outcome o = bounded(t, c.tol.factorization);
                   o.details["not_unique"] = not_unique;
                   return o;
                 }});
  out.push_back({"compressions_related_by_isomorphism", true, [](Context& c) {
                   Tracker t;
                   std::size_t failures = 0;
                   double worst_kappa = 1.0;
                   for (std::size_t s = 0; s < c.samples; ++s) {
                     const Effect p = c.rng.effect(c.algebra);
                     const auto [embedding, c1] = make_compression(p, c.tol);
                     const Process c2 = compose(c1, Process::conjugation(c.rng.unitary(embedding.corner)));
                     const Process theta = factor_through_compression(c2, p, c.tol).mediator;
                     // Inverting a -> sqrt(p) a sqrt(p) loses accuracy in proportion to
                     // the condition number of p on its support.
                     const double kappa = support_condition_number(p, c.tol);
                     worst_kappa = std::max(worst_kappa, kappa);
                     Tolerances loose = c.tol;
                     loose.choi *= kappa;
                     loose.factorization *= kappa;
                     loose.multiplicative *= kappa;
                     loose.contractive *= kappa;
                     loose.unital *= kappa;
                     bool iso = false;
                     double residual = 1.0;
                     try {
                       const LinearSolution back = solve_linear_factorization(c2.linear_map(), c1.linear_map(), loose);
                       residual = back.residual / kappa;
                       const Process theta_inv = Process::from_linear_map(back.solution, loose);
                       iso = invertible_process_is_iso(theta, theta_inv, c.rng, 8, loose);
                     } catch (const Error&) {
                       iso = false;
                     }
                     if (!iso) ++failures;
                     t.update(iso ? residual : std::max(1.0, residual),
                              [&] { return Json{{"p", to_json(p.element())}, {"second", to_json(c2)}}; });
                   }
                   Outcome o = bounded(t, c.tol.factorization);
                   o.details["failures"] = failures;
                   o.details["max_condition_number"] = worst_kappa;
                   return o;
                 }});
  out.push_back({"compression_after_corner_is_product", true, [](Context& c) {
                   Tracker t;
                   for (std::size_t s = 0; s < c.samples; ++s) {
                     const Effect p = mixed_effect(c.rng, c.algebra, s);
                     const Effect q = c.rng.effect(c.algebra);
                     const auto embedding = support_embedding(p.element(), c.tol);
                     const Process cp = compose(compression_process(embedding, p, c.tol), corner_process(embedding));
                     const double r = distance(cp.apply(q.element()), seq_product(p, q, c.tol).element(), c.tol);
                     t.update(r, [&] { return Json{{"p", to_json(p.element())}, {"q", to_json(q.element())}}; });
                   }
                   return bounded(t, 1e-9);
                 }});
  return out;
}

// ---------------------------------------------------------------------------
// axioms

struct ExpectedStatuses {
  Status ax1, ax2, ax3, ax4;
};

Outcome statuses_match(const AxiomReport& report, const ExpectedStatuses& expected) {
  Outcome out;
  const Status want[] = {expected.ax1, expected.ax2, expected.ax3, expected.ax4};
  std::size_t mismatches = 0;
  Json wrong = Json::array();
  for (std::size_t k = 0; k < 4; ++k) {
    const AxiomResult& r = report.results[k];
    if (r.status != want[k]) {
      ++mismatches;
      Json entry = to_json(r);
      entry["expected"] = to_string(want[k]);
      wrong.push_back(std::move(entry));
    }
  }
  out.passed = mismatches == 0;
  out.residual = static_cast<double>(mismatches);
  if (!out.passed) out.witness = std::move(wrong);
  Json statuses = Json::object();
  for (const auto& r : report.results) statuses[to_string(r.axiom)] = to_string(r.status);
  Json residuals = Json::object();
  for (const auto& r : report.results) residuals[to_string(r.axiom)] = r.max_residual;
  out.details = {{"statuses", statuses}, {"max_residuals", residuals}};
  return out;
}

struct AxiomRun {
  InstanceSet instances;
  std::vector<NamedProcess> homs;
};

AxiomRun axiom_run(Context& c) {
  InstanceSet instances = make_instances(c.algebra, c.samples, c.rng);
  std::vector<NamedProcess> homs = standard_homs(c.algebra, c.rng);
  return {std::move(instances), std::move(homs)};
}

constexpr ExpectedStatuses kAllPass{Status::Pass, Status::Pass, Status::Pass, Status::Pass};

std::vector<PropertyDef> axioms_properties() {
  std::vector<PropertyDef> out;
  out.push_back({"standard_passes_all", true, [](Context& c) {
                   const AxiomRun run = axiom_run(c);
                   const AxiomReport report = check_all(standard_candidate(c.tol), run.homs, run.instances, c.tol);
                   Outcome o = statuses_match(report, kAllPass);
                   double worst = 0.0;
                   for (const auto& r : report.results) worst = std::max(worst, r.max_residual);
                   o.residual = worst;
                   o.passed = o.passed && worst <= c.tol.axiom_residual;
                   return o;
                 }});
  out.push_back({"uniqueness_demo", true, [](Context& c) {
                   const AxiomRun run = axiom_run(c);
                   Outcome o;
                   o.details = Json::object();
                   const Candidate candidates[] = {
                       standard_candidate(c.tol),
                       twisted_candidate([](double) { return Complex(1.0); }, "twisted-one", c.tol)};
                   for (const auto& cand : candidates) {
                     const UniquenessDemoReport r = uniqueness_demo(cand, run.homs, run.instances, c.tol);
                     o.details[cand.name] = {{"passed", r.passed},
                                             {"max_residual", r.max_residual},
                                             {"waypoint_residual", r.waypoint_residual}};
                     o.residual = std::max({o.residual, r.max_residual, r.waypoint_residual});
                     o.passed = o.passed && r.passed;
                   }
                   return o;
                 }});
  out.push_back({"counterexamples_fail_only_their_axiom", true, [](Context& c) {
                   const AxiomRun run = axiom_run(c);
                   Outcome o;
                   o.details = Json::object();
                   Json witness = Json::object();
                   const std::pair<Candidate, ExpectedStatuses> cases[] = {
                       {pqp_candidate(c.tol), {Status::Fail, Status::Pass, Status::Pass, Status::Pass}},
                       {ax2_sign_candidate(c.tol), {Status::Pass, Status::Fail, Status::Pass, Status::Pass}},
                       {ax4_phase_candidate(c.tol), {Status::Pass, Status::Pass, Status::Pass, Status::Fail}}};
                   for (const auto& [cand, expected] : cases) {
                     const Outcome one = statuses_match(check_all(cand, run.homs, run.instances, c.tol), expected);
                     o.details[cand.name] = one.details;
                     if (!one.passed) witness[cand.name] = one.witness;
                     o.residual += one.residual;
                     o.passed = o.passed && one.passed;
                   }
                   if (!o.passed) o.witness = std::move(witness);
                   return o;
                 }});
  out.push_back({"ax4_phase_square_identity", true, [](Context& c) {
                   const AxiomRun run = axiom_run(c);
                   const AxiomResult r = check_ax2(ax4_phase_candidate(c.tol), run.instances, c.tol);
                   Outcome o;
                   o.residual = r.metrics.at("phase_square_identity");
                   o.passed = o.residual <= c.tol.unimodular && r.status == Status::Pass;
                   o.details = to_json(r);
                   return o;
                 }});
  out.push_back({"ax1_pqp_exact_gap", false, [](Context& c) {
                   const Ax1PqpWitness w = ax1_pqp_witness(c.tol);
                   Outcome o;
                   o.residual = std::abs(w.gap - 3.0 / 16.0);
                   o.passed = o.residual <= 1e-12;
                   o.details = {{"gap", w.gap}, {"expected", 3.0 / 16.0}};
                   return o;
                 }});
  out.push_back({"ax2_sign_exact_witness", false, [](Context& c) {
                   const Ax2SignWitness w = ax2_sign_witness(c.tol);
                   const double r = std::max(distance(w.u_p, Element::unit(w.p.algebra()), c.tol),
                                             distance(w.u_p2, Element(CMatrix::diagonal({1.0, -1.0})), c.tol));
                   Outcome o;
                   o.residual = r;
                   o.passed = r <= 1e-12 && w.gap >= 2.0 / 3.0 - 1e-12;
                   o.details = {{"gap", w.gap}, {"frozen_bound", 2.0 / 3.0}};
                   return o;
                 }});
  out.push_back({"ax4_phase_frozen_witness", false, [](Context& c) {
                   const Candidate cand = ax4_phase_candidate(c.tol);
                   const Ax4Instance a = ax4_phase_frozen_witness();
                   const OrthogonalityInstance inst = ax4_instance(cand, a, c.tol);
                   const auto [first, second] = ax4_margins(cand, inst.p, inst.e1, inst.e2, c.tol);
                   Outcome o;
                   o.residual = std::max(0.0, -first);
                   o.passed = first >= -c.tol.axiom_positivity && second < -c.tol.witness_margin;
                   o.details = {{"lambda", a.lambda}, {"theta", a.theta}, {"phi", a.phi},
                                {"holding_margin", first}, {"violated_margin", second}};
                   return o;
                 }});
  return out;
}

const std::map<std::string, std::vector<PropertyDef>>& registry() {
  static const std::map<std::string, std::vector<PropertyDef>> r = {
      {"linalg", linalg_properties()},
      {"effects", effects_properties()},
      {"processes", processes_properties()},
      {"universal", universal_properties()},
      {"axioms", axioms_properties()}};
  return r;
}

const std::vector<PropertyDef>& suite_defs(const std::string& suite) {
  const auto& r = registry();
  const auto it = r.find(suite);
  if (it == r.end()) throw Error(ErrorCode::UnknownName, "unknown suite \"" + suite + "\"");
  return it->second;
}

std::vector<PropertyResult> run_def(const std::string& suite, const PropertyDef& def, const RunConfig& config) {
  std::vector<PropertyResult> out;
  auto run_one = [&](const std::vector<std::size_t>& shape, std::uint64_t index) {
    const Algebra algebra(shape.empty() ? std::vector<std::size_t>{2} : shape);
    Rng rng = Rng::stream(config.seed, suite, def.name, index);
    Context ctx{algebra, rng, config, config.tol, config.samples};
    PropertyResult r;
    r.suite = suite;
    r.name = def.name;
    r.shape = shape;
    r.samples = def.per_shape ? config.samples : 1;
    try {
      Outcome o = def.fn(ctx);
      r.passed = o.passed;
      r.residual = o.residual;
      r.witness = std::move(o.witness);
      r.details = std::move(o.details);
    } catch (const Error& e) {
      r.passed = false;
      r.residual = std::numeric_limits<double>::infinity();
      r.details = {{"error", std::string(to_string(e.code()))}, {"message", e.what()}};
    }
    out.push_back(std::move(r));
  };
  if (def.per_shape) {
    for (std::size_t k = 0; k < config.dims.size(); ++k) run_one(config.dims[k], k);
  } else {
    run_one({}, 0);
  }
  return out;
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"linalg", "effects", "processes", "universal", "axioms"};
  return names;
}

std::vector<std::string> property_names(const std::string& suite) {
  std::vector<std::string> out;
  for (const auto& d : suite_defs(suite)) out.push_back(d.name);
  return out;
}

std::vector<PropertyResult> run_suite(const std::string& suite, const RunConfig& config) {
  config.validate();
  std::vector<PropertyResult> out;
  const std::vector<std::string> suites = suite == "all" ? suite_names() : std::vector<std::string>{suite};
  for (const auto& s : suites)
    for (const auto& def : suite_defs(s))
      for (auto& r : run_def(s, def, config)) out.push_back(std::move(r));
  return out;
}

std::vector<PropertyResult> run_property(const std::string& suite, const std::string& property,
                                         const RunConfig& config) {
  config.validate();
  for (const auto& def : suite_defs(suite))
    if (def.name == property) return run_def(suite, def, config);
  throw Error(ErrorCode::UnknownName, "unknown property \"" + suite + "/" + property + "\"");
}

bool all_passed(const std::vector<PropertyResult>& results) {
  return std::all_of(results.begin(), results.end(), [](const PropertyResult& r) { return r.passed; });
}

Json to_json(const PropertyResult& r) {
  Json out;
  out["suite"] = r.suite;
  out["property"] = r.name;
  out["shape"] = r.shape;
  out["passed"] = r.passed;
  // JSON has no infinity; errors are reported through details.
  out["residual"] = std::isfinite(r.residual) ? Json(r.residual) : Json();
  out["samples"] = r.samples;
  if (!r.details.is_null()) out["details"] = r.details;
  if (!r.witness.is_null()) out["witness"] = r.witness;
  return out;
}

namespace {

Json config_json(const RunConfig& config) {
  Json out;
  out["seed"] = config.seed;
  out["samples"] = config.samples;
  out["dims"] = config.dims;
  Json overrides = Json::object();
  const auto defaults = Tolerances{}.as_map();
  for (const auto& [name, value] : config.tol.as_map())
    if (defaults.at(name) != value) overrides[name] = value;
  out["tolerance_overrides"] = std::move(overrides);
  return out;
}

}  // namespace

Json suite_report(const std::string& suite, const RunConfig& config, const std::vector<PropertyResult>& results) {
  Json out;
  out["schema"] = 1;
  out["command"] = "verify";
  out["suite"] = suite;
  out["config"] = config_json(config);
  out["passed"] = all_passed(results);
  Json props = Json::array();
  for (const auto& r : results) props.push_back(to_json(r));
  out["properties"] = std::move(props);
  return out;
}

const std::vector<std::string>& counterexample_names() {
  static const std::vector<std::string> names = {"ax1-pqp", "ax2-sign", "ax4-phase"};
  return names;
}

CommandReport counterexample_report(const std::string& name, const RunConfig& config) {
  config.validate();
  const Tolerances& tol = config.tol;
  Candidate cand;
  ExpectedStatuses expected = kAllPass;
  Json witness;
  bool witness_ok = false;
  if (name == "ax1-pqp") {
    cand = pqp_candidate(tol);
    expected.ax1 = Status::Fail;
    const Ax1PqpWitness w = ax1_pqp_witness(tol);
    witness = {{"p", to_json(w.p.element())}, {"p_star_one", to_json(w.unit_product.element())}, {"gap", w.gap}};
    witness_ok = std::abs(w.gap - 3.0 / 16.0) <= 1e-12;
  } else if (name == "ax2-sign") {
    cand = ax2_sign_candidate(tol);
    expected.ax2 = Status::Fail;
    const Ax2SignWitness w = ax2_sign_witness(tol);
    witness = {{"p", to_json(w.p.element())},
               {"q", to_json(w.q.element())},
               {"u_p", to_json(w.u_p)},
               {"u_p2", to_json(w.u_p2)},
               {"p_star_p_star_q", to_json(w.lhs.element())},
               {"p_star_p_then_q", to_json(w.rhs.element())},
               {"gap", w.gap}};
    witness_ok = w.gap > tol.witness_margin;
  } else if (name == "ax4-phase") {
    cand = ax4_phase_candidate(tol);
    expected.ax4 = Status::Fail;
    const Ax4Instance a = ax4_phase_frozen_witness();
    const OrthogonalityInstance inst = ax4_instance(cand, a, tol);
    const auto [first, second] = ax4_margins(cand, inst.p, inst.e1, inst.e2, tol);
    witness = {{"lambda", a.lambda},
               {"theta", a.theta},
               {"phi", a.phi},
               {"p", to_json(inst.p.element())},
               {"e1", to_json(inst.e1.element())},
               {"e2", to_json(inst.e2.element())},
               {"margin_p_star_e1_below_1_minus_e2", first},
               {"margin_p_star_e2_below_1_minus_e1", second}};
    witness_ok = first >= -tol.axiom_positivity && second < -tol.witness_margin;
  } else {
    throw Error(ErrorCode::UnknownName, "unknown counterexample \"" + name + "\"");
  }

  Json sampled = Json::array();
  bool statuses_ok = true;
  for (std::size_t k = 0; k < config.dims.size(); ++k) {
    const Algebra algebra(config.dims[k]);
    Rng rng = Rng::stream(config.seed, "counterexample", name, k);
    const InstanceSet instances = make_instances(algebra, config.samples, rng);
    const auto homs = standard_homs(algebra, rng);
    const AxiomReport report = check_all(cand, homs, instances, tol);
    const Outcome o = statuses_match(report, expected);
    statuses_ok = statuses_ok && o.passed;
    Json entry = {{"shape", config.dims[k]}, {"matches_expected", o.passed}, {"report", to_json(report)}};
    sampled.push_back(std::move(entry));
  }

  CommandReport out;
  out.expected = witness_ok && statuses_ok;
  out.report["schema"] = 1;
  out.report["command"] = "counterexample";
  out.report["name"] = name;
  out.report["config"] = config_json(config);
  out.report["witness"] = std::move(witness);
  out.report["witness_reproduced"] = witness_ok;
  out.report["sampled"] = std::move(sampled);
  out.report["expected_outcome"] = out.expected;
  return out;
}

BlockLinearMap linear_map_from_json(const Json& j, const Tolerances& tol) {
  if (!j.is_object()) throw Error(ErrorCode::ParseError, "a map is a JSON object");
  if (j.contains("kraus")) {
    // Certification reports contractivity instead of rejecting the input.
    Tolerances relaxed = tol;
    relaxed.contractive = std::numeric_limits<double>::infinity();
    return process_from_json(j, relaxed).linear_map();
  }
  if (!j.contains("matrix")) throw Error(ErrorCode::ParseError, "a map needs \"kraus\" or \"matrix\"");
  if (!j.contains("source") || !j.contains("target"))
    throw Error(ErrorCode::ParseError, "a map needs \"source\" and \"target\"");
  const Algebra source = algebra_from_json(j.at("source"));
  const Algebra target = algebra_from_json(j.at("target"));
  CMatrix m = matrix_from_json(j.at("matrix"));
  if (m.rows() != target.dimension() || m.cols() != source.dimension())
    throw Error(ErrorCode::ParseError, "\"matrix\" must be dim(target) x dim(source)");
  return {source, target, std::move(m)};
}

Json certify_report(const BlockLinearMap& f, const RunConfig& config) {
  config.validate();
  const Tolerances& tol = config.tol;
  const Algebra& src = f.source();
  const Algebra& tgt = f.target();
  const bool cp = f.choi_positive(tol);
  Rng rng = Rng::stream(config.seed, "certify", "positivity", 0);
  const bool two_positive = cp || is_n_positive(f, 2, rng, config.samples, tol);
  const bool positive = two_positive || is_n_positive(f, 1, rng, config.samples, tol);

  const Element f1 = f.apply(Element::unit(src));
  const Element one = Element::unit(tgt);
  const bool unital = distance(f1, one, tol) <= tol.unital;
  const bool contractive = positive && leq(f1, one, tol);

  Rng mult_rng = Rng::stream(config.seed, "certify", "multiplicative", 0);
  double mult_residual = 0.0;
  for (std::size_t s = 0; s < config.samples; ++s) {
    const Element a = mult_rng.gaussian(src);
    const Element b = mult_rng.gaussian(src);
    const double scale = std::max(1.0, a.norm(tol) * b.norm(tol));
    mult_residual = std::max(mult_residual, distance(f.apply(a * b), f.apply(a) * f.apply(b), tol) / scale);
    mult_residual = std::max(mult_residual, distance(f.apply(a.adjoint()), f.apply(a).adjoint(), tol) / std::max(1.0, a.norm(tol)));
  }
  const bool multiplicative = mult_residual <= tol.multiplicative;

  Rng proj_rng = Rng::stream(config.seed, "certify", "projections", 0);
  double proj_residual = 0.0;
  for (std::size_t s = 0; s < config.samples; ++s) {
    const Element e = (s % 2 == 0) ? proj_rng.projection(src).element() : proj_rng.rank_one_projection(src).element();
    const Element fe = f.apply(e);
    proj_residual = std::max({proj_residual, distance(fe * fe, fe, tol), distance(fe.adjoint(), fe, tol)});
  }
  const bool projection_preserving = proj_residual <= tol.multiplicative;

  Json out;
  out["schema"] = 1;
  out["command"] = "certify";
  out["source"] = to_json(src);
  out["target"] = to_json(tgt);
  out["certificate"] = {{"positive", positive},
                        {"2-positive", two_positive},
                        {"completely-positive", cp},
                        {"unital", unital},
                        {"contractive", contractive},
                        {"multiplicative", multiplicative},
                        {"projection-preserving", projection_preserving}};
  out["evidence"] = {{"choi_min_eigenvalue", f.choi_min_eigenvalue(tol)},
                     {"unit_image_norm", f1.norm(tol)},
                     {"unit_image_distance_to_one", distance(f1, one, tol)},
                     {"multiplicativity_residual", mult_residual},
                     {"projection_residual", proj_residual}};
  out["config"] = config_json(config);
  return out;
}

}  // namespace seqprod
