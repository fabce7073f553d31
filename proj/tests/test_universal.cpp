#include <doctest.h>

#include "seqprod/random.hpp"
#include "seqprod/universal.hpp"
#include "test_support.hpp"

using namespace seqprod;

namespace {

template <typename Fn>
bool throws_code(ErrorCode code, Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code() == code;
  }
  return false;
}

const Algebra kM1 = Algebra::matrix(1);
const Algebra kM2 = Algebra::matrix(2);

Element scalar(double z) { return Element(CMatrix{{z}}); }

// f: C -> M_2, f(z) = z diag(1/4, 0).
Process quarter_map() { return Process::single(CMatrix{{0.5, 0.0}}); }

double max_basis_distance(const Process& a, const Process& b) {
  double out = 0.0;
  for (const auto& e : Element::basis(a.source())) out = std::max(out, distance(a.apply(e), b.apply(e)));
  return out;
}

}  // namespace

TEST_CASE("corner embedding invariants") {
  Rng rng(1);
  const Effect p = rng.low_rank_effect(Algebra({3, 2}));
  const CornerEmbedding e = support_embedding(p.element());
  for (std::size_t b = 0; b < e.parent.block_count(); ++b) {
    const CMatrix& v = e.isometries[b];
    CHECK(distance(v.adjoint() * v, CMatrix::identity(v.cols())) <= 1e-10);
    CHECK(distance(v * v.adjoint(), e.projection.block(b)) <= 1e-10);
  }
}

TEST_CASE("corners") {
  const Algebra m2 = kM2;
  auto [whole, id] = make_corner(Effect::unit(m2));
  CHECK(whole.corner == m2);
  Rng rng(2);
  const Element a = rng.gaussian(m2);
  CHECK(distance(id.apply(a), a) <= 1e-14);

  for (const auto& p : {Effect(CMatrix::diagonal({1.0, 0.0})), Effect(CMatrix::diagonal({1.0, 0.5}))}) {
    auto [embedding, pi] = make_corner(p);
    CHECK(embedding.corner == kM1);
    CHECK(std::abs(pi.apply(a).block(0)(0, 0) - a.block(0)(0, 0)) <= 1e-14);
    CHECK(distance(pi.apply(p.element()), pi.apply(Element::unit(m2))) <= 1e-9);
  }

  auto [none, zero_map] = make_corner(Effect(CMatrix::diagonal({0.5, 0.5})));
  CHECK(none.corner.is_zero());
  CHECK(zero_map.target().is_zero());
}

TEST_CASE("compressions") {
  Rng rng(3);
  auto [whole, id] = make_compression(Effect::unit(kM2));
  const Element a = rng.gaussian(kM2);
  CHECK(distance(id.apply(a), a) <= 1e-14);

  const Effect half(CMatrix::diagonal({0.5, 0.0}));
  auto [embedding, c] = make_compression(half);
  CHECK(embedding.corner == kM1);
  CHECK(distance(c.apply(scalar(1.0)), half.element()) <= 1e-15);
  CHECK(distance(c.apply(scalar(3.0)), half.element() * 3.0) <= 1e-14);

  const Projection e(CMatrix{{0.5, 0.5}, {0.5, 0.5}});
  auto [pe, ce] = make_compression(e.effect());
  const Element b = rng.gaussian(pe.corner);
  CHECK(distance(ce.apply(b), pe.extend(b)) <= 1e-14);

  auto [none, zero_map] = make_compression(Effect::zero(kM2));
  CHECK(none.corner.is_zero());
  CHECK(distance(zero_map.apply(Element::zero(none.corner)), Element::zero(kM2)) == 0.0);
}

TEST_CASE("factoring through a compression") {
  const Effect half(CMatrix::diagonal({0.5, 0.0}));
  const FactorizationResult r = factor_through_compression(quarter_map(), half);
  CHECK(distance(r.mediator.apply(scalar(1.0)), scalar(0.5)) <= 1e-14);
  CHECK(r.residual <= 1e-8);
  CHECK(r.unique);

  Rng rng(4);
  const Effect p = rng.effect(Algebra({2, 2}));
  auto [embedding, c] = make_compression(p);
  const FactorizationResult self = factor_through_compression(c, p);
  CHECK(max_basis_distance(self.mediator, Process::identity(embedding.corner)) <= 1e-8);
  CHECK(self.unique);

  const Process zero(kM1, kM2, {});
  const FactorizationResult z = factor_through_compression(zero, half);
  CHECK(distance(z.mediator.apply(scalar(1.0)), Element::zero(kM1)) == 0.0);

  CHECK(throws_code(ErrorCode::PreconditionViolated,
                    [&] { factor_through_compression(Process::single(CMatrix{{0.0, 0.5}}), half); }));
}

TEST_CASE("limit construction stabilizes where the smallest positive eigenvalue enters") {
  // One Kraus operator per column keeps f(1) = p / 2 below p.
  const auto below = [](const Effect& p) {
    const CMatrix r = sqrt_psd(p.element()).block(0) * std::sqrt(0.5);
    return Process(kM2, kM2, Process::KrausMap{{{0, 0}, {r}}});
  };
  const Effect p(CMatrix::diagonal({1.0, 0.25}));
  const LimitFactorization lim = factor_through_compression_by_limit(below(p), p, 10);
  REQUIRE(lim.stabilized_at.has_value());
  CHECK(*lim.stabilized_at == 4);
  CHECK(lim.result.residual <= 1e-8);

  const Effect e(CMatrix{{0.5, 0.5}, {0.5, 0.5}});
  const LimitFactorization proj = factor_through_compression_by_limit(below(e), e, 5);
  REQUIRE(proj.stabilized_at.has_value());
  CHECK(*proj.stabilized_at == 1);

  const Effect half(CMatrix::diagonal({0.5, 0.0}));
  const LimitFactorization h = factor_through_compression_by_limit(quarter_map(), half, 6);
  CHECK(max_basis_distance(h.result.mediator, factor_through_compression(quarter_map(), half).mediator) <= 1e-8);
  CHECK(*h.stabilized_at == 2);
}

TEST_CASE("factoring through a corner") {
  Rng rng(5);
  const Effect p = Effect(CMatrix::diagonal({1.0, 0.5}));
  auto [embedding, pi] = make_corner(p);
  const FactorizationResult self = factor_through_corner(pi, p);
  CHECK(max_basis_distance(self.mediator, Process::identity(embedding.corner)) <= 1e-10);
  CHECK(self.unique);

  // g(a) = a_11.
  const Process g = Process::single(CMatrix{{1.0}, {0.0}});
  CHECK(distance(g.apply(p.element()), g.apply(Element::unit(kM2))) <= 1e-15);
  const FactorizationResult r = factor_through_corner(g, p);
  CHECK(distance(r.mediator.apply(scalar(2.0)), scalar(2.0)) <= 1e-14);
  CHECK(r.residual <= 1e-8);

  const Process zero(kM2, kM1, {});
  CHECK(distance(factor_through_corner(zero, p).mediator.apply(scalar(1.0)), Element::zero(kM1)) == 0.0);

  CHECK(throws_code(ErrorCode::PreconditionViolated,
                    [&] { factor_through_corner(Process::single(CMatrix{{0.0}, {1.0}}), p); }));
}

TEST_CASE("uniqueness probe") {
  const Effect half(CMatrix::diagonal({0.5, 0.0}));
  auto [embedding, c] = make_compression(half);
  CHECK(mediator_uniqueness_probe(c, quarter_map()));

  Rng rng(6);
  const Process f = rng.process(Algebra::matrix(3), Algebra::matrix(2));
  CHECK(mediator_uniqueness_probe(Process::identity(Algebra::matrix(2)), f));

  const Process zero(kM2, kM2, {});
  const Process zero_given(kM2, kM2, {});
  CHECK_FALSE(mediator_uniqueness_probe(zero, zero_given));

  CHECK(throws_code(ErrorCode::NoSolution, [&] { mediator_uniqueness_probe(zero, Process::identity(kM2)); }));
}

TEST_CASE("universal properties") {
  for (const auto& name : property_names("universal")) testing::require_property("universal", name, 50);
}
