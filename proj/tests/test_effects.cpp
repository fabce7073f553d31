#include <doctest.h>

#include <cmath>

#include "seqprod/effects.hpp"
#include "seqprod/random.hpp"
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

const CMatrix kHalfOnes{{0.5, 0.5}, {0.5, 0.5}};

}  // namespace

TEST_CASE("algebras") {
  const Algebra a({2, 3});
  CHECK(a.dimension() == 13);
  CHECK(a.offset(1) == 4);
  CHECK(Algebra::zero().is_zero());
  CHECK(Algebra::zero().dimension() == 0);
  CHECK_THROWS(Algebra({2, 0}));
}

TEST_CASE("effect construction clamps noise and rejects the rest") {
  CHECK(distance(Effect(CMatrix::diagonal({1.0 + 1e-10, -1e-10})).element(), Element(CMatrix::diagonal({1.0, 0.0}))) <=
        1e-15);
  CHECK(throws_code(ErrorCode::NotEffect, [] { Effect(CMatrix::diagonal({1.1, 0.0})); }));
  CHECK(throws_code(ErrorCode::NotEffect, [] { Effect(CMatrix::diagonal({0.5, -0.01})); }));
  CHECK(throws_code(ErrorCode::NotHermitian, [] { Effect(CMatrix{{0.5, 0.1}, {0.0, 0.5}}); }));
  CHECK(throws_code(ErrorCode::NotProjection, [] { Projection(CMatrix::diagonal({1.0, 0.5})); }));
  CHECK(is_projection(Element(kHalfOnes)));
}

TEST_CASE("sequential product examples") {
  Rng rng(1);
  const Algebra m2 = Algebra::matrix(2);
  const Effect q = rng.effect(m2);
  CHECK(distance(seq_product(Effect::unit(m2), q).element(), q.element()) <= 1e-14);

  const Projection e(kHalfOnes);
  const Element eqe = e.element() * q.element() * e.element();
  CHECK(distance(seq_product(e, q).element(), eqe) <= 1e-14);

  const Effect p(CMatrix::diagonal({1.0, 0.25}));
  const Effect r = seq_product(p, Effect(kHalfOnes));
  CHECK(distance(r.element(), Element(CMatrix{{0.5, 0.25}, {0.25, 0.125}})) <= 1e-15);

  CHECK(throws_code(ErrorCode::AlgebraMismatch, [&] { seq_product(p, Effect::unit(Algebra::matrix(3))); }));
}

TEST_CASE("ceiling examples") {
  const Algebra m2 = Algebra::matrix(2);
  CHECK(distance(ceil(Effect::zero(m2)).element(), Element::zero(m2)) == 0.0);
  CHECK(distance(ceil(Effect(CMatrix::diagonal({0.3, 0.9}))).element(), Element::unit(m2)) <= 1e-14);
  CHECK(distance(ceil(Effect(CMatrix{{0.25, 0.25}, {0.25, 0.25}})).element(), Element(kHalfOnes)) <= 1e-14);
}

TEST_CASE("ceiling is the least projection above p") {
  Rng rng(2);
  const Algebra a({3, 2});
  for (int s = 0; s < 50; ++s) {
    const Effect p = rng.low_rank_effect(a);
    const Projection c = ceil(p);
    CHECK(leq(p.element(), c.element()));
    // A projection above p: ceil(p) plus a random projection orthogonal to it.
    const Element comp = Element::unit(a) - c.element();
    const Element above = c.element() + comp * rng.projection(a).element() * comp;
    if (is_projection(above)) CHECK(leq(c.element(), above));
  }
}

TEST_CASE("ceiling by limit") {
  const Projection e(kHalfOnes);
  for (int n = 1; n <= 6; ++n) CHECK(distance(ceil_by_limit(e, n).element(), e.element()) <= 1e-13);
  const Effect p(CMatrix::diagonal({0.25, 0.0}));
  const Effect r = ceil_by_limit(p, 4);
  CHECK(r.block(0)(0, 0).real() == doctest::Approx(std::pow(0.25, 1.0 / 16)).epsilon(1e-14));
  CHECK(r.block(0)(0, 0).real() == doctest::Approx(0.9170).epsilon(1e-4));
  CHECK(r.block(0)(1, 1).real() == 0.0);
  CHECK(distance(ceil_by_limit(Effect::zero(Algebra::matrix(2)), 5).element(), Element::zero(Algebra::matrix(2))) == 0.0);

  Rng rng(3);
  const Effect q = rng.low_rank_effect(Algebra::matrix(4));
  const Element target = ceil(q).element();
  double previous = 1e300;
  for (int n = 1; n <= 10; ++n) {
    const double d = distance(ceil_by_limit(q, n).element(), target);
    CHECK(d <= previous + 1e-12);
    previous = d;
  }
}

TEST_CASE("floor examples") {
  const Projection e(kHalfOnes);
  CHECK(distance(floor(e).element(), e.element()) <= 1e-14);
  CHECK(distance(floor(Effect(CMatrix::diagonal({1.0, 0.5}))).element(), Element(CMatrix::diagonal({1.0, 0.0}))) <= 1e-14);
  CHECK(distance(floor(Effect(CMatrix::diagonal({0.5, 0.5}))).element(), Element::zero(Algebra::matrix(2))) == 0.0);
}

TEST_CASE("connected projection examples") {
  const Projection top(CMatrix::diagonal({1.0, 0.0}));
  const Projection bottom(CMatrix::diagonal({0.0, 1.0}));
  const Element one = Element::unit(Algebra::matrix(2));

  const ConnectedReport all_true = check_connected(one, top, bottom);
  CHECK(all_true.agree());
  CHECK(all_true.sandwich_e1);

  const ConnectedReport all_false = check_connected(one, top, top);
  CHECK(all_false.agree());
  CHECK_FALSE(all_false.sandwich_e1);

  const ConnectedReport swapped = check_connected(Element(CMatrix{{0.0, 1.0}, {1.0, 0.0}}), top, top);
  CHECK(swapped.agree());
  CHECK(swapped.product_12);

  CHECK(throws_code(ErrorCode::NormTooLarge, [&] { check_connected(one * 2.0, top, bottom); }));
  CHECK(throws_code(ErrorCode::AlgebraMismatch,
                    [&] { check_connected(one, top, Projection::unit(Algebra::matrix(3))); }));
}

TEST_CASE("projection order diagnostics") {
  Rng rng(4);
  CHECK(projection_order_tests(Effect(CMatrix::diagonal({1.0, 0.0})), rng));
  CHECK(projection_order_tests(Effect::unit(Algebra::matrix(3)), rng));
  CHECK(projection_order_tests(rng.projection(Algebra({2, 3})).effect(), rng));
  // Orthogonal diagonal projections with p + q <= 1 multiply to zero.
  const Element p(CMatrix::diagonal({1.0, 0.0, 0.0}));
  const Element q(CMatrix::diagonal({0.0, 0.0, 1.0}));
  CHECK(leq(p + q, Element::unit(Algebra::matrix(3))));
  CHECK((p * q).norm() == 0.0);
}

TEST_CASE("effects properties") {
  for (const auto& name : property_names("effects")) testing::require_property("effects", name, 200);
}

TEST_CASE("connected agreement on dims 2 to 6") {
  auto c = testing::config(1000);
  c.dims = {{2}, {3}, {4}, {5}, {6}, {2, 3}};
  for (const auto& r : run_property("effects", "connected_agreement", c)) {
    INFO(r.details.dump());
    CHECK(r.passed);
    CHECK(r.details["all_true"].get<std::size_t>() > 0);
  }
}
