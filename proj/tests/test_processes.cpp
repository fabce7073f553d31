#include <doctest.h>

#include <thread>

#include "seqprod/processes.hpp"
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

const Algebra kM2 = Algebra::matrix(2);

}  // namespace

TEST_CASE("apply follows the Kraus convention") {
  Rng rng(1);
  const Element a = rng.gaussian(Algebra({2, 3}));
  CHECK(distance(Process::identity(a.algebra()).apply(a), a) == 0.0);

  const Element u = rng.unitary(kM2);
  const Element b = rng.gaussian(kM2);
  CHECK(distance(Process::conjugation(u).apply(b), u.adjoint() * b * u) <= 1e-14);

  CHECK(throws_code(ErrorCode::AlgebraMismatch, [&] { Process::identity(kM2).apply(a); }));
}

TEST_CASE("contractivity is enforced on construction") {
  CHECK(throws_code(ErrorCode::NotContractive, [] { Process::single(CMatrix::identity(2) * 1.1); }));
  CHECK(throws_code(ErrorCode::ShapeMismatch,
                    [] { Process(kM2, kM2, Process::KrausMap{{{0, 0}, {CMatrix::identity(3)}}}); }));
}

TEST_CASE("Choi matrices") {
  const CMatrix c = Process::identity(kM2).choi().at({0, 0});
  const auto eig = eig_hermitian(c);
  CHECK(eig.eigenvalues[3] == doctest::Approx(2.0));
  for (int k = 0; k < 3; ++k) CHECK(std::abs(eig.eigenvalues[k]) <= 1e-14);

  const CMatrix v = Process::single(CMatrix::diagonal({1.0, 0.0})).choi().at({0, 0});
  CHECK(is_positive(v, 1e-12));
  const auto ev = eig_hermitian(v);
  CHECK(ev.eigenvalues[3] == doctest::Approx(1.0));
  CHECK(std::abs(ev.eigenvalues[2]) <= 1e-14);

  const BlockLinearMap t = BlockLinearMap::transpose(kM2);
  CHECK(t.choi_min_eigenvalue() == doctest::Approx(-1.0));
  CHECK_FALSE(t.choi_positive());
  CHECK(throws_code(ErrorCode::NotPositive, [&] { Process::from_linear_map(t); }));
}

TEST_CASE("Choi cache is safe under concurrent first access") {
  Rng rng(2);
  const Process f = rng.process(Algebra({2, 3}), Algebra({3, 2}));
  std::vector<const std::map<Route, CMatrix>*> seen(8);
  std::vector<std::thread> threads;
  for (std::size_t k = 0; k < seen.size(); ++k) threads.emplace_back([&, k] { seen[k] = &f.choi(); });
  for (auto& t : threads) t.join();
  for (auto* p : seen) CHECK(p == seen.front());
}

TEST_CASE("linear map and Kraus round trip") {
  Rng rng(3);
  const Process f = rng.process(Algebra({2, 2}), Algebra({3}));
  const Process g = Process::from_linear_map(f.linear_map());
  for (const auto& e : Element::basis(f.source())) CHECK(distance(f.apply(e), g.apply(e)) <= 1e-12);
}

TEST_CASE("n-positivity") {
  Rng rng(4);
  const BlockLinearMap t = BlockLinearMap::transpose(kM2);
  CHECK(is_n_positive(t, 1, rng));
  CHECK_FALSE(is_n_positive(t, 2, rng));
  const Process f = rng.process(Algebra({2, 3}), kM2);
  for (std::size_t n = 1; n <= 3; ++n) CHECK(is_n_positive(f.linear_map(), n, rng, 50));
}

TEST_CASE("multiplicativity") {
  Rng rng(5);
  CHECK(is_multiplicative(Process::conjugation(rng.unitary(Algebra::matrix(3))), rng, 20));
  CHECK(is_multiplicative(block_doubling(2), rng, 20));
  const Effect p(CMatrix::diagonal({1.0, 0.25}));
  CHECK_FALSE(is_multiplicative(Process::single(sqrt_psd(p.element()).block(0)), rng, 20));
}

TEST_CASE("multiplicativity characterizations") {
  Rng rng(6);
  const AwmultReport conj = awmult_equivalence(Process::conjugation(rng.unitary(kM2)), rng, 16);
  CHECK((conj.multiplicative && conj.preserves_projections && conj.preserves_ceilings));
  const AwmultReport id = awmult_equivalence(Process::identity(Algebra({2, 1})), rng, 16);
  CHECK((id.multiplicative && id.preserves_projections && id.preserves_ceilings));

  // a -> (a + u* a u) / 2 with u not commuting with everything.
  const CMatrix u{{0.0, 1.0}, {1.0, 0.0}};
  const double h = std::sqrt(0.5);
  const Process mix(kM2, kM2, Process::KrausMap{{{0, 0}, {CMatrix::identity(2) * h, u * h}}});
  const AwmultReport avg = awmult_equivalence(mix, rng, 16);
  CHECK_FALSE(avg.multiplicative);
  CHECK_FALSE(avg.preserves_projections);
  CHECK_FALSE(avg.preserves_ceilings);

  CHECK(throws_code(ErrorCode::NotUnital, [&] { awmult_equivalence(Process::single(CMatrix::diagonal({1.0, 0.5})), rng, 4); }));
}

TEST_CASE("support inequality") {
  Rng rng(7);
  for (int s = 0; s < 20; ++s) {
    const Effect a = rng.low_rank_effect(Algebra::matrix(3));
    CHECK(support_ineq_check(Process::identity(Algebra::matrix(3)), a));

    // A state tr(a rho) as a map into M_1: Kraus operators sqrt(mu_k) v_k.
    const CMatrix m = rng.gaussian(3, 3);
    CMatrix rho = m * m.adjoint();
    rho *= 1.0 / rho.trace().real();
    const auto eig = eig_hermitian(rho);
    std::vector<CMatrix> ks;
    for (std::size_t k = 0; k < 3; ++k) ks.push_back(eig.eigenvectors.column(k) * std::sqrt(std::max(eig.eigenvalues[k], 0.0)));
    const Process state(Algebra::matrix(3), Algebra::matrix(1), Process::KrausMap{{{0, 0}, ks}});
    CHECK(support_ineq_check(state, a));

    const Effect p = rng.effect(Algebra::matrix(3));
    const auto [embedding, c] = make_compression(p);
    const Process compress_all = compose(c, corner_process(embedding));
    CHECK(support_ineq_check(compress_all, a));
  }
}

TEST_CASE("Cauchy-Schwarz inequalities") {
  Rng rng(8);
  const Element a = rng.contraction(Algebra::matrix(3));
  const CauchySchwarzReport same = cs_inequalities(Process::identity(Algebra::matrix(3)), a, a);
  CHECK(same.all());
  CHECK(same.min_slack >= -1e-12);

  for (int s = 0; s < 20; ++s) {
    const Element x = rng.contraction(Algebra::matrix(3));
    const Element y = rng.contraction(Algebra::matrix(3));
    const CMatrix rho = CMatrix::identity(3) * (1.0 / 3.0);
    CHECK(kadison_slack(rho, x.block(0), y.block(0)) >= -1e-12);
    CHECK(cs_inequalities(rng.process(Algebra::matrix(3), Algebra({2, 2})), x, y).all());
  }
  CHECK(throws_code(ErrorCode::Not2Positive,
                    [&] { cs_inequalities(BlockLinearMap::transpose(kM2), rng.gaussian(kM2), rng.gaussian(kM2)); }));
}

TEST_CASE("block positivity") {
  const CMatrix i2 = CMatrix::identity(2);
  const Block2Report zero = block2_positivity(i2, CMatrix::zero(2), i2);
  CHECK(zero.positive);
  CHECK(zero.consequences_hold());
  const Block2Report ones = block2_positivity(i2, i2, i2);
  CHECK(ones.positive);
  CHECK(ones.consequences_hold());
  CHECK(*ones.item5);
  const Block2Report bad = block2_positivity(CMatrix::zero(2), i2, i2);
  CHECK_FALSE(bad.positive);
  CHECK_FALSE(bad.item3.has_value());
  CHECK(throws_code(ErrorCode::ShapeMismatch, [&] { block2_positivity(i2, CMatrix::zero(3), i2); }));
}

TEST_CASE("conjugation maps are completely positive") {
  Rng rng(9);
  CHECK(conjugation_is_cp(CMatrix::identity(3)));
  CHECK(conjugation_is_cp(rng.gaussian(3, 2)));
  CHECK(conjugation_is_cp(CMatrix::zero(2)));
}

TEST_CASE("invertible processes are isomorphisms") {
  Rng rng(10);
  const Element u = rng.unitary(Algebra::matrix(3));
  CHECK(invertible_process_is_iso(Process::conjugation(u), Process::conjugation(u.adjoint()), rng, 10));
  const Algebra a({2, 2});
  const Process swap = block_permutation(a, {1, 0});
  CHECK(invertible_process_is_iso(swap, swap, rng, 10));
  CHECK(invertible_process_is_iso(Process::identity(a), Process::identity(a), rng, 10));
  CHECK(throws_code(ErrorCode::NotMutuallyInverse,
                    [&] { invertible_process_is_iso(Process::conjugation(u), Process::identity(Algebra::matrix(3)), rng, 4); }));
}

TEST_CASE("processes properties") {
  for (const auto& name : property_names("processes")) testing::require_property("processes", name, 200);
}
