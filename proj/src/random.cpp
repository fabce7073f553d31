#include "seqprod/random.hpp"

#include <cmath>

#include "seqprod/processes.hpp"

namespace seqprod {

namespace {

// FNV-1a, 64 bit.
std::uint64_t fnv1a(std::uint64_t h, std::string_view bytes) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t fnv1a(std::uint64_t h, std::uint64_t value) {
  for (int i = 0; i < 8; ++i) {
    h ^= (value >> (8 * i)) & 0xff;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

Rng Rng::stream(std::uint64_t seed, std::string_view suite, std::string_view property, std::uint64_t index) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  h = fnv1a(h, seed);
  h = fnv1a(h, suite);
  h = fnv1a(h, std::string_view("/"));
  h = fnv1a(h, property);
  h = fnv1a(h, index);
  return Rng(h);
}

double Rng::uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }

std::size_t Rng::uniform_int(std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(engine_);
}

double Rng::normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }

Complex Rng::complex_normal() {
  const double re = normal();
  const double im = normal();
  return Complex(re, im) * std::sqrt(0.5);
}

CMatrix Rng::gaussian(std::size_t rows, std::size_t cols) {
  CMatrix out(rows, cols);
  for (auto& z : out.data()) z = complex_normal();
  return out;
}

CMatrix Rng::hermitian(std::size_t n) { return gaussian(n, n).hermitian_part(); }

CMatrix Rng::unitary(std::size_t n) {
  // Gram-Schmidt on a Gaussian matrix.
  CMatrix g = gaussian(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t k = 0; k < j; ++k) {
        Complex dot = 0.0;
        for (std::size_t i = 0; i < n; ++i) dot += std::conj(g(i, k)) * g(i, j);
        for (std::size_t i = 0; i < n; ++i) g(i, j) -= dot * g(i, k);
      }
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) norm += std::norm(g(i, j));
    norm = std::sqrt(norm);
    for (std::size_t i = 0; i < n; ++i) g(i, j) /= norm;
  }
  return g;
}

CMatrix Rng::unit_vector(std::size_t n) {
  CMatrix v = gaussian(n, 1);
  return v * (1.0 / v.frobenius_norm());
}

CMatrix Rng::rank_one_projection(std::size_t n) {
  const CMatrix v = unit_vector(n);
  return v * v.adjoint();
}

namespace {

template <typename Fn>
Element per_block(const Algebra& algebra, Fn&& fn) {
  std::vector<CMatrix> blocks;
  for (auto n : algebra.block_dims()) blocks.push_back(fn(n));
  return {algebra, std::move(blocks)};
}

}  // namespace

Element Rng::gaussian(const Algebra& algebra) {
  return per_block(algebra, [&](std::size_t n) { return gaussian(n, n); });
}

Element Rng::hermitian(const Algebra& algebra) {
  return per_block(algebra, [&](std::size_t n) { return hermitian(n); });
}

Element Rng::unitary(const Algebra& algebra) {
  return per_block(algebra, [&](std::size_t n) { return unitary(n); });
}

Effect Rng::effect(const Algebra& algebra) {
  return Effect(per_block(algebra, [&](std::size_t n) {
    const CMatrix u = unitary(n);
    std::vector<double> d(n);
    for (auto& x : d) x = uniform();
    return u * CMatrix::diagonal(d) * u.adjoint();
  }));
}

Effect Rng::low_rank_effect(const Algebra& algebra) {
  return Effect(per_block(algebra, [&](std::size_t n) {
    const CMatrix u = unitary(n);
    const std::size_t rank = uniform_int(0, n);
    std::vector<double> d(n, 0.0);
    for (std::size_t k = 0; k < rank; ++k) d[k] = uniform(0.05, 1.0);
    return u * CMatrix::diagonal(d) * u.adjoint();
  }));
}

Projection Rng::projection(const Algebra& algebra) {
  return Projection(per_block(algebra, [&](std::size_t n) {
    const std::size_t rank = uniform_int(0, n);
    const CMatrix v = unitary(n).columns(0, rank);
    return rank == 0 ? CMatrix::zero(n) : CMatrix(v * v.adjoint());
  }));
}

Projection Rng::rank_one_projection(const Algebra& algebra) {
  const std::size_t block = uniform_int(0, algebra.block_count() - 1);
  auto out = Element::zero(algebra);
  out.block(block) = rank_one_projection(algebra.block_dim(block));
  return Projection(out);
}

Element Rng::contraction(const Algebra& algebra) {
  Element g = gaussian(algebra);
  const double norm = g.norm();
  return norm > 0.0 ? g * (uniform(0.1, 1.0) / norm) : g;
}

Process Rng::process(const Algebra& source, const Algebra& target, double delta) {
  Process::KrausMap kraus;
  for (std::size_t i = 0; i < source.block_count(); ++i)
    for (std::size_t j = 0; j < target.block_count(); ++j) {
      const std::size_t count = uniform_int(1, 3);
      auto& list = kraus[{i, j}];
      for (std::size_t k = 0; k < count; ++k) list.push_back(gaussian(source.block_dim(i), target.block_dim(j)));
    }
  if (kraus.empty()) return {source, target, {}};
  // Measure ||f(1)|| on the raw Kraus list, then rescale every operator.
  Element unit_image = Element::zero(target);
  for (const auto& [route, list] : kraus)
    for (const auto& k : list) unit_image.block(route.second) += k.adjoint() * k;
  const double norm = unit_image.norm();
  const double scale = (1.0 - delta) / std::sqrt(norm);
  for (auto& [route, list] : kraus)
    for (auto& k : list) k *= scale;
  return {source, target, std::move(kraus)};
}

}  // namespace seqprod
