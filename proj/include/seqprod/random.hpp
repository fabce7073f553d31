#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "seqprod/effects.hpp"

namespace seqprod {

class Process;

/// Seeded generator for everything random in the library. Streams for
/// individual properties are derived by hashing (seed, suite, property,
/// index), so adding a property never perturbs the others.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static Rng stream(std::uint64_t seed, std::string_view suite, std::string_view property,
                    std::uint64_t index = 0);

  double uniform(double lo = 0.0, double hi = 1.0);
  std::size_t uniform_int(std::size_t lo, std::size_t hi);  // inclusive
  double normal();
  Complex complex_normal();

  CMatrix gaussian(std::size_t rows, std::size_t cols);
  CMatrix hermitian(std::size_t n);
  CMatrix unitary(std::size_t n);
  /// Unit vector, Haar distributed.
  CMatrix unit_vector(std::size_t n);
  CMatrix rank_one_projection(std::size_t n);

  Element gaussian(const Algebra& algebra);
  Element hermitian(const Algebra& algebra);
  Element unitary(const Algebra& algebra);
  /// U diag(uniform [0, 1]) U* per block.
  Effect effect(const Algebra& algebra);
  /// Random effect whose blocks have a random rank in [0, n].
  Effect low_rank_effect(const Algebra& algebra);
  /// Rank drawn uniformly in [0, n] per block.
  Projection projection(const Algebra& algebra);
  Projection rank_one_projection(const Algebra& algebra);
  /// Contraction with ||a|| <= 1.
  Element contraction(const Algebra& algebra);

  /// Kraus count 1-3, standard complex Gaussian entries, rescaled so that
  /// ||f(1)|| = 1 - delta.
  Process process(const Algebra& source, const Algebra& target, double delta = 1e-3);

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace seqprod
