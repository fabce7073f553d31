#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>

namespace seqprod {

/// Every numerical threshold used by the library, with its default.
/// Functions take a `const Tolerances&` so that callers (the CLI in
/// particular) can override individual entries without global state.
struct Tolerances {
  // Eigensolver.
  double jacobi_offdiag = 1e-14;     // relative to ||a||_F
  std::size_t jacobi_max_sweeps = 100;
  double hermitian = 1e-12;          // ||a - a*|| <= hermitian * max(1, ||a||)
  double eig_residual = 1e-10;

  // Spectral cuts.
  double rank_relative = 1e-10;      // eps_rank = rank_relative * lambda_max
  double rank_absolute = 1e-14;
  double spectral_noise = 1e-14;     // eigenvalues below spectral_noise * lambda_max are rounding
  double psd_clamp = 1e-10;          // negative eigenvalues above -psd_clamp*||a|| are noise
  double not_positive = 1e-8;        // below -not_positive*||a|| is an error

  // Effects and projections.
  double effect_clamp = 1e-9;
  double projection = 1e-9;
  double order = 1e-9;               // a <= b tested as min eig(b - a) >= -order * max(1, ||b - a||)

  // Maps.
  double contractive = 1e-9;
  double unital = 1e-9;
  double choi = 1e-10;               // Choi PSD up to -choi * max(1, ||C||)
  double multiplicative = 1e-8;
  double proportional = 1e-9;
  double inequality_slack = 1e-8;

  // Universal properties.
  double factorization = 1e-8;
  double precondition = 1e-9;

  // Axioms.
  double axiom_residual = 1e-8;
  double axiom_positivity = 1e-8;
  double witness_margin = 1e-6;
  double unimodular = 1e-9;
  double uniqueness_demo = 1e-7;

  /// Sets the named field; returns false if the name is unknown.
  bool set(const std::string& name, double value);
  std::optional<double> get(const std::string& name) const;
  std::map<std::string, double> as_map() const;
};

inline const Tolerances kDefaultTolerances{};

}  // namespace seqprod
