#include "seqprod/tolerances.hpp"

#include "seqprod/errors.hpp"

namespace seqprod {

namespace {

template <typename Fn>
void for_each_field(Tolerances& t, Fn&& fn) {
  fn("jacobi_offdiag", t.jacobi_offdiag);
  fn("hermitian", t.hermitian);
  fn("eig_residual", t.eig_residual);
  fn("rank_relative", t.rank_relative);
  fn("rank_absolute", t.rank_absolute);
  fn("spectral_noise", t.spectral_noise);
  fn("psd_clamp", t.psd_clamp);
  fn("not_positive", t.not_positive);
  fn("effect_clamp", t.effect_clamp);
  fn("projection", t.projection);
  fn("order", t.order);
  fn("contractive", t.contractive);
  fn("unital", t.unital);
  fn("choi", t.choi);
  fn("multiplicative", t.multiplicative);
  fn("proportional", t.proportional);
  fn("inequality_slack", t.inequality_slack);
  fn("factorization", t.factorization);
  fn("precondition", t.precondition);
  fn("axiom_residual", t.axiom_residual);
  fn("axiom_positivity", t.axiom_positivity);
  fn("witness_margin", t.witness_margin);
  fn("unimodular", t.unimodular);
  fn("uniqueness_demo", t.uniqueness_demo);
}

}  // namespace

bool Tolerances::set(const std::string& name, double value) {
  if (name == "jacobi_max_sweeps") {
    if (value < 1) return false;
    jacobi_max_sweeps = static_cast<std::size_t>(value);
    return true;
  }
  bool found = false;
  for_each_field(*this, [&](const char* field, double& slot) {
    if (name == field) {
      slot = value;
      found = true;
    }
  });
  return found;
}

std::optional<double> Tolerances::get(const std::string& name) const {
  auto copy = *this;
  if (name == "jacobi_max_sweeps") return static_cast<double>(jacobi_max_sweeps);
  std::optional<double> out;
  for_each_field(copy, [&](const char* field, double& slot) {
    if (name == field) out = slot;
  });
  return out;
}

std::map<std::string, double> Tolerances::as_map() const {
  auto copy = *this;
  std::map<std::string, double> out;
  out["jacobi_max_sweeps"] = static_cast<double>(jacobi_max_sweeps);
  for_each_field(copy, [&](const char* field, double& slot) { out[field] = slot; });
  return out;
}

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::NotPositive: return "NotPositive";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::AlgebraMismatch: return "AlgebraMismatch";
    case ErrorCode::NotEffect: return "NotEffect";
    case ErrorCode::NotProjection: return "NotProjection";
    case ErrorCode::NormTooLarge: return "NormTooLarge";
    case ErrorCode::NotContractive: return "NotContractive";
    case ErrorCode::NotUnital: return "NotUnital";
    case ErrorCode::Not2Positive: return "Not2Positive";
    case ErrorCode::NotMutuallyInverse: return "NotMutuallyInverse";
    case ErrorCode::NotMultiplicative: return "NotMultiplicative";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::NoSolution: return "NoSolution";
    case ErrorCode::NotUnimodular: return "NotUnimodular";
    case ErrorCode::AxiomPrereqFailed: return "AxiomPrereqFailed";
    case ErrorCode::UnknownName: return "UnknownName";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

}  // namespace seqprod
