#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <optional>
#include <span>
#include <vector>

#include "seqprod/errors.hpp"
#include "seqprod/tolerances.hpp"

namespace seqprod {

using Complex = std::complex<double>;

/// Dense row-major complex matrix. Square in most of the library; Kraus
/// operators and corner isometries are the rectangular exceptions.
class CMatrix {
 public:
  CMatrix() = default;
  CMatrix(std::size_t rows, std::size_t cols);
  CMatrix(std::initializer_list<std::initializer_list<Complex>> rows);

  static CMatrix zero(std::size_t dim) { return CMatrix(dim, dim); }
  static CMatrix zero(std::size_t rows, std::size_t cols) { return CMatrix(rows, cols); }
  static CMatrix identity(std::size_t dim);
  static CMatrix diagonal(std::span<const double> values);
  static CMatrix diagonal(std::span<const Complex> values);
  static CMatrix diagonal(std::initializer_list<double> values);
  /// Matrix unit E_{ij} of the given square dimension.
  static CMatrix unit(std::size_t dim, std::size_t i, std::size_t j);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }
  /// Dimension of a square matrix; throws ShapeMismatch otherwise.
  std::size_t dim() const;
  bool empty() const noexcept { return data_.empty(); }

  Complex& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Complex& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<Complex> data() noexcept { return data_; }
  std::span<const Complex> data() const noexcept { return data_; }

  CMatrix adjoint() const;
  CMatrix transpose() const;
  CMatrix conj() const;
  Complex trace() const;
  double frobenius_norm() const;
  bool all_finite() const;
  /// (a + a*) / 2
  CMatrix hermitian_part() const;

  CMatrix column(std::size_t j) const;
  /// Columns [first, first + count).
  CMatrix columns(std::size_t first, std::size_t count) const;
  static CMatrix hstack(std::span<const CMatrix> blocks);

  CMatrix& operator+=(const CMatrix& other);
  CMatrix& operator-=(const CMatrix& other);
  CMatrix& operator*=(Complex s);

  friend CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
  friend CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
  friend CMatrix operator-(CMatrix a) { return a *= -1.0; }
  friend CMatrix operator*(CMatrix a, Complex s) { return a *= s; }
  friend CMatrix operator*(Complex s, CMatrix a) { return a *= s; }
  friend CMatrix operator*(CMatrix a, double s) { return a *= Complex(s); }
  friend CMatrix operator*(double s, CMatrix a) { return a *= Complex(s); }
  friend CMatrix operator*(const CMatrix& a, const CMatrix& b);

  friend bool operator==(const CMatrix&, const CMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> data_;
};

/// Kronecker product a (x) b.
CMatrix kron(const CMatrix& a, const CMatrix& b);
/// Frobenius distance ||a - b||_F.
double distance(const CMatrix& a, const CMatrix& b);

struct EigenDecomposition {
  std::vector<double> eigenvalues;  // ascending
  CMatrix eigenvectors;             // unitary, columns are eigenvectors
  double tol_used = 0.0;
  std::size_t sweeps = 0;

  double max_eigenvalue() const { return eigenvalues.empty() ? 0.0 : eigenvalues.back(); }
  double min_eigenvalue() const { return eigenvalues.empty() ? 0.0 : eigenvalues.front(); }
  /// max |lambda_i|
  double spectral_radius() const;
  /// V diag(values) V*
  CMatrix rebuild(std::span<const Complex> values) const;
};

/// ||a - a*||_op <= tol.hermitian * max(1, ||a||_op), decided exactly; cheap
/// Frobenius bounds settle most inputs without an eigensolve.
bool is_self_adjoint(const CMatrix& a, const Tolerances& tol = kDefaultTolerances);

/// Cyclic Jacobi with complex rotations. Deterministic for a fixed input.
EigenDecomposition eig_hermitian(const CMatrix& a, const Tolerances& tol = kDefaultTolerances);

/// Same as eig_hermitian but skips the Hermitian precondition; the input is
/// replaced by its Hermitian part.
EigenDecomposition eig_hermitian_unchecked(const CMatrix& a, const Tolerances& tol = kDefaultTolerances);

using RealFunction = std::function<Complex(double)>;

CMatrix apply_function(const CMatrix& a, const RealFunction& g, const Tolerances& tol = kDefaultTolerances);
CMatrix apply_function(const EigenDecomposition& eig, const RealFunction& g);

/// Eigenvalue cut below which a positive matrix is treated as singular:
/// max(rank_relative * lambda_max, rank_absolute).
double rank_threshold(double lambda_max, const Tolerances& tol = kDefaultTolerances);

/// Level below which an eigenvalue is rounding noise:
/// max(spectral_noise * lambda_max, rank_absolute). Square roots cut here
/// rather than at rank_threshold so that sqrt(p^2) = p holds for eigenvalues
/// down to sqrt(noise_floor).
double noise_floor(double lambda_max, const Tolerances& tol = kDefaultTolerances);

/// Eigenvalues at or below noise_floor map to 0.
CMatrix sqrt_psd(const CMatrix& a, const Tolerances& tol = kDefaultTolerances);
CMatrix pinv_psd(const CMatrix& a, const Tolerances& tol = kDefaultTolerances);
/// Projection onto the eigenvectors of a positive matrix above rank_threshold.
CMatrix support_projection(const CMatrix& a, const Tolerances& tol = kDefaultTolerances);

/// Largest singular value; max |lambda| for self-adjoint input.
double op_norm(const CMatrix& a, const Tolerances& tol = kDefaultTolerances);

/// Spectral positivity test: lambda_min >= -eps * max(1, ||a||).
bool is_positive(const CMatrix& a, double eps, const Tolerances& tol = kDefaultTolerances);
/// Norm-only positivity test: || ||a|| - a || <= ||a|| + eps * max(1, ||a||).
bool is_positive_by_norm(const CMatrix& a, double eps, const Tolerances& tol = kDefaultTolerances);
/// lambda_min of a self-adjoint matrix (no Hermitian check).
double min_eigenvalue(const CMatrix& a, const Tolerances& tol = kDefaultTolerances);

/// alpha with ||F - alpha G||_F <= proportional * max(||F||_F, ||G||_F) and
/// alpha != 0; F = G = 0 gives 1.
std::optional<Complex> proportionality_coefficient(const CMatrix& f, const CMatrix& g,
                                                   const Tolerances& tol = kDefaultTolerances);

}  // namespace seqprod
