#include "seqprod/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace seqprod {

CMatrix::CMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, Complex(0.0, 0.0)) {}

CMatrix::CMatrix(std::initializer_list<std::initializer_list<Complex>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& row : rows) {
    if (row.size() != cols_) throw Error(ErrorCode::ShapeMismatch, "ragged initializer list");
    data_.insert(data_.end(), row.begin(), row.end());
  }
}

CMatrix CMatrix::identity(std::size_t dim) {
  CMatrix out(dim, dim);
  for (std::size_t i = 0; i < dim; ++i) out(i, i) = 1.0;
  return out;
}

CMatrix CMatrix::diagonal(std::span<const double> values) {
  CMatrix out(values.size(), values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out(i, i) = values[i];
  return out;
}

CMatrix CMatrix::diagonal(std::span<const Complex> values) {
  CMatrix out(values.size(), values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out(i, i) = values[i];
  return out;
}

CMatrix CMatrix::diagonal(std::initializer_list<double> values) {
  return diagonal(std::span<const double>(values.begin(), values.size()));
}

CMatrix CMatrix::unit(std::size_t dim, std::size_t i, std::size_t j) {
  CMatrix out(dim, dim);
  out(i, j) = 1.0;
  return out;
}

std::size_t CMatrix::dim() const {
  if (!is_square()) throw Error(ErrorCode::ShapeMismatch, "matrix is not square");
  return rows_;
}

CMatrix CMatrix::adjoint() const {
  CMatrix out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(j, i) = std::conj((*this)(i, j));
  return out;
}

CMatrix CMatrix::transpose() const {
  CMatrix out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
  return out;
}

CMatrix CMatrix::conj() const {
  CMatrix out = *this;
  for (auto& z : out.data_) z = std::conj(z);
  return out;
}

Complex CMatrix::trace() const {
  Complex acc = 0.0;
  for (std::size_t i = 0; i < dim(); ++i) acc += (*this)(i, i);
  return acc;
}

double CMatrix::frobenius_norm() const {
  double acc = 0.0;
  for (const auto& z : data_) acc += std::norm(z);
  return std::sqrt(acc);
}

bool CMatrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](const Complex& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

CMatrix CMatrix::hermitian_part() const {
  CMatrix out(rows_, cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j)
      out(i, j) = 0.5 * ((*this)(i, j) + std::conj((*this)(j, i)));
  return out;
}

CMatrix CMatrix::column(std::size_t j) const { return columns(j, 1); }

CMatrix CMatrix::columns(std::size_t first, std::size_t count) const {
  if (first + count > cols_) throw Error(ErrorCode::ShapeMismatch, "column range out of bounds");
  CMatrix out(rows_, count);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < count; ++j) out(i, j) = (*this)(i, first + j);
  return out;
}

CMatrix CMatrix::hstack(std::span<const CMatrix> blocks) {
  if (blocks.empty()) return {};
  const std::size_t rows = blocks.front().rows();
  std::size_t cols = 0;
  for (const auto& b : blocks) {
    if (b.rows() != rows) throw Error(ErrorCode::ShapeMismatch, "hstack row mismatch");
    cols += b.cols();
  }
  CMatrix out(rows, cols);
  std::size_t offset = 0;
  for (const auto& b : blocks) {
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, offset + j) = b(i, j);
    offset += b.cols();
  }
  return out;
}

CMatrix& CMatrix::operator+=(const CMatrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_) throw Error(ErrorCode::ShapeMismatch, "matrix sum");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
  return *this;
}

CMatrix& CMatrix::operator-=(const CMatrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_) throw Error(ErrorCode::ShapeMismatch, "matrix difference");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
  return *this;
}

CMatrix& CMatrix::operator*=(Complex s) {
  for (auto& z : data_) z *= s;
  return *this;
}

CMatrix operator*(const CMatrix& a, const CMatrix& b) {
  if (a.cols_ != b.rows_) throw Error(ErrorCode::ShapeMismatch, "matrix product");
  CMatrix out(a.rows_, b.cols_);
  for (std::size_t i = 0; i < a.rows_; ++i)
    for (std::size_t k = 0; k < a.cols_; ++k) {
      const Complex aik = a(i, k);
      if (aik == Complex(0.0, 0.0)) continue;
      for (std::size_t j = 0; j < b.cols_; ++j) out(i, j) += aik * b(k, j);
    }
  return out;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l) out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

double distance(const CMatrix& a, const CMatrix& b) { return (a - b).frobenius_norm(); }

double EigenDecomposition::spectral_radius() const {
  if (eigenvalues.empty()) return 0.0;
  return std::max(std::abs(eigenvalues.front()), std::abs(eigenvalues.back()));
}

CMatrix EigenDecomposition::rebuild(std::span<const Complex> values) const {
  const std::size_t n = eigenvalues.size();
  CMatrix out(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const Complex w = values[k];
    if (w == Complex(0.0, 0.0)) continue;
    for (std::size_t i = 0; i < n; ++i) {
      const Complex vik = eigenvectors(i, k) * w;
      for (std::size_t j = 0; j < n; ++j) out(i, j) += vik * std::conj(eigenvectors(j, k));
    }
  }
  return out;
}

namespace {

double offdiag_norm(const CMatrix& a) {
  double acc = 0.0;
  const std::size_t n = a.rows();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) acc += std::norm(a(i, j));
  return std::sqrt(acc);
}

// One complex Jacobi rotation zeroing a(p, q). The rotation is the real
// symmetric Jacobi rotation conjugated by the phase of a(p, q).
void rotate(CMatrix& a, CMatrix& v, std::size_t p, std::size_t q) {
  const Complex apq = a(p, q);
  const double mag = std::abs(apq);
  if (mag == 0.0) return;
  const Complex phase = apq / mag;
  const double app = a(p, p).real();
  const double aqq = a(q, q).real();
  const double theta = (aqq - app) / (2.0 * mag);
  double t;
  if (std::abs(theta) > 1e150) {
    t = 0.5 / theta;
  } else {
    t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
  }
  const double c = 1.0 / std::sqrt(1.0 + t * t);
  const double s = t * c;

  const Complex jpp = c;
  const Complex jpq = s;
  const Complex jqp = -s * std::conj(phase);
  const Complex jqq = c * std::conj(phase);

  const std::size_t n = a.rows();
  for (std::size_t k = 0; k < n; ++k) {
    const Complex akp = a(k, p);
    const Complex akq = a(k, q);
    a(k, p) = akp * jpp + akq * jqp;
    a(k, q) = akp * jpq + akq * jqq;
  }
  for (std::size_t k = 0; k < n; ++k) {
    const Complex apk = a(p, k);
    const Complex aqk = a(q, k);
    a(p, k) = std::conj(jpp) * apk + std::conj(jqp) * aqk;
    a(q, k) = std::conj(jpq) * apk + std::conj(jqq) * aqk;
  }
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  a(p, p) = a(p, p).real();
  a(q, q) = a(q, q).real();

  for (std::size_t k = 0; k < n; ++k) {
    const Complex vkp = v(k, p);
    const Complex vkq = v(k, q);
    v(k, p) = vkp * jpp + vkq * jqp;
    v(k, q) = vkp * jpq + vkq * jqq;
  }
}

}  // namespace

bool is_self_adjoint(const CMatrix& a, const Tolerances& tol) {
  if (!a.is_square()) throw Error(ErrorCode::ShapeMismatch, "self-adjointness needs a square matrix");
  const std::size_t n = a.rows();
  if (n == 0) return true;
  const CMatrix skew = a - a.adjoint();
  const double skew_f = skew.frobenius_norm();
  const double a_f = a.frobenius_norm();
  const double root_n = std::sqrt(static_cast<double>(n));
  // ||x||_F / sqrt(n) <= ||x||_op <= ||x||_F
  if (skew_f <= tol.hermitian * std::max(1.0, a_f / root_n)) return true;
  if (skew_f / root_n > tol.hermitian * std::max(1.0, a_f)) return false;
  const double skew_op = eig_hermitian_unchecked(skew * Complex(0.0, 1.0), tol).spectral_radius();
  const double a_op = op_norm(a, tol);
  return skew_op <= tol.hermitian * std::max(1.0, a_op);
}

EigenDecomposition eig_hermitian_unchecked(const CMatrix& input, const Tolerances& tol) {
  CMatrix a = input.hermitian_part();
  const std::size_t n = a.dim();
  CMatrix v = CMatrix::identity(n);
  const double target = tol.jacobi_offdiag * a.frobenius_norm();

  std::size_t sweeps = 0;
  while (offdiag_norm(a) > target) {
    if (sweeps == tol.jacobi_max_sweeps)
      throw Error(ErrorCode::NoConvergence, "Jacobi iteration cap reached");
    ++sweeps;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) rotate(a, v, p, q);
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });

  EigenDecomposition out;
  out.eigenvalues.resize(n);
  out.eigenvectors = CMatrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.eigenvalues[k] = a(order[k], order[k]).real();
    for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, k) = v(i, order[k]);
  }
  out.tol_used = target;
  out.sweeps = sweeps;
  return out;
}

EigenDecomposition eig_hermitian(const CMatrix& a, const Tolerances& tol) {
  if (!a.all_finite()) throw Error(ErrorCode::NotHermitian, "matrix has non-finite entries");
  if (!is_self_adjoint(a, tol)) throw Error(ErrorCode::NotHermitian, "matrix is not self-adjoint");
  return eig_hermitian_unchecked(a, tol);
}

CMatrix apply_function(const EigenDecomposition& eig, const RealFunction& g) {
  std::vector<Complex> values(eig.eigenvalues.size());
  std::transform(eig.eigenvalues.begin(), eig.eigenvalues.end(), values.begin(), g);
  return eig.rebuild(values);
}

CMatrix apply_function(const CMatrix& a, const RealFunction& g, const Tolerances& tol) {
  return apply_function(eig_hermitian(a, tol), g);
}

double rank_threshold(double lambda_max, const Tolerances& tol) {
  return std::max(tol.rank_relative * lambda_max, tol.rank_absolute);
}

double noise_floor(double lambda_max, const Tolerances& tol) {
  return std::max(tol.spectral_noise * lambda_max, tol.rank_absolute);
}

namespace {

EigenDecomposition eig_positive(const CMatrix& a, const Tolerances& tol) {
  auto eig = eig_hermitian(a, tol);
  const double norm = eig.spectral_radius();
  if (eig.min_eigenvalue() < -tol.not_positive * norm)
    throw Error(ErrorCode::NotPositive, "matrix has a negative eigenvalue " + std::to_string(eig.min_eigenvalue()));
  return eig;
}

}  // namespace

CMatrix sqrt_psd(const CMatrix& a, const Tolerances& tol) {
  const auto eig = eig_positive(a, tol);
  const double cut = noise_floor(eig.max_eigenvalue(), tol);
  return apply_function(eig, [cut](double x) { return Complex(x > cut ? std::sqrt(x) : 0.0); });
}

CMatrix pinv_psd(const CMatrix& a, const Tolerances& tol) {
  const auto eig = eig_positive(a, tol);
  const double cut = rank_threshold(eig.max_eigenvalue(), tol);
  return apply_function(eig, [cut](double x) { return Complex(x > cut ? 1.0 / x : 0.0); });
}

CMatrix support_projection(const CMatrix& a, const Tolerances& tol) {
  const auto eig = eig_positive(a, tol);
  const double cut = rank_threshold(eig.max_eigenvalue(), tol);
  return apply_function(eig, [cut](double x) { return Complex(x > cut ? 1.0 : 0.0); });
}

double op_norm(const CMatrix& a, const Tolerances& tol) {
  if (a.empty()) return 0.0;
  if (a.is_square() && a == a.adjoint()) return eig_hermitian_unchecked(a, tol).spectral_radius();
  const double top = eig_hermitian_unchecked(a.adjoint() * a, tol).max_eigenvalue();
  return std::sqrt(std::max(top, 0.0));
}

double min_eigenvalue(const CMatrix& a, const Tolerances& tol) {
  if (a.empty()) return 0.0;
  return eig_hermitian_unchecked(a, tol).min_eigenvalue();
}

bool is_positive(const CMatrix& a, double eps, const Tolerances& tol) {
  if (a.empty()) return true;
  const auto eig = eig_hermitian(a, tol);
  return eig.min_eigenvalue() >= -eps * std::max(1.0, eig.spectral_radius());
}

bool is_positive_by_norm(const CMatrix& a, double eps, const Tolerances& tol) {
  if (a.empty()) return true;
  if (!is_self_adjoint(a, tol)) throw Error(ErrorCode::NotHermitian, "positivity needs a self-adjoint matrix");
  const CMatrix h = a.hermitian_part();
  const double norm = op_norm(h, tol);
  const double shifted = op_norm(CMatrix::identity(h.dim()) * norm - h, tol);
  return shifted <= norm + eps * std::max(1.0, norm);
}

std::optional<Complex> proportionality_coefficient(const CMatrix& f, const CMatrix& g, const Tolerances& tol) {
  if (f.rows() != g.rows() || f.cols() != g.cols())
    throw Error(ErrorCode::ShapeMismatch, "proportionality needs equal shapes");
  const double nf = f.frobenius_norm();
  const double ng = g.frobenius_norm();
  if (nf == 0.0 && ng == 0.0) return Complex(1.0, 0.0);
  if (nf == 0.0 || ng == 0.0) return std::nullopt;
  Complex inner = 0.0;
  for (std::size_t k = 0; k < f.data().size(); ++k) inner += std::conj(g.data()[k]) * f.data()[k];
  const Complex alpha = inner / (ng * ng);
  if (alpha == Complex(0.0, 0.0)) return std::nullopt;
  if ((f - g * alpha).frobenius_norm() > tol.proportional * std::max(nf, ng)) return std::nullopt;
  return alpha;
}

}  // namespace seqprod
