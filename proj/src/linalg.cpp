#include "linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "errors.hpp"

namespace qkdrot {

namespace {

bool valid_dim(std::size_t d) { return d == 1 || d == 2 || d == 4; }

std::string shape(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    fail(ErrorCode::dimension_mismatch,
         std::string(op) + ": shape mismatch " + shape(a) + " vs " + shape(b));
  }
}

void require_finite(Complex z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
    fail(ErrorCode::invalid_argument, "matrix entry is not finite");
  }
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {
  if (!valid_dim(rows) || !valid_dim(cols)) {
    fail(ErrorCode::dimension_mismatch, "matrix dimensions must be 1, 2 or 4; got " +
                                            std::to_string(rows) + "x" + std::to_string(cols));
  }
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::span<const Complex> entries)
    : Matrix(rows, cols) {
  if (entries.size() != rows * cols) {
    fail(ErrorCode::dimension_mismatch, "expected " + std::to_string(rows * cols) +
                                            " entries, got " + std::to_string(entries.size()));
  }
  for (std::size_t i = 0; i < entries.size(); ++i) {
    require_finite(entries[i]);
    data_[i] = entries[i];
  }
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::initializer_list<Complex> entries)
    : Matrix(rows, cols, std::span<const Complex>(entries.begin(), entries.size())) {}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::ket(std::initializer_list<Complex> entries) {
  return Matrix(entries.size(), 1, entries);
}

bool Matrix::operator==(const Matrix& other) const {
  return rows_ == other.rows_ && cols_ == other.cols_ &&
         std::equal(data_.begin(), data_.begin() + size(), other.data_.begin());
}

Matrix multiply(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    fail(ErrorCode::dimension_mismatch, "multiply: inner dimensions differ, " + shape(a) +
                                            " * " + shape(b));
  }
  Matrix out(a.rows(), b.cols());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t c = 0; c < b.cols(); ++c) {
      Complex acc = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) acc += a(r, k) * b(k, c);
      out(r, c) = acc;
    }
  }
  return out;
}

Matrix add(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "add");
  Matrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

Matrix subtract(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "subtract");
  Matrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

Matrix scale(const Matrix& a, Complex c) {
  require_finite(c);
  Matrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = c * a[i];
  return out;
}

Matrix adjoint(const Matrix& a) {
  Matrix out(a.cols(), a.rows());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t c = 0; c < a.cols(); ++c) out(c, r) = std::conj(a(r, c));
  }
  return out;
}

Matrix tensor_product(const Matrix& a, const Matrix& b) {
  if (a.rows() * b.rows() > 4 || a.cols() * b.cols() > 4) {
    fail(ErrorCode::dimension_mismatch,
         "tensor_product: result larger than 4x4 (" + shape(a) + " x " + shape(b) + ")");
  }
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t ar = 0; ar < a.rows(); ++ar) {
    for (std::size_t ac = 0; ac < a.cols(); ++ac) {
      for (std::size_t br = 0; br < b.rows(); ++br) {
        for (std::size_t bc = 0; bc < b.cols(); ++bc) {
          out(ar * b.rows() + br, ac * b.cols() + bc) = a(ar, ac) * b(br, bc);
        }
      }
    }
  }
  return out;
}

Complex trace_inner(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "trace_inner");
  Complex acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
  return acc;
}

Complex trace(const Matrix& a) {
  if (!a.is_square()) fail(ErrorCode::dimension_mismatch, "trace: matrix is " + shape(a));
  Complex acc = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) acc += a(i, i);
  return acc;
}

Matrix projector(const Matrix& ket) {
  if (ket.cols() != 1) fail(ErrorCode::dimension_mismatch, "projector: not a ket, " + shape(ket));
  return multiply(ket, adjoint(ket));
}

Complex inner(const Matrix& a, const Matrix& b) {
  if (a.cols() != 1 || b.cols() != 1) {
    fail(ErrorCode::dimension_mismatch, "inner: arguments must be kets");
  }
  return trace_inner(a, b);
}

double norm(const Matrix& ket) { return std::sqrt(frobenius_norm_sq(ket)); }

double frobenius_norm_sq(const Matrix& a) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::norm(a[i]);
  return acc;
}

double max_abs(const Matrix& a) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i]));
  return m;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "max_abs_diff");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

bool is_hermitian(const Matrix& a, double tol) {
  return a.is_square() && max_abs_diff(a, adjoint(a)) <= tol;
}

std::array<double, 2> hermitian_eigenvalues_2x2(const Matrix& a) {
  if (a.rows() != 2 || a.cols() != 2) {
    fail(ErrorCode::dimension_mismatch, "expected a 2x2 matrix, got " + shape(a));
  }
  const double p = a(0, 0).real();
  const double r = a(1, 1).real();
  const double mean = 0.5 * (p + r);
  // Discriminant of the characteristic polynomial, written to avoid cancellation.
  const double half_gap = std::hypot(0.5 * (p - r), std::abs(a(0, 1)));
  return {mean - half_gap, mean + half_gap};
}

Matrix hermitian_sqrt_inv(const Matrix& a) {
  if (a.rows() != 2 || a.cols() != 2) {
    fail(ErrorCode::dimension_mismatch, "hermitian_sqrt_inv: expected 2x2, got " + shape(a));
  }
  const double scale_ref = std::max(1.0, max_abs(a));
  if (!is_hermitian(a, kAlgebraTol * scale_ref)) {
    fail(ErrorCode::not_positive_definite, "hermitian_sqrt_inv: matrix is not Hermitian");
  }
  const auto eig = hermitian_eigenvalues_2x2(a);
  if (eig[0] < 1e-12) {
    fail(ErrorCode::not_positive_definite,
         "hermitian_sqrt_inv: smallest eigenvalue " + std::to_string(eig[0]) + " below 1e-12");
  }
  // sqrt(a) = (a + s I) / t with s = sqrt(det a), t = sqrt(tr a + 2 s).
  const double s = std::sqrt(eig[0] * eig[1]);
  const double t = std::sqrt(eig[0] + eig[1] + 2.0 * s);
  // Inverse of (a + s I) / t for a 2x2 matrix [[p, q], [q*, r]].
  const Complex p = a(0, 0).real() + s;
  const Complex r = a(1, 1).real() + s;
  const Complex q = 0.5 * (a(0, 1) + std::conj(a(1, 0)));
  const Complex det = p * r - q * std::conj(q);
  Matrix out(2, 2, {r, -q, -std::conj(q), p});
  return scale(out, t / det);
}

}  // namespace qkdrot
