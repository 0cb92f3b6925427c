#pragma once

// Small dense complex matrices for single-qubit and two-qubit work.
//
// Every matrix has rows, cols in {1, 2, 4}; storage is inline and row-major,
// so matrices are cheap value types. Two-qubit operators use the ordering
// index = 2 * (A index) + (B index), i.e. tensor_product(a, b) puts the
// A register in the slow (left) factor.

#include <array>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>

namespace qkdrot {

using Complex = std::complex<double>;

// Absolute tolerance for exact-algebra identities on unit-scale inputs.
inline constexpr double kAlgebraTol = 1e-12;

class Matrix {
 public:
  static constexpr std::size_t kMaxEntries = 16;

  Matrix() : Matrix(1, 1) {}
  Matrix(std::size_t rows, std::size_t cols);
  Matrix(std::size_t rows, std::size_t cols, std::span<const Complex> entries);
  Matrix(std::size_t rows, std::size_t cols, std::initializer_list<Complex> entries);

  static Matrix identity(std::size_t n);
  static Matrix zeros(std::size_t rows, std::size_t cols) { return Matrix(rows, cols); }
  // Column vector.
  static Matrix ket(std::initializer_list<Complex> entries);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return rows_ * cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }

  Complex& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Complex& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  // Vector access for kets (cols == 1).
  Complex& operator[](std::size_t i) { return data_[i]; }
  const Complex& operator[](std::size_t i) const { return data_[i]; }

  std::span<const Complex> entries() const noexcept { return {data_.data(), size()}; }

  bool operator==(const Matrix& other) const;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::array<Complex, kMaxEntries> data_{};
};

Matrix multiply(const Matrix& a, const Matrix& b);
Matrix add(const Matrix& a, const Matrix& b);
Matrix subtract(const Matrix& a, const Matrix& b);
Matrix scale(const Matrix& a, Complex c);

inline Matrix operator*(const Matrix& a, const Matrix& b) { return multiply(a, b); }
inline Matrix operator+(const Matrix& a, const Matrix& b) { return add(a, b); }
inline Matrix operator-(const Matrix& a, const Matrix& b) { return subtract(a, b); }
inline Matrix operator*(Complex c, const Matrix& a) { return scale(a, c); }
inline Matrix operator*(double c, const Matrix& a) { return scale(a, Complex(c, 0.0)); }

/// Conjugate transpose.
Matrix adjoint(const Matrix& a);

/// Kronecker product, `a` on the left (slow) index.
Matrix tensor_product(const Matrix& a, const Matrix& b);

/// Hilbert-Schmidt pairing tr(a^dagger b).
Complex trace_inner(const Matrix& a, const Matrix& b);

Complex trace(const Matrix& a);

/// |v><v| for a column vector v.
Matrix projector(const Matrix& ket);

/// <a|b> for column vectors.
Complex inner(const Matrix& a, const Matrix& b);

double norm(const Matrix& ket);
double frobenius_norm_sq(const Matrix& a);
double max_abs(const Matrix& a);
double max_abs_diff(const Matrix& a, const Matrix& b);
bool is_hermitian(const Matrix& a, double tol = kAlgebraTol);

/// a^{-1/2} for a 2x2 Hermitian positive definite matrix, by closed form.
/// Rejects non-Hermitian input and input whose smallest eigenvalue is below
/// 1e-12.
Matrix hermitian_sqrt_inv(const Matrix& a);

/// Eigenvalues (ascending) of a 2x2 Hermitian matrix from its characteristic
/// polynomial.
std::array<double, 2> hermitian_eigenvalues_2x2(const Matrix& a);

}  // namespace qkdrot
