#include <doctest.h>

#include <cmath>

#include "errors.hpp"
#include "linalg.hpp"
#include "protocol.hpp"
#include "rng.hpp"

using namespace qkdrot;

namespace {

const Matrix kX(2, 2, {0.0, 1.0, 1.0, 0.0});
const Matrix kY(2, 2, {0.0, Complex(0, -1), Complex(0, 1), 0.0});
const Matrix kZ(2, 2, {1.0, 0.0, 0.0, -1.0});

Matrix random_matrix(std::uint64_t seed, std::size_t rows, std::size_t cols) {
  StreamRng rng(seed, 0);
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = Complex(rng.gaussian(), rng.gaussian());
  }
  return m;
}

}  // namespace

TEST_CASE("multiply and add") {
  CHECK(multiply(Matrix::identity(2), kX) == kX);
  CHECK(max_abs(add(kX, scale(kX, -1.0))) == 0.0);
  CHECK(max_abs_diff(rotation(kPi / 4) * rotation(kPi / 4), rotation(kPi / 2)) <= 1e-14);
}

TEST_CASE("dimension mismatch is rejected") {
  CHECK_THROWS_AS(multiply(Matrix::identity(2), Matrix::identity(4)), Error);
  CHECK_THROWS_AS(add(Matrix::identity(2), Matrix::identity(4)), Error);
  CHECK_THROWS_AS(trace_inner(Matrix::identity(2), Matrix::identity(4)), Error);
  CHECK_THROWS_AS(Matrix(3, 3), Error);
  CHECK_THROWS_AS(tensor_product(Matrix::identity(4), Matrix::identity(2)), Error);
}

TEST_CASE("non-finite entries are rejected") {
  CHECK_THROWS_AS(Matrix(2, 2, {std::nan(""), 0.0, 0.0, 1.0}), Error);
  CHECK_THROWS_AS(scale(kX, Complex(INFINITY, 0.0)), Error);
}

TEST_CASE("adjoint") {
  CHECK(adjoint(kY) == kY);
  CHECK(max_abs_diff(adjoint(rotation(0.37)), rotation(-0.37)) <= 1e-15);
  for (std::uint64_t s = 0; s < 20; ++s) {
    const Matrix a = random_matrix(s, 4, 4);
    CHECK(adjoint(adjoint(a)) == a);
  }
}

TEST_CASE("tensor product ordering") {
  CHECK(tensor_product(Matrix::identity(2), Matrix::identity(2)) == Matrix::identity(4));
  const Matrix e0 = Matrix::ket({1.0, 0.0});
  const Matrix e1 = Matrix::ket({0.0, 1.0});
  // index = 2 * A + B
  const Matrix k = tensor_product(e0, e1);
  CHECK(k.rows() == 4);
  CHECK(k[1] == Complex(1.0));
  CHECK(k[0] == Complex(0.0));
  CHECK(k[2] == Complex(0.0));
  CHECK(tensor_product(e1, e0)[2] == Complex(1.0));
  const Matrix a = tensor_product(kZ, Matrix::identity(2));
  const Matrix b = tensor_product(Matrix::identity(2), kX);
  CHECK(max_abs_diff(a * b, b * a) == 0.0);
}

TEST_CASE("tensor product is bilinear") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const Matrix a = random_matrix(3 * s, 2, 2);
    const Matrix b = random_matrix(3 * s + 1, 2, 2);
    const Matrix c = random_matrix(3 * s + 2, 2, 2);
    CHECK(max_abs_diff(tensor_product(a + b, c), tensor_product(a, c) + tensor_product(b, c)) <=
          1e-13);
  }
}

TEST_CASE("trace inner product") {
  CHECK(std::abs(trace_inner(kX, kX) - Complex(2.0)) == 0.0);
  CHECK(std::abs(trace_inner(kX, kZ)) == 0.0);
  CHECK(std::abs(trace_inner(kY, kY) - Complex(2.0)) == 0.0);
  for (std::uint64_t s = 0; s < 20; ++s) {
    const Matrix a = random_matrix(2 * s, 4, 4);
    const Matrix b = random_matrix(2 * s + 1, 4, 4);
    CHECK(std::abs(trace_inner(a, b) - std::conj(trace_inner(b, a))) <= 1e-13);
    CHECK(std::abs(trace(a * adjoint(a)).real() - frobenius_norm_sq(a)) <=
          1e-12 * std::max(1.0, frobenius_norm_sq(a)));
  }
}

TEST_CASE("projector and inner") {
  const Matrix v = Matrix::ket({Complex(0.6, 0.0), Complex(0.0, 0.8)});
  CHECK(std::abs(norm(v) - 1.0) <= 1e-15);
  const Matrix p = projector(v);
  CHECK(max_abs_diff(p * p, p) <= 1e-15);
  CHECK(is_hermitian(p));
  CHECK(std::abs(inner(v, v) - Complex(1.0)) <= 1e-15);
}

TEST_CASE("hermitian_sqrt_inv") {
  CHECK(max_abs_diff(hermitian_sqrt_inv(4.0 * Matrix::identity(2)), 0.5 * Matrix::identity(2)) <=
        1e-15);
  const Matrix d(2, 2, {1.0, 0.0, 0.0, 4.0});
  CHECK(max_abs_diff(hermitian_sqrt_inv(d), Matrix(2, 2, {1.0, 0.0, 0.0, 0.5})) <= 1e-15);
  for (std::uint64_t s = 0; s < 200; ++s) {
    const Matrix g = random_matrix(s, 2, 2);
    const Matrix a = adjoint(g) * g + 0.01 * Matrix::identity(2);
    const Matrix x = hermitian_sqrt_inv(a);
    CHECK(max_abs_diff(x * a * x, Matrix::identity(2)) <= 1e-10);
    CHECK(is_hermitian(x, 1e-10));
  }
  CHECK_THROWS_AS(hermitian_sqrt_inv(kX + Matrix(2, 2, {0.0, 1.0, 0.0, 0.0})), Error);
  CHECK_THROWS_AS(hermitian_sqrt_inv(Matrix(2, 2, {1.0, 0.0, 0.0, 0.0})), Error);
  CHECK_THROWS_AS(hermitian_sqrt_inv(kZ), Error);
}

TEST_CASE("2x2 hermitian eigenvalues") {
  const auto ev = hermitian_eigenvalues_2x2(kX);
  CHECK(ev[0] == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(ev[1] == doctest::Approx(1.0).epsilon(1e-15));
  const auto ev2 = hermitian_eigenvalues_2x2(Matrix(2, 2, {2.0, Complex(0, 1), Complex(0, -1), 2.0}));
  CHECK(ev2[0] == doctest::Approx(1.0));
  CHECK(ev2[1] == doctest::Approx(3.0));
}
