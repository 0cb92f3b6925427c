#include <doctest.h>

#include <cmath>

#include "channel.hpp"
#include "errors.hpp"
#include "protocol.hpp"

using namespace qkdrot;

namespace {

const double kThetas[] = {0.1, 0.3, kPi / 4, 1.0, 1.2, kPi / 2};

}  // namespace

TEST_CASE("params validation") {
  CHECK_NOTHROW(ProtocolParams::make(2, 0.3));
  CHECK_THROWS_AS(ProtocolParams::make(1, 0.3), Error);
  CHECK_THROWS_AS(ProtocolParams::make(4, 0.0), Error);
  CHECK_THROWS_AS(ProtocolParams::make(4, 1.6), Error);
  CHECK_THROWS_AS(ProtocolParams::make(4, std::nan("")), Error);
  CHECK(ProtocolParams::make(2, kPi / 2).degenerate());
  CHECK_FALSE(ProtocolParams::make(3, kPi / 2).degenerate());
  CHECK_FALSE(ProtocolParams::make(2, 1.0).degenerate());
}

TEST_CASE("rotation") {
  CHECK(max_abs_diff(rotation(0.0), Matrix::identity(2)) == 0.0);
  CHECK(max_abs_diff(rotation(kPi / 2) * ket_0x(), ket_1x()) <= 1e-16);
  for (double b : {0.1, 1.0, -2.5}) {
    CHECK(max_abs_diff(rotation(b) * rotation(-b), Matrix::identity(2)) <= 1e-14);
  }
}

TEST_CASE("z kets in the x representation") {
  const double r = 1.0 / std::sqrt(2.0);
  CHECK(max_abs_diff(ket_0z(), Matrix::ket({r, r})) <= 1e-15);
  CHECK(max_abs_diff(ket_1z(), Matrix::ket({r, -r})) <= 1e-15);
}

TEST_CASE("signal states") {
  const auto params = ProtocolParams::make(4, kPi / 2);
  CHECK(max_abs_diff(prepare_state(params, 0, 0).ket, ket_0z()) <= 1e-15);

  const auto sarg = ProtocolParams::make(4, kPi / 4);
  const Matrix expected = rotation(kPi / 4) * Matrix::ket({std::cos(kPi / 8), -std::sin(kPi / 8)});
  CHECK(max_abs_diff(prepare_state(sarg, 1, 1).ket, expected) <= 1e-15);

  for (int m : {2, 3, 4, 5, 8}) {
    for (double th : kThetas) {
      const auto p = ProtocolParams::make(m, th);
      for (int l = 0; l < m; ++l) {
        const Matrix plus = prepare_state(p, l, 0).ket;
        const Matrix minus = prepare_state(p, l, 1).ket;
        CHECK(std::abs(norm(plus) - 1.0) <= 1e-12);
        CHECK(std::abs(inner(plus, minus) - Complex(std::cos(th))) <= 1e-12);
        for (int b = 0; b < 2; ++b) {
          const Matrix rotated = rotation(l * kPi / m) * prepare_state(p, 0, b).ket;
          CHECK(max_abs_diff(prepare_state(p, l, b).ket, rotated) <= 1e-13);
        }
      }
    }
  }
  CHECK_THROWS_AS(prepare_state(sarg, 4, 0), Error);
  CHECK_THROWS_AS(prepare_state(sarg, 0, 2), Error);
}

TEST_CASE("filter") {
  const double r = 1.0 / std::sqrt(2.0);
  CHECK(max_abs_diff(filter(ProtocolParams::make(4, kPi / 2), 0).matrix,
                     r * Matrix::identity(2)) <= 1e-15);
  const Matrix f0 = filter(ProtocolParams::make(4, kPi / 4), 0).matrix;
  CHECK(max_abs_diff(f0, Matrix(2, 2, {std::sin(kPi / 8), 0.0, 0.0, std::cos(kPi / 8)})) <= 1e-16);
  const auto p = ProtocolParams::make(4, kPi / 4);
  CHECK(max_abs_diff(filter(p, 2).matrix, f0 * rotation(-kPi / 2)) <= 1e-14);
  CHECK_THROWS_AS(filter(p, -1), Error);

  for (int m : {2, 3, 5}) {
    for (double th : kThetas) {
      const auto q = ProtocolParams::make(m, th);
      for (int l = 0; l < m; ++l) {
        const Matrix f = filter(q, l).matrix;
        CHECK(std::abs(norm(f * prepare_state(q, l, 0).ket) - norm(f * prepare_state(q, l, 1).ket)) <=
              1e-12);
        // Singular values at most one.
        const auto ev = hermitian_eigenvalues_2x2(adjoint(f) * f);
        CHECK(ev[1] <= 1.0 + 1e-12);
      }
    }
  }
}

TEST_CASE("measurement setups") {
  for (int m : {2, 4, 5}) {
    for (double th : kThetas) {
      const auto p = ProtocolParams::make(m, th);
      for (int k = 0; k < m; ++k) {
        const auto setups = measurement_setups(p, k);
        for (const auto& s : setups) {
          CHECK(std::abs(inner(s.kets[0], s.kets[1])) <= 1e-12);
          CHECK(max_abs_diff(s.projector_sum(), Matrix::identity(2)) <= 1e-12);
        }
        // Noiseless: a conclusive outcome never decodes the wrong bit.
        for (int bit = 0; bit < 2; ++bit) {
          const Matrix sent = prepare_state(p, k, bit).ket;
          double p_conclusive = 0.0;
          for (const auto& s : setups) {
            for (int o = 0; o < 2; ++o) {
              const double pr = 0.5 * std::norm(inner(s.kets[o], sent));
              if (s.outcomes[o] == Outcome::inconclusive) continue;
              p_conclusive += pr;
              const int decoded = s.outcomes[o] == Outcome::bit0 ? 0 : 1;
              if (decoded != bit) CHECK(pr <= 1e-30);
            }
          }
          CHECK(p_conclusive == doctest::Approx(0.5 * std::pow(std::sin(th), 2)).epsilon(1e-12));
        }
      }
      CHECK_THROWS_AS(measurement_setups(p, m), Error);
    }
  }
}

TEST_CASE("conclusive probability") {
  for (int m = 2; m <= 8; ++m) {
    for (double th : kThetas) {
      const auto p = ProtocolParams::make(m, th);
      const auto d = outcome_distribution(p, identity_channel());
      CHECK(std::abs(d.p_conclusive - 0.5 * std::pow(std::sin(th), 2)) <= 1e-12);
      CHECK(std::abs(d.p_conclusive_error) <= 1e-15);
    }
  }
  CHECK(conclusive_probability(ProtocolParams::make(4, kPi / 2), identity_channel()) ==
        doctest::Approx(0.5).epsilon(1e-15));
  // Independent enumeration (tools/oracle.py): 0.275 and joint error 0.025.
  const auto d = outcome_distribution(ProtocolParams::make(4, kPi / 4), depolarizing(0.1));
  CHECK(std::abs(d.p_conclusive - 0.275) <= 1e-12);
  CHECK(std::abs(d.p_conclusive_error - 0.025) <= 1e-12);
  CHECK(d.error_rate() == doctest::Approx(1.0 / 11.0).epsilon(1e-12));
}
