#include <doctest.h>

#include <cmath>

#include "channel.hpp"
#include "errors.hpp"
#include "mc.hpp"

using namespace qkdrot;

namespace {

SimulationConfig config(int m, double theta, KrausChannel ch, std::uint64_t n, std::uint64_t seed) {
  SimulationConfig c;
  c.n = n;
  c.seed = seed;
  c.params = ProtocolParams::make(m, theta);
  c.channel = std::move(ch);
  return c;
}

bool same(const TranscriptStats& a, const TranscriptStats& b) {
  return a.n_total == b.n_total && a.n_basis_matched == b.n_basis_matched &&
         a.n_conclusive == b.n_conclusive && a.n_conclusive_errors == b.n_conclusive_errors &&
         a.n_test == b.n_test && a.n_test_errors == b.n_test_errors &&
         a.key_bits_remaining == b.key_bits_remaining && a.e_b_hat.value == b.e_b_hat.value &&
         a.e_b_hat.std_error == b.e_b_hat.std_error && a.p_con_hat.value == b.p_con_hat.value;
}

}  // namespace

TEST_CASE("deterministic regardless of thread count") {
  auto c = config(4, kPi / 4, depolarizing(0.1), 300000, 11);
  c.test_fraction = 0.1;
  c.threads = 1;
  const auto one = run(c);
  for (unsigned t : {2u, 3u, 8u}) {
    c.threads = t;
    CHECK(same(one, run(c)));
  }
  c.seed = 12;
  CHECK_FALSE(same(one, run(c)));
}

TEST_CASE("identity channel") {
  const auto s = run(config(4, kPi / 4, identity_channel(), 1000000, 7));
  CHECK(s.n_conclusive_errors == 0);
  CHECK(s.e_b_hat.value == 0.0);
  const double sigma = std::sqrt(0.25 * 0.75 / static_cast<double>(s.n_basis_matched));
  CHECK(std::abs(s.p_con_hat.value - 0.25) <= 4 * sigma);
  CHECK(s.n_conclusive <= s.n_basis_matched);
  CHECK(s.n_basis_matched <= s.n_total);
  const double p = 0.25;
  const double sift_sigma = std::sqrt(p * (1 - p) / 1e6);
  CHECK(std::abs(static_cast<double>(s.n_basis_matched) / 1e6 - p) <= 4 * sift_sigma);

  for (int m : {2, 3, 5}) {
    for (double th : {0.4, 1.1, kPi / 2}) {
      if (m == 2 && th == kPi / 2) continue;
      CHECK(run(config(m, th, identity_channel(), 20000, 3)).n_conclusive_errors == 0);
    }
  }
}

TEST_CASE("statistics against analytic values") {
  const auto dep = estimate_vs_analytic(config(4, kPi / 4, depolarizing(0.1), 1000000, 7));
  CHECK(std::abs(dep.e_b_analytic - 1.0 / 11.0) <= 1e-12);
  CHECK(std::abs(dep.z_e_b) <= 4.0);
  CHECK(std::abs(dep.z_p_con) <= 4.0);
  CHECK(std::abs(dep.z_sifting) <= 4.0);

  const auto rot = estimate_vs_analytic(config(4, kPi / 4, unitary_rotation(0.1), 1000000, 8));
  CHECK(std::abs(rot.e_b_analytic - 0.01954384641751215) <= 1e-12);
  CHECK(std::abs(rot.p_con_analytic - 0.25498335553968954) <= 1e-12);
  CHECK(std::abs(rot.z_e_b) <= 4.0);
  CHECK(std::abs(rot.z_p_con) <= 4.0);

  const auto id = estimate_vs_analytic(config(4, kPi / 4, identity_channel(), 100000, 7));
  CHECK(id.stats.e_b_hat.value == 0.0);
  CHECK(std::abs(id.z_e_b) <= 1e-9);  // analytic e_b is 0 up to roundoff

  const auto ad = estimate_vs_analytic(config(3, 1.0, amplitude_damping(0.3), 400000, 5));
  CHECK(std::abs(ad.z_e_b) <= 4.0);
  CHECK(std::abs(ad.z_p_con) <= 4.0);
}

TEST_CASE("standard error halves when n quadruples") {
  const auto small = run(config(4, kPi / 4, depolarizing(0.1), 250000, 21));
  const auto large = run(config(4, kPi / 4, depolarizing(0.1), 1000000, 22));
  const double ratio = small.e_b_hat.std_error / large.e_b_hat.std_error;
  CHECK(ratio >= 2.0 / 1.2);
  CHECK(ratio <= 2.0 * 1.2);
}

TEST_CASE("test bits") {
  auto c = config(4, kPi / 4, depolarizing(0.2), 200000, 4);
  c.test_fraction = 0.25;
  const auto s = run(c);
  CHECK(s.n_test == static_cast<std::uint64_t>(std::ceil(0.25 * static_cast<double>(s.n_conclusive))));
  CHECK(s.key_bits_remaining == s.n_conclusive - s.n_test);
  CHECK(s.n_test_errors <= s.n_conclusive_errors);
  CHECK(s.e_b_hat.value == doctest::Approx(static_cast<double>(s.n_test_errors) / s.n_test));
  CHECK_FALSE(s.test_sample_warning);

  auto tiny = config(4, kPi / 4, depolarizing(0.2), 5, 4);
  tiny.test_fraction = 0.1;
  const auto w = run(tiny);
  CHECK(w.test_sample_warning);
  CHECK(w.n_test == 0);
}

TEST_CASE("single signal") {
  const auto s = run(config(4, kPi / 4, depolarizing(0.1), 1, 99));
  CHECK(s.n_total == 1);
  CHECK(s.n_basis_matched <= 1);
  CHECK(s.n_conclusive <= s.n_basis_matched);
  CHECK(s.n_conclusive_errors <= s.n_conclusive);
}

TEST_CASE("invalid configuration") {
  auto c = config(4, kPi / 4, identity_channel(), 0, 1);
  CHECK_THROWS_AS(run(c), Error);
  c.n = 10;
  c.test_fraction = 1.0;
  CHECK_THROWS_AS(run(c), Error);
  c.test_fraction = -0.1;
  CHECK_THROWS_AS(run(c), Error);
}

TEST_CASE("binomial z score") {
  CHECK(binomial_z_score(0.5, 0.5, 100) == 0.0);
  CHECK(binomial_z_score(0.6, 0.5, 100) == doctest::Approx(2.0));
  CHECK(binomial_z_score(0.0, 0.0, 100) == 0.0);
  CHECK(std::isinf(binomial_z_score(0.1, 0.0, 100)));
}
