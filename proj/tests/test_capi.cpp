#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

#include "qkdrot/qkdrot.h"

namespace {

constexpr double kPi = 3.14159265358979323846;

const qkd_params kSarg{4, kPi / 4, QKD_SIFT_GENERIC};

}  // namespace

TEST_CASE("status strings and version") {
  CHECK(std::string(qkd_version()) == "0.1.0");
  CHECK(std::string(qkd_status_string(QKD_OK)) == "ok");
  CHECK(std::string(qkd_status_string(QKD_ERR_DEGENERATE)) == "degenerate parameters");
}

TEST_CASE("channel handles") {
  qkd_channel* ch = nullptr;
  REQUIRE(qkd_channel_depolarizing(0.1, &ch) == QKD_OK);
  CHECK(qkd_channel_num_kraus(ch) == 4);
  CHECK(qkd_channel_param(ch) == 0.1);
  double k[8];
  REQUIRE(qkd_channel_get_kraus(ch, 0, k) == QKD_OK);
  CHECK(k[0] == doctest::Approx(std::sqrt(0.925)));
  CHECK(qkd_channel_get_kraus(ch, 4, k) == QKD_ERR_INVALID_ARGUMENT);
  double coeffs[8];
  REQUIRE(qkd_channel_pauli_coeffs(ch, 0, coeffs) == QKD_OK);
  CHECK(coeffs[0] * coeffs[0] + coeffs[1] * coeffs[1] == doctest::Approx(0.925));

  char* json = nullptr;
  REQUIRE(qkd_channel_to_json(ch, &json) == QKD_OK);
  qkd_channel* again = nullptr;
  REQUIRE(qkd_channel_from_json(json, &again) == QKD_OK);
  qkd_string_free(json);
  double k2[8];
  REQUIRE(qkd_channel_get_kraus(again, 0, k2) == QKD_OK);
  for (int i = 0; i < 8; ++i) CHECK(k[i] == k2[i]);

  qkd_channel* conj = nullptr;
  REQUIRE(qkd_channel_conjugate(ch, 0.3, &conj) == QKD_OK);
  CHECK(qkd_channel_num_kraus(conj) == 4);

  qkd_channel_free(conj);
  qkd_channel_free(again);
  qkd_channel_free(ch);
  qkd_channel_free(nullptr);
}

TEST_CASE("custom channel from raw operators") {
  const double flip[8] = {0, 0, 1, 0, 1, 0, 0, 0};
  qkd_channel* ch = nullptr;
  REQUIRE(qkd_channel_custom(flip, 1, "flip", &ch) == QKD_OK);
  CHECK(std::string(qkd_channel_label(ch)) == "flip");
  qkd_channel_free(ch);
  const double bad[8] = {2, 0, 0, 0, 0, 0, 2, 0};
  ch = nullptr;
  CHECK(qkd_channel_custom(bad, 1, nullptr, &ch) == QKD_ERR_INVALID_ARGUMENT);
  CHECK(ch == nullptr);
  CHECK(std::string(qkd_last_error()).find("trace preserving") != std::string::npos);
}

TEST_CASE("errors map to status codes") {
  qkd_channel* ch = nullptr;
  CHECK(qkd_channel_depolarizing(2.0, &ch) == QKD_ERR_INVALID_ARGUMENT);
  CHECK(std::string(qkd_last_error()).size() > 0);
  CHECK(qkd_channel_from_json("{not json", &ch) == QKD_ERR_PARSE);
  CHECK(qkd_channel_from_json(R"({"type":"warp"})", &ch) == QKD_ERR_PARSE);
  CHECK(qkd_channel_identity(nullptr) == QKD_ERR_NULL);
  const qkd_params bad{1, 0.5, QKD_SIFT_GENERIC};
  CHECK(qkd_params_validate(&bad) == QKD_ERR_INVALID_ARGUMENT);
  const qkd_params degenerate{2, kPi / 2, QKD_SIFT_GENERIC};
  CHECK(qkd_params_validate(&degenerate) == QKD_OK);
  CHECK(qkd_params_degenerate(&degenerate) == 1);
  qkd_error_relation rel{};
  CHECK(qkd_error_relation_get(&degenerate, &rel) == QKD_ERR_DEGENERATE);
  CHECK(std::string(qkd_last_error()).find("degenerate") != std::string::npos);
  qkd_m2_bound b{};
  CHECK(qkd_m2_bound_solve(kPi / 2, 0.1, &b) == QKD_ERR_DEGENERATE);
}

TEST_CASE("last error is per thread") {
  qkd_channel* ch = nullptr;
  CHECK(qkd_channel_depolarizing(2.0, &ch) == QKD_ERR_INVALID_ARGUMENT);
  const std::string here = qkd_last_error();
  std::thread([] {
    CHECK(std::string(qkd_last_error()).empty());
  }).join();
  CHECK(std::string(qkd_last_error()) == here);
}

TEST_CASE("edp through the C API") {
  qkd_channel* ch = nullptr;
  REQUIRE(qkd_channel_depolarizing(0.1, &ch) == QKD_OK);
  qkd_bell_diagnostics d{};
  double rho[32];
  REQUIRE(qkd_edp_numerical(&kSarg, ch, &d, rho) == QKD_OK);
  CHECK(std::abs(d.e_b - 1.0 / 11.0) <= 1e-12);
  CHECK(std::abs(d.e_p - 3.0 / 22.0) <= 1e-12);
  CHECK(std::abs(d.p_con - 0.275) <= 1e-12);
  double tr = 0.0;
  for (int i = 0; i < 4; ++i) tr += rho[2 * (4 * i + i)];
  CHECK(std::abs(tr - 1.0) <= 1e-12);
  qkd_bell_diagnostics c{};
  REQUIRE(qkd_edp_closed_form(&kSarg, ch, &c) == QKD_OK);
  CHECK(std::abs(c.p_i - d.p_i) <= 1e-12);
  double p_con = 0.0;
  double p_err = 0.0;
  REQUIRE(qkd_conclusive_probability(&kSarg, ch, &p_con, &p_err) == QKD_OK);
  CHECK(std::abs(p_con - 0.275) <= 1e-12);
  CHECK(std::abs(p_err - 0.025) <= 1e-12);

  double phi[32];
  double phi_cf[32];
  REQUIRE(qkd_phi_operator(&kSarg, phi) == QKD_OK);
  REQUIRE(qkd_phi_closed_form(&kSarg, phi_cf) == QKD_OK);
  for (int i = 0; i < 32; ++i) CHECK(std::abs(phi[i] - phi_cf[i]) <= 1e-12);

  qkd_spherical_average avg{};
  REQUIRE(qkd_spherical_average_check(5, &avg) == QKD_OK);
  CHECK(std::abs(avg.mean_cos_sq - 0.5) <= 1e-12);
  qkd_channel_free(ch);
}

TEST_CASE("analysis through the C API") {
  qkd_error_relation rel{};
  REQUIRE(qkd_error_relation_get(&kSarg, &rel) == QKD_OK);
  CHECK(rel.kind == QKD_RELATION_EQUALITY);
  CHECK(std::abs(rel.slope - 1.5) <= 1e-12);
  qkd_m2_bound b{};
  REQUIRE(qkd_m2_bound_solve(kPi / 4, 0.1, &b) == QKD_OK);
  CHECK(std::abs(b.e_p_max - 0.3) <= 1e-12);
  double oracle = 0.0;
  REQUIRE(qkd_m2_bound_oracle(kPi / 4, 0.1, 1e-3, &oracle) == QKD_OK);
  CHECK(std::abs(oracle - 0.3) <= 2e-3);
  double h = 0.0;
  REQUIRE(qkd_entropy_h2(0.5, &h) == QKD_OK);
  CHECK(h == doctest::Approx(1.0));
  const double x[4] = {0.25, 0.25, 0.25, 0.25};
  REQUIRE(qkd_entropy_h4(x, &h) == QKD_OK);
  CHECK(h == doctest::Approx(2.0));
  double lo = 0, hi = 0, worst = 0;
  REQUIRE(qkd_lambda_worst_case(&kSarg, QKD_LAMBDA_ADMISSIBLE_RANGE, 0.06, 0.09, &lo, &hi, &worst) ==
          QKD_OK);
  CHECK(std::abs(worst - 0.03) <= 1e-15);
  qkd_key_rate_report r{};
  REQUIRE(qkd_key_rate(&kSarg, QKD_LAMBDA_ADMISSIBLE_RANGE, 0.06, 0.25, &r) == QKD_OK);
  CHECK(r.bracket_h4 >= r.bracket_shor_preskill);
  CHECK(r.abort_recommended == 0);
}

TEST_CASE("simulation through the C API") {
  qkd_channel* ch = nullptr;
  REQUIRE(qkd_channel_depolarizing(0.1, &ch) == QKD_OK);
  const qkd_sim_config cfg{200000, 7, 0.0, 0};
  qkd_transcript_stats a{};
  qkd_transcript_stats b{};
  REQUIRE(qkd_simulate(&kSarg, ch, &cfg, &a) == QKD_OK);
  const qkd_sim_config one_thread{200000, 7, 0.0, 1};
  REQUIRE(qkd_simulate(&kSarg, ch, &one_thread, &b) == QKD_OK);
  CHECK(a.n_conclusive == b.n_conclusive);
  CHECK(a.n_conclusive_errors == b.n_conclusive_errors);
  qkd_sim_comparison c{};
  REQUIRE(qkd_estimate_vs_analytic(&kSarg, ch, &cfg, &c) == QKD_OK);
  CHECK(std::abs(c.z_e_b) <= 4.0);
  const qkd_sim_config bad{0, 7, 0.0, 0};
  CHECK(qkd_simulate(&kSarg, ch, &bad, &a) == QKD_ERR_INVALID_ARGUMENT);
  qkd_channel_free(ch);
}

TEST_CASE("verify report") {
  qkd_verify_report* r = nullptr;
  REQUIRE(qkd_verify_run(2, 7, &r) == QKD_OK);
  CHECK(qkd_verify_count(r) == 13);
  CHECK(qkd_verify_all_passed(r) == 1);
  const char* name = nullptr;
  const char* failure = nullptr;
  int passed = 0;
  double dev = 0, tol = 0;
  REQUIRE(qkd_verify_suite(r, 0, &name, &passed, &dev, &tol, &failure) == QKD_OK);
  CHECK(std::string(name).size() > 0);
  CHECK(passed == 1);
  CHECK(std::string(failure).empty());
  CHECK(qkd_verify_suite(r, 13, &name, &passed, &dev, &tol, &failure) == QKD_ERR_INVALID_ARGUMENT);
  qkd_verify_report_free(r);
  CHECK(qkd_verify_run(0, 7, &r) == QKD_ERR_INVALID_ARGUMENT);
}
