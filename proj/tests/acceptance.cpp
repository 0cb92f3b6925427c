// Acceptance criteria 1-10: one PASS/FAIL line each, tolerances pinned here.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "analysis.hpp"
#include "channel.hpp"
#include "mc.hpp"
#include "verify.hpp"

using namespace qkdrot;

namespace {

constexpr int kTrials = 200;
constexpr std::uint64_t kSeed = 7;

struct Verdict {
  bool passed = true;
  std::string detail;
};

Verdict from_suites(std::initializer_list<SuiteResult> suites) {
  Verdict o;
  for (const SuiteResult& s : suites) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s%s %.2e (tol %.0e)", o.detail.empty() ? "" : "; ",
                  s.name.c_str(), s.max_deviation, s.tolerance);
    o.detail += buf;
    if (!s.passed) {
      o.passed = false;
      o.detail += " FAILED at " + s.failure;
    }
  }
  return o;
}

VerifyOptions options() {
  VerifyOptions v;
  v.trials = kTrials;
  v.seed = kSeed;
  return v;
}

Verdict sarg04_point() {
  const auto params = ProtocolParams::make(4, kPi / 4);
  const double slope = error_relation(params).slope;
  Verdict o;
  o.passed = std::abs(slope - 1.5) <= 1e-12;
  double worst_gap = 0.0;
  for (double e_b = 0.0; e_b < 1.0 / 3.0; e_b += 1e-3) {
    const auto lam = lambda_worst_case(params, LambdaMode::admissible_range, e_b, slope * e_b);
    worst_gap = std::max(worst_gap, std::abs(lam.worst - e_b / 2));
  }
  o.passed = o.passed && worst_gap <= 1e-12;
  char buf[160];
  std::snprintf(buf, sizeof buf, "slope %.15g (tol 1e-12); max |lambda_worst - e_b/2| %.2e (tol 1e-12)",
                slope, worst_gap);
  o.detail = buf;
  return o;
}

Verdict monte_carlo() {
  Verdict o;
  SimulationConfig c;
  c.n = 1000000;
  c.seed = kSeed;
  c.params = ProtocolParams::make(4, kPi / 4);
  c.channel = identity_channel();
  const TranscriptStats id = run(c);
  const double p_con = 0.5 * std::pow(std::sin(kPi / 4), 2);
  const double z_id = binomial_z_score(id.p_con_hat.value, p_con, id.n_basis_matched);
  c.channel = depolarizing(0.1);
  const TranscriptStats dep = run(c);
  const double z_dep = binomial_z_score(dep.e_b_hat.value, 1.0 / 11.0, dep.n_conclusive);
  o.passed = id.e_b_hat.value == 0.0 && std::abs(z_id) <= 4.0 && std::abs(z_dep) <= 4.0;
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "identity e_b_hat %.3g, p_con_hat z %.2f; depolarizing(0.1) e_b_hat %.6f z %.2f "
                "(|z| <= 4)",
                id.e_b_hat.value, z_id, dep.e_b_hat.value, z_dep);
  o.detail = buf;
  return o;
}

struct Criterion {
  int id;
  const char* title;
  double time_limit_s;  // 0: none
  std::function<Verdict()> check;
};

}  // namespace

int main() {
  const VerifyOptions opts = options();
  const std::vector<Criterion> criteria = {
      {1, "error law e_p = (1 + cos^2 theta) e_b", 10.0,
       [&] { return from_suites({verify_error_law(opts)}); }},
      {2, "closed forms match numerical Bell projections", 0.0,
       [&] { return from_suites({verify_oracle_equivalence(opts)}); }},
      {3, "rho_AB independent of M > 2", 0.0,
       [&] { return from_suites({verify_m_independence(opts)}); }},
      {4, "SARG04 point slope and worst-case lambda", 0.0, sarg04_point},
      {5, "M = 2 phase error bound", 0.0,
       [&] {
         return from_suites(
             {verify_m2_bound_random(opts), verify_m2_saturation(), verify_m2_bound_oracle()});
       }},
      {6, "spherical averages and rotation sums", 0.0,
       [] { return from_suites({verify_spherical_average()}); }},
      {7, "Phi closed form and commutation", 0.0,
       [] { return from_suites({verify_phi_closed_form(kSeed)}); }},
      {8, "rotation covariance (M > 2) and M = 2 witness", 0.0,
       [&] { return from_suites({verify_rotation_covariance(opts), verify_m2_witness()}); }},
      {9, "Monte Carlo consistency", 60.0, monte_carlo},
      {10, "key rate reduction and BB84 threshold", 0.0,
       [] { return from_suites({verify_key_rate_reduction()}); }},
  };

  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.time_limit_s > 0.0 && secs > c.time_limit_s) {
      o.passed = false;
      o.detail += "; over time limit";
    }
    char timing[64];
    if (c.time_limit_s > 0.0) {
      std::snprintf(timing, sizeof timing, "%.2f s (limit %.0f s)", secs, c.time_limit_s);
    } else {
      std::snprintf(timing, sizeof timing, "%.2f s", secs);
    }
    std::printf("%s AC%-2d %s: %s [%s]\n", o.passed ? "PASS" : "FAIL", c.id, c.title,
                o.detail.c_str(), timing);
    failed += o.passed ? 0 : 1;
  }
  std::printf("%d/%zu acceptance criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
