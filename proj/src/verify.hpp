#pragma once

// Property suites behind `qkdrot verify`. Each suite reports the largest
// deviation it saw against its tolerance; failures carry the parameters of
// the worst case so they can be replayed.

#include <cstdint>
#include <string>
#include <vector>

#include "channel.hpp"

namespace qkdrot {

struct SuiteResult {
  std::string name;
  bool passed = true;
  double max_deviation = 0.0;
  double tolerance = 0.0;
  std::string failure;  // worst failing case, empty when passed
};

struct VerifyOptions {
  int trials = 200;
  std::uint64_t seed = 7;
  // Basis used by the decomposition in the oracle-equivalence suite; null
  // means PauliBasis::standard(). Lets tests inject a broken basis.
  const PauliBasis* basis = nullptr;
};

SuiteResult verify_spherical_average();
SuiteResult verify_phi_closed_form(std::uint64_t seed);
SuiteResult verify_oracle_equivalence(const VerifyOptions& options);
SuiteResult verify_symmetrized_state(const VerifyOptions& options);
SuiteResult verify_error_law(const VerifyOptions& options);
SuiteResult verify_rotation_covariance(const VerifyOptions& options);
SuiteResult verify_m2_witness();
SuiteResult verify_m_independence(const VerifyOptions& options);
SuiteResult verify_conclusive_probability(const VerifyOptions& options);
SuiteResult verify_m2_bound_oracle();
SuiteResult verify_m2_bound_random(const VerifyOptions& options);
SuiteResult verify_m2_saturation();
SuiteResult verify_key_rate_reduction();

std::vector<SuiteResult> run_verify(const VerifyOptions& options);

/// Random channel used for trial i: random_channel(seed + i, 1 + i % 4).
KrausChannel verify_channel(std::uint64_t seed, int trial);

/// Bit error rate where 1 - 2 H2(e) crosses zero (BB84 point), by bisection.
double bb84_threshold();

}  // namespace qkdrot
