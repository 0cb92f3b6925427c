#pragma once

// Monte Carlo run of the prepare-and-measure protocol.
//
// Each signal i draws from its own stream StreamRng(seed, i), always
// consuming the same number of draws, so a run is bit-identical for a given
// seed no matter how many worker threads process it.

#include <cstdint>

#include "channel.hpp"
#include "protocol.hpp"

namespace qkdrot {

struct SimulationConfig {
  std::uint64_t n = 0;
  std::uint64_t seed = 0;
  double test_fraction = 0.0;
  ProtocolParams params;
  KrausChannel channel = identity_channel();
  unsigned threads = 0;  // 0: hardware concurrency

  void validate() const;
};

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

struct TranscriptStats {
  std::uint64_t n_total = 0;
  std::uint64_t n_basis_matched = 0;
  std::uint64_t n_conclusive = 0;
  std::uint64_t n_conclusive_errors = 0;
  std::uint64_t n_test = 0;
  std::uint64_t n_test_errors = 0;
  std::uint64_t key_bits_remaining = 0;
  // Over the test bits when test_fraction > 0, else over every sifted bit.
  Estimate e_b_hat;
  // Conclusive fraction of basis-matched signals.
  Estimate p_con_hat;
  bool test_sample_warning = false;  // n * t < 1 with t > 0: no test bits
};

TranscriptStats run(const SimulationConfig& config);

struct SimulationComparison {
  TranscriptStats stats;
  double e_b_analytic = 0.0;
  double p_con_analytic = 0.0;
  double z_e_b = 0.0;
  double z_p_con = 0.0;
  double z_sifting = 0.0;  // n_basis_matched / n against 1/M
};

/// Runs the simulation and scores it against the analytic e_b and p_con
/// (binomial sigma at the analytic value).
SimulationComparison estimate_vs_analytic(const SimulationConfig& config);

/// (estimate - expected) / sqrt(expected (1 - expected) / trials); 0 when
/// both the deviation and sigma vanish.
double binomial_z_score(double estimate, double expected, std::uint64_t trials);

}  // namespace qkdrot
