#include "mc.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <thread>
#include <vector>

#include "edp.hpp"
#include "errors.hpp"
#include "rng.hpp"

namespace qkdrot {

namespace {

using Ket = std::array<Complex, 2>;
using Op = std::array<Complex, 4>;

constexpr std::uint64_t kChunk = 1u << 15;

Ket to_ket(const Matrix& m) { return {m[0], m[1]}; }
Op to_op(const Matrix& m) { return {m(0, 0), m(0, 1), m(1, 0), m(1, 1)}; }

Ket apply(const Op& e, const Ket& v) {
  return {e[0] * v[0] + e[1] * v[1], e[2] * v[0] + e[3] * v[1]};
}

double norm_sq(const Ket& v) { return std::norm(v[0]) + std::norm(v[1]); }

Complex braket(const Ket& a, const Ket& b) {
  return std::conj(a[0]) * b[0] + std::conj(a[1]) * b[1];
}

// Everything a worker needs, flattened out of Matrix for the hot loop.
struct Tables {
  int num_bases = 0;
  std::vector<std::array<Ket, 2>> signals;      // [basis][bit]
  std::vector<std::array<Ket, 2>> conclusive;   // [basis][setup] conclusive ket
  std::vector<std::array<int, 2>> decoded_bit;  // [basis][setup]
  std::vector<Op> kraus;
};

Tables build_tables(const SimulationConfig& config) {
  Tables t;
  t.num_bases = config.params.num_bases;
  for (int m = 0; m < t.num_bases; ++m) {
    t.signals.push_back({to_ket(prepare_state(config.params, m, 0).ket),
                         to_ket(prepare_state(config.params, m, 1).ket)});
    const auto setups = measurement_setups(config.params, m);
    std::array<Ket, 2> kets{};
    std::array<int, 2> bits{};
    for (std::size_t s = 0; s < 2; ++s) {
      const auto& setup = setups[s];
      const std::size_t idx = setup.outcomes[0] == Outcome::inconclusive ? 1 : 0;
      kets[s] = to_ket(setup.kets[idx]);
      bits[s] = setup.outcomes[idx] == Outcome::bit0 ? 0 : 1;
    }
    t.conclusive.push_back(kets);
    t.decoded_bit.push_back(bits);
  }
  for (const Matrix& e : config.channel.operators()) t.kraus.push_back(to_op(e));
  return t;
}

struct ChunkResult {
  std::uint64_t matched = 0;
  std::uint64_t conclusive = 0;
  std::uint64_t errors = 0;
  std::vector<std::uint8_t> error_flags;  // one per conclusive sifted signal, in order
};

ChunkResult run_chunk(const Tables& t, std::uint64_t seed, std::uint64_t begin,
                      std::uint64_t end) {
  ChunkResult out;
  const auto m = static_cast<std::uint32_t>(t.num_bases);
  std::vector<double> weights(t.kraus.size());
  for (std::uint64_t i = begin; i < end; ++i) {
    StreamRng rng(seed, i);
    // Steps 1-2: basis and bit.
    const std::uint32_t l = rng.below(m);
    const std::uint32_t bit = rng.below(2);
    const Ket& sent = t.signals[l][bit];
    // Step 3: the channel as a generalized measurement; pick outcome j by Born rule.
    const double pick = rng.uniform();
    double total = 0.0;
    for (std::size_t j = 0; j < t.kraus.size(); ++j) {
      weights[j] = norm_sq(apply(t.kraus[j], sent));
      total += weights[j];
    }
    std::size_t chosen = t.kraus.size() - 1;
    double acc = 0.0;
    for (std::size_t j = 0; j < t.kraus.size(); ++j) {
      acc += weights[j];
      if (pick * total < acc) {
        chosen = j;
        break;
      }
    }
    while (weights[chosen] <= 0.0 && chosen > 0) --chosen;
    Ket received = apply(t.kraus[chosen], sent);
    const double scale = 1.0 / std::sqrt(weights[chosen]);
    received[0] *= scale;
    received[1] *= scale;
    // Step 4: Bob's basis, setup and projective outcome.
    const std::uint32_t k = rng.below(m);
    const std::uint32_t setup = rng.below(2);
    const double outcome = rng.uniform();
    // Step 5: sifting.
    if (k != l) continue;
    ++out.matched;
    const double p_conclusive = std::norm(braket(t.conclusive[k][setup], received));
    if (!(outcome < p_conclusive)) continue;
    ++out.conclusive;
    const bool error = t.decoded_bit[k][setup] != static_cast<int>(bit);
    out.errors += error ? 1 : 0;
    out.error_flags.push_back(error ? 1 : 0);
  }
  return out;
}

unsigned worker_count(unsigned requested, std::uint64_t chunks) {
  unsigned n = requested != 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::uint64_t>(n, std::max<std::uint64_t>(1, chunks)));
}

Estimate binomial(std::uint64_t successes, std::uint64_t trials) {
  if (trials == 0) return {};
  const double p = static_cast<double>(successes) / static_cast<double>(trials);
  return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(trials))};
}

}  // namespace

void SimulationConfig::validate() const {
  params.validate();
  if (n < 1) fail(ErrorCode::invalid_argument, "simulation needs n >= 1 signals");
  if (!std::isfinite(test_fraction) || test_fraction < 0.0 || test_fraction >= 1.0) {
    fail(ErrorCode::invalid_argument, "test_fraction must lie in [0, 1)");
  }
  if (channel.completeness_residual() > kCompletenessTol) {
    fail(ErrorCode::invalid_argument, "channel is not trace preserving");
  }
}

TranscriptStats run(const SimulationConfig& config) {
  config.validate();
  const Tables tables = build_tables(config);
  const std::uint64_t num_chunks = (config.n + kChunk - 1) / kChunk;
  std::vector<ChunkResult> results(num_chunks);
  const unsigned workers = worker_count(config.threads, num_chunks);

  auto work = [&](unsigned worker) {
    for (std::uint64_t c = worker; c < num_chunks; c += workers) {
      const std::uint64_t begin = c * kChunk;
      results[c] = run_chunk(tables, config.seed, begin, std::min(config.n, begin + kChunk));
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }

  TranscriptStats s;
  s.n_total = config.n;
  std::vector<std::uint8_t> flags;
  for (const ChunkResult& r : results) {
    s.n_basis_matched += r.matched;
    s.n_conclusive += r.conclusive;
    s.n_conclusive_errors += r.errors;
    flags.insert(flags.end(), r.error_flags.begin(), r.error_flags.end());
  }

  // Steps 6-7: a seeded shuffle picks the test positions.
  if (config.test_fraction > 0.0) {
    if (static_cast<double>(config.n) * config.test_fraction < 1.0) {
      s.test_sample_warning = true;
    } else {
      s.n_test = std::min<std::uint64_t>(
          s.n_conclusive,
          static_cast<std::uint64_t>(std::ceil(config.test_fraction * s.n_conclusive)));
      std::mt19937_64 shuffle(splitmix64(config.seed ^ 0x7e57b175ULL));
      std::vector<std::uint64_t> order(s.n_conclusive);
      for (std::uint64_t i = 0; i < order.size(); ++i) order[i] = i;
      for (std::uint64_t i = 0; i < s.n_test; ++i) {
        std::uniform_int_distribution<std::uint64_t> pick(i, s.n_conclusive - 1);
        std::swap(order[i], order[pick(shuffle)]);
        s.n_test_errors += flags[order[i]];
      }
    }
  }
  s.key_bits_remaining = s.n_conclusive - s.n_test;
  s.e_b_hat = s.n_test > 0 ? binomial(s.n_test_errors, s.n_test)
                           : binomial(s.n_conclusive_errors, s.n_conclusive);
  s.p_con_hat = binomial(s.n_conclusive, s.n_basis_matched);
  return s;
}

double binomial_z_score(double estimate, double expected, std::uint64_t trials) {
  const double deviation = estimate - expected;
  const double sigma =
      trials == 0 ? 0.0 : std::sqrt(expected * (1.0 - expected) / static_cast<double>(trials));
  if (sigma > 0.0) return deviation / sigma;
  if (std::abs(deviation) <= 1e-12) return 0.0;
  return deviation > 0 ? std::numeric_limits<double>::infinity()
                       : -std::numeric_limits<double>::infinity();
}

SimulationComparison estimate_vs_analytic(const SimulationConfig& config) {
  SimulationComparison c;
  c.stats = run(config);
  const BellDiagnostics d = bell_diagnostics_numerical(rho_ab_numerical(config.params, config.channel));
  c.e_b_analytic = d.e_b;
  c.p_con_analytic = d.p_con;
  const std::uint64_t eb_trials = c.stats.n_test > 0 ? c.stats.n_test : c.stats.n_conclusive;
  c.z_e_b = binomial_z_score(c.stats.e_b_hat.value, c.e_b_analytic, eb_trials);
  c.z_p_con = binomial_z_score(c.stats.p_con_hat.value, c.p_con_analytic, c.stats.n_basis_matched);
  c.z_sifting = binomial_z_score(
      static_cast<double>(c.stats.n_basis_matched) / static_cast<double>(c.stats.n_total),
      1.0 / config.params.num_bases, c.stats.n_total);
  return c;
}

}  // namespace qkdrot
