#include "verify.hpp"

#include <cmath>
#include <sstream>

#include "analysis.hpp"
#include "edp.hpp"
#include "rng.hpp"

namespace qkdrot {

namespace {

constexpr int kMultiBases[] = {3, 4, 5, 8};
const double kThetas[] = {0.3, kPi / 4, 1.2, kPi / 2};

class Tracker {
 public:
  Tracker(std::string name, double tolerance) {
    result_.name = std::move(name);
    result_.tolerance = tolerance;
  }

  // Records one comparison; `describe` runs only for a new worst failure.
  template <class Describe>
  void observe(double deviation, Describe&& describe) {
    const bool bad = !(deviation <= result_.tolerance);
    if (bad) result_.passed = false;
    if (std::isnan(deviation) || deviation > result_.max_deviation) {
      result_.max_deviation = deviation;
      if (bad) result_.failure = describe();
    }
  }

  void fail_with(std::string what) {
    result_.passed = false;
    if (result_.failure.empty()) result_.failure = std::move(what);
  }

  SuiteResult take() { return std::move(result_); }

 private:
  SuiteResult result_;
};

std::string describe_case(const char* channel, int m, double theta) {
  std::ostringstream os;
  os.precision(17);
  os << "channel=" << channel << " M=" << m << " theta=" << theta;
  return os.str();
}

std::string describe_case(const KrausChannel& ch, int m, double theta) {
  return describe_case(ch.label().c_str(), m, theta);
}

double bell_max_diff(const BellDiagnostics& a, const BellDiagnostics& b) {
  return std::max({std::abs(a.p_i - b.p_i), std::abs(a.p_x - b.p_x), std::abs(a.p_y - b.p_y),
                   std::abs(a.p_z - b.p_z)});
}

// Deterministic angles in [-pi, pi) for rotation checks.
double random_angle(std::uint64_t seed, std::uint64_t index) {
  StreamRng rng(seed ^ 0xa5a5a5a5ULL, index);
  return (2.0 * rng.uniform() - 1.0) * kPi;
}

template <class Body>
void for_each_trial(const VerifyOptions& options, Body&& body) {
  for (int t = 0; t < options.trials; ++t) body(verify_channel(options.seed, t), t);
}

}  // namespace

KrausChannel verify_channel(std::uint64_t seed, int trial) {
  return random_channel(seed + static_cast<std::uint64_t>(trial), 1 + trial % 4);
}

SuiteResult verify_spherical_average() {
  Tracker tr("spherical_average_lemma", 1e-12);
  for (int m = 2; m <= 12; ++m) {
    const SphericalAverageReport r = spherical_average_lemma_check(m);
    tr.observe(r.rotation_sum_max_abs,
               [&] { return "M=" + std::to_string(m) + " rotation sum does not vanish"; });
    if (m >= 3) {
      tr.observe(r.average_deviation(),
                 [&] { return "M=" + std::to_string(m) + " averages differ from (1/2, 1/2, 0)"; });
    }
  }
  return tr.take();
}

SuiteResult verify_phi_closed_form(std::uint64_t seed) {
  Tracker tr("phi_closed_form_and_commutation", 1e-12);
  std::uint64_t draw = 0;
  for (int m : {2, 3, 4, 5, 8}) {
    for (double theta : kThetas) {
      const ProtocolParams params = ProtocolParams::make(m, theta);
      const Matrix phi = phi_operator(params);
      tr.observe(max_abs_diff(phi, phi_closed_form(params)),
                 [&] { return describe_case("-", m, theta) + " closed form"; });
      if (m == 2) continue;
      for (int i = 0; i < 10; ++i) {
        const double beta = random_angle(seed, draw++);
        const Matrix rot = tensor_product(Matrix::identity(2), rotation(beta));
        tr.observe(max_abs_diff(phi * rot, rot * phi), [&] {
          return describe_case("-", m, theta) + " beta=" + std::to_string(beta) +
                 " commutator";
        });
      }
    }
  }
  return tr.take();
}

SuiteResult verify_oracle_equivalence(const VerifyOptions& options) {
  Tracker tr("oracle_equivalence", 1e-9);
  const PauliBasis& basis = options.basis ? *options.basis : PauliBasis::standard();
  for_each_trial(options, [&](const KrausChannel& ch, int) {
    const PauliCoefficients coeffs = decompose(ch, basis);
    for (int m : {2, 3, 4, 5, 8}) {
      for (double theta : kThetas) {
        const ProtocolParams params = ProtocolParams::make(m, theta);
        const BellDiagnostics numeric = bell_diagnostics_numerical(rho_ab_numerical(params, ch));
        const BellDiagnostics closed = bell_diagnostics_closed_form(params, coeffs);
        tr.observe(bell_max_diff(numeric, closed), [&] { return describe_case(ch, m, theta); });
      }
    }
  });
  return tr.take();
}

SuiteResult verify_symmetrized_state(const VerifyOptions& options) {
  Tracker tr("symmetrized_rho_matches_sum", 1e-10);
  for_each_trial(options, [&](const KrausChannel& ch, int) {
    for (int m : {2, 3, 4, 5, 8}) {
      for (double theta : kThetas) {
        const ProtocolParams params = ProtocolParams::make(m, theta);
        const BipartiteState a = rho_ab_numerical(params, ch);
        const BipartiteState b = rho_ab_symmetrized(params, ch);
        const double dev = std::max(max_abs_diff(a.matrix, b.matrix),
                                    std::abs(a.norm_constant - b.norm_constant));
        tr.observe(dev, [&] { return describe_case(ch, m, theta); });
      }
    }
  });
  return tr.take();
}

SuiteResult verify_error_law(const VerifyOptions& options) {
  Tracker tr("error_law_e_p_equals_slope_e_b", 1e-9);
  for_each_trial(options, [&](const KrausChannel& ch, int) {
    for (int m : kMultiBases) {
      for (double theta : kThetas) {
        const ProtocolParams params = ProtocolParams::make(m, theta);
        const BellDiagnostics d = bell_diagnostics_numerical(rho_ab_numerical(params, ch));
        if (d.e_b <= 1e-12) continue;
        const double slope = error_relation(params).slope;
        tr.observe(std::abs(d.e_p - slope * d.e_b), [&] { return describe_case(ch, m, theta); });
      }
    }
  });
  return tr.take();
}

SuiteResult verify_rotation_covariance(const VerifyOptions& options) {
  Tracker tr("rotation_covariance", 1e-10);
  for_each_trial(options, [&](const KrausChannel& ch, int t) {
    const double beta = random_angle(options.seed, 1000000u + static_cast<std::uint64_t>(t));
    const KrausChannel rotated = conjugate_by_rotation(ch, beta);
    for (int m : kMultiBases) {
      for (double theta : kThetas) {
        const ProtocolParams params = ProtocolParams::make(m, theta);
        const double dev = max_abs_diff(rho_ab_numerical(params, ch).matrix,
                                        rho_ab_numerical(params, rotated).matrix);
        tr.observe(dev, [&] {
          return describe_case(ch, m, theta) + " beta=" + std::to_string(beta);
        });
      }
    }
  });
  return tr.take();
}

SuiteResult verify_m2_witness() {
  // M = 2 is not rotation invariant: a sigma_x Pauli channel at beta = pi/8
  // must move rho_AB by more than the threshold.
  SuiteResult r;
  r.name = "m2_rotation_witness";
  r.tolerance = 1e-3;
  const KrausChannel ch = pauli_channel(0.0, 1.0, 0.0, 0.0);
  const ProtocolParams params = ProtocolParams::make(2, kPi / 4);
  r.max_deviation = max_abs_diff(rho_ab_numerical(params, ch).matrix,
                                 rho_ab_numerical(params, conjugate_by_rotation(ch, kPi / 8)).matrix);
  r.passed = r.max_deviation > r.tolerance;
  if (!r.passed) r.failure = "sigma_x channel, M=2, theta=pi/4, beta=pi/8: change below threshold";
  return r;
}

SuiteResult verify_m_independence(const VerifyOptions& options) {
  Tracker tr("m_independence", 1e-10);
  for_each_trial(options, [&](const KrausChannel& ch, int) {
    for (double theta : kThetas) {
      const Matrix ref = rho_ab_numerical(ProtocolParams::make(3, theta), ch).matrix;
      for (int m : {5, 8}) {
        const Matrix other = rho_ab_numerical(ProtocolParams::make(m, theta), ch).matrix;
        tr.observe(max_abs_diff(ref, other), [&] { return describe_case(ch, m, theta) + " vs M=3"; });
      }
    }
  });
  return tr.take();
}

SuiteResult verify_conclusive_probability(const VerifyOptions& options) {
  Tracker tr("conclusive_probability_enumeration", 1e-12);
  for_each_trial(options, [&](const KrausChannel& ch, int) {
    for (int m : {2, 3, 4, 5, 8}) {
      for (double theta : kThetas) {
        const ProtocolParams params = ProtocolParams::make(m, theta);
        const OutcomeDistribution dist = outcome_distribution(params, ch);
        const BellDiagnostics d = bell_diagnostics_numerical(rho_ab_numerical(params, ch));
        const double dev = std::max(std::abs(dist.p_conclusive - d.p_con),
                                    std::abs(dist.p_conclusive_error - d.e_b * d.p_con));
        tr.observe(dev, [&] { return describe_case(ch, m, theta); });
      }
    }
  });
  return tr.take();
}

SuiteResult verify_m2_bound_oracle() {
  Tracker tr("m2_bound_vs_grid_oracle", 2e-3);
  for (double theta : {0.4, kPi / 4, 1.0, 1.3}) {
    const double c2 = std::pow(std::cos(theta), 2);
    const double a = c2 / (1.0 + c2);
    for (double e_b : {0.01, 0.05, 0.1, a / 2, 0.9 * a}) {
      const double analytic = m2_bound(theta, e_b).e_p_max;
      const double oracle = m2_bound_oracle(theta, e_b, 1e-3);
      tr.observe(std::abs(analytic - oracle), [&] {
        return "theta=" + std::to_string(theta) + " e_b=" + std::to_string(e_b);
      });
      if (e_b <= a) {
        // Closed form against the vertex enumeration of the same LP.
        const double lp = m2_bound_vertex_enumeration(theta, e_b).e_p_max;
        tr.observe(std::abs(analytic - lp), [&] {
          return "vertex enumeration theta=" + std::to_string(theta) + " e_b=" + std::to_string(e_b);
        });
      }
    }
  }
  return tr.take();
}

SuiteResult verify_m2_bound_random(const VerifyOptions& options) {
  Tracker tr("m2_bound_never_exceeded", 1e-9);
  for_each_trial(options, [&](const KrausChannel& ch, int) {
    for (double theta : {0.3, kPi / 4, 1.2}) {
      const ProtocolParams params = ProtocolParams::make(2, theta);
      const BellDiagnostics d = bell_diagnostics_numerical(rho_ab_numerical(params, ch));
      const double excess = d.e_p - error_relation(params).slope * d.e_b;
      tr.observe(std::max(0.0, excess), [&] { return describe_case(ch, 2, theta); });
    }
  });
  return tr.take();
}

SuiteResult verify_m2_saturation() {
  Tracker tr("m2_bound_saturated_by_sigma_z", 1e-9);
  for (double p : {0.01, 0.05, 0.1, 0.3}) {
    const KrausChannel ch = pauli_channel(1.0 - p, 0.0, 0.0, p);
    for (double theta : {0.3, kPi / 4, 1.0, 1.2}) {
      const ProtocolParams params = ProtocolParams::make(2, theta);
      const BellDiagnostics d = bell_diagnostics_closed_form(params, decompose(ch));
      tr.observe(std::abs(d.e_p / d.e_b - error_relation(params).slope),
                 [&] { return describe_case(ch, 2, theta); });
    }
  }
  return tr.take();
}

double bb84_threshold() {
  double lo = 1e-6;
  double hi = 0.5;
  for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (1.0 - 2.0 * entropy_h2(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

SuiteResult verify_key_rate_reduction() {
  Tracker tr("h4_reduces_to_shor_preskill", 1e-12);
  for (int m : {3, 4, 8}) {
    for (double theta : kThetas) {
      const ProtocolParams params = ProtocolParams::make(m, theta);
      const double slope = error_relation(params).slope;
      for (double e_b = 0.0; e_b < 0.45 / slope; e_b += 0.01) {
        const double e_p = slope * e_b;
        const double dev =
            std::abs(h4_bracket(e_b, e_p, e_b * e_p) - shor_preskill_bracket(e_b, e_p));
        tr.observe(dev, [&] { return describe_case("-", m, theta) + " e_b=" + std::to_string(e_b); });
      }
    }
  }
  SuiteResult r = tr.take();
  const double threshold = bb84_threshold();
  const double gap = std::abs(threshold - 0.110028);
  if (gap > 1e-5) {
    r.passed = false;
    r.failure = "BB84 threshold " + std::to_string(threshold) + " not within 1e-5 of 0.110028";
  }
  return r;
}

std::vector<SuiteResult> run_verify(const VerifyOptions& options) {
  std::vector<SuiteResult> out;
  out.push_back(verify_spherical_average());
  out.push_back(verify_phi_closed_form(options.seed));
  out.push_back(verify_oracle_equivalence(options));
  out.push_back(verify_symmetrized_state(options));
  out.push_back(verify_error_law(options));
  out.push_back(verify_rotation_covariance(options));
  out.push_back(verify_m2_witness());
  out.push_back(verify_m_independence(options));
  out.push_back(verify_conclusive_probability(options));
  out.push_back(verify_m2_bound_oracle());
  out.push_back(verify_m2_bound_random(options));
  out.push_back(verify_m2_saturation());
  out.push_back(verify_key_rate_reduction());
  return out;
}

}  // namespace qkdrot
