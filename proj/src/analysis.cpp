#include "analysis.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "errors.hpp"

namespace qkdrot {

namespace {

constexpr double kRateTol = 1e-12;

std::string str(double v) { return std::to_string(v); }

void require_rate(double v, const char* name) {
  if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
    fail(ErrorCode::invalid_argument, std::string(name) + " must lie in [0, 1], got " + str(v));
  }
}

void require_open_theta(double theta) {
  if (!std::isfinite(theta) || theta <= 0.0) {
    fail(ErrorCode::invalid_argument, "theta must be positive, got " + str(theta));
  }
  if (theta >= kPi / 2 - 1e-12) {
    fail(ErrorCode::degenerate,
         "theta = pi/2 with M = 2: cos^2 theta = 0, the phase error rate is unbounded");
  }
}

void refuse_degenerate(const ProtocolParams& params) {
  if (params.degenerate()) {
    fail(ErrorCode::degenerate,
         "M = 2 with theta = pi/2 is degenerate: both bases contain the same two orthogonal "
         "states, so the phase error rate is unbounded and no key can be distilled");
  }
}

double xlog2x(double x) { return x <= 0.0 ? 0.0 : x * std::log2(x); }

double clamp_unit(double x, const char* name) {
  if (!std::isfinite(x) || x < -kRateTol || x > 1.0 + kRateTol) {
    fail(ErrorCode::invalid_argument, std::string(name) + " must lie in [0, 1], got " + str(x));
  }
  return std::min(1.0, std::max(0.0, x));
}

// Half-plane c + alpha u + beta v >= 0 in the (|a_i|^2, |a_x|^2) plane.
struct HalfPlane {
  double c, alpha, beta;
  double eval(double u, double v) const { return c + alpha * u + beta * v; }
};

}  // namespace

ErrorRelation error_relation(const ProtocolParams& params) {
  params.validate();
  refuse_degenerate(params);
  const double c2 = std::pow(std::cos(params.theta), 2);
  if (params.num_bases > 2) {
    return {params.num_bases, params.theta, 1.0 + c2, RelationKind::equality};
  }
  return {params.num_bases, params.theta, (1.0 + c2) / c2, RelationKind::upper_bound};
}

M2BoundSolution m2_bound_vertex_enumeration(double theta, double e_b) {
  require_open_theta(theta);
  require_rate(e_b, "e_b");
  const double s2 = std::pow(std::sin(theta), 2);
  const double c2 = std::pow(std::cos(theta), 2);
  M2BoundSolution sol;
  sol.b = 1.0 / (1.0 + c2);
  sol.a = sol.b * c2;
  const double a = sol.a;
  const double b = sol.b;
  // |a_y|^2 >= 0, |a_z|^2 >= 0 after eliminating them, then |a_i|^2, |a_x|^2 >= 0.
  const HalfPlane planes[] = {
      {(e_b - a) / s2, a, -b},
      {(b - e_b) / s2, -b, a},
      {0.0, 1.0, 0.0},
      {0.0, 0.0, 1.0},
  };
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = i + 1; j < 4; ++j) {
      const HalfPlane& p = planes[i];
      const HalfPlane& q = planes[j];
      const double det = p.alpha * q.beta - p.beta * q.alpha;
      if (std::abs(det) < 1e-15) continue;
      const double u = (-p.c * q.beta + q.c * p.beta) / det;
      const double v = (-p.alpha * q.c + q.alpha * p.c) / det;
      bool feasible = true;
      for (const HalfPlane& h : planes) feasible = feasible && h.eval(u, v) >= -1e-12;
      if (!feasible) continue;
      if (u + v < best) {
        best = u + v;
        sol.maximizer_ai2 = std::max(0.0, u);
        sol.maximizer_ax2 = std::max(0.0, v);
        sol.feasible = true;
      }
    }
  }
  if (sol.feasible) {
    sol.e_p_max = std::min(1.0, std::max(0.0, 1.0 - best * s2));
  }
  return sol;
}

M2BoundSolution m2_bound(double theta, double e_b) {
  require_open_theta(theta);
  require_rate(e_b, "e_b");
  const double c2 = std::pow(std::cos(theta), 2);
  const double s2 = std::pow(std::sin(theta), 2);
  M2BoundSolution sol;
  sol.b = 1.0 / (1.0 + c2);
  sol.a = sol.b * c2;
  if (e_b > sol.a) return m2_bound_vertex_enumeration(theta, e_b);
  sol.feasible = true;
  sol.e_p_max = std::min(1.0, e_b * (1.0 + c2) / c2);
  sol.maximizer_ai2 = (sol.a - e_b) / (sol.a * s2);
  sol.maximizer_ax2 = 0.0;
  return sol;
}

double m2_bound_oracle(double theta, double e_b, double grid_step) {
  if (!(grid_step > 0.0 && grid_step <= 0.01)) {
    fail(ErrorCode::invalid_argument, "grid_step must lie in (0, 0.01], got " + str(grid_step));
  }
  require_rate(e_b, "e_b");
  if (!std::isfinite(theta) || theta <= 0.0 || theta >= kPi / 2) {
    fail(ErrorCode::invalid_argument, "theta must lie in (0, pi/2), got " + str(theta));
  }
  const double c2 = std::pow(std::cos(theta), 2);
  // Normalization forces (|a_y|^2 + |a_z|^2)(1 + cos^2) <= 1.
  const double limit = 1.0 / (1.0 + c2);
  const auto steps = static_cast<long>(std::floor(limit / grid_step + 1e-9));
  double best = -1.0;
  for (long iy = 0; iy <= steps; ++iy) {
    const double ay = iy * grid_step;
    for (long iz = 0; iz <= steps; ++iz) {
      const double az = iz * grid_step;
      const double weight_yz = (ay + az) * (1.0 + c2);
      if (weight_yz > 1.0 + 1e-12) break;
      // Bit error constraint gives |a_x|^2 sin^2; normalization gives |a_i|^2 sin^2.
      const double ax_s2 = e_b - ay - c2 * az;
      const double ai_s2 = 1.0 - weight_yz - ax_s2;
      if (ax_s2 < -1e-12 || ai_s2 < -1e-12) continue;
      best = std::max(best, weight_yz);
    }
  }
  return best < 0.0 ? std::numeric_limits<double>::quiet_NaN() : best;
}

double entropy_h2(double p) {
  p = clamp_unit(p, "H2 argument");
  return -xlog2x(p) - xlog2x(1.0 - p);
}

double entropy_h4(const std::array<double, 4>& x) {
  double sum = 0.0;
  double h = 0.0;
  for (double xi : x) {
    xi = clamp_unit(xi, "H4 argument");
    sum += xi;
    h -= xlog2x(xi);
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    fail(ErrorCode::invalid_argument, "H4 arguments must sum to 1, got " + str(sum));
  }
  return h;
}

LambdaRange lambda_worst_case(const ProtocolParams& params, LambdaMode mode, double e_b,
                              double e_p) {
  params.validate();
  require_rate(e_b, "e_b");
  require_rate(e_p, "e_p");
  LambdaRange r;
  if (params.num_bases > 2 && mode == LambdaMode::admissible_range) {
    const double c2 = std::pow(std::cos(params.theta), 2);
    r.min = e_b * c2;
    r.max = e_b;
    r.worst = e_b < c2 / (1.0 + c2) ? e_b * c2 : e_b * e_p;
  } else {
    r.min = 0.0;
    r.max = e_b;
    r.worst = e_b * e_p;
  }
  const double lam = r.worst;
  if (lam < r.min - kRateTol || lam > r.max + kRateTol || e_b - lam < -kRateTol ||
      e_p - lam < -kRateTol || 1.0 - e_b - e_p + lam < -kRateTol) {
    fail(ErrorCode::consistency, "lambda = " + str(lam) + " is inconsistent with e_b = " +
                                     str(e_b) + ", e_p = " + str(e_p));
  }
  return r;
}

double shor_preskill_bracket(double e_b, double e_p) {
  return 1.0 - entropy_h2(e_b) - entropy_h2(e_p);
}

double h4_bracket(double e_b, double e_p, double lambda) {
  return 1.0 - entropy_h4({1.0 - e_b - e_p + lambda, e_b - lambda, lambda, e_p - lambda});
}

double inferred_phase_error(const ProtocolParams& params, double e_b) {
  const ErrorRelation rel = error_relation(params);
  require_rate(e_b, "e_b");
  if (rel.kind == RelationKind::upper_bound) return m2_bound(params.theta, e_b).e_p_max;
  const double e_p = rel.slope * e_b;
  if (e_p > 1.0 + kRateTol) {
    fail(ErrorCode::invalid_argument,
         "e_b = " + str(e_b) + " implies phase error rate " + str(e_p) +
             " > 1; no channel produces this bit error rate");
  }
  return std::min(1.0, e_p);
}

KeyRateReport key_rate(const ProtocolParams& params, LambdaMode mode, double e_b, double p_con) {
  params.validate();
  refuse_degenerate(params);
  if (!std::isfinite(e_b) || e_b < 0.0 || e_b >= 1.0) {
    fail(ErrorCode::invalid_argument, "e_b must lie in [0, 1), got " + str(e_b));
  }
  if (!std::isfinite(p_con) || p_con <= 0.0 || p_con > 1.0) {
    fail(ErrorCode::invalid_argument, "p_con must lie in (0, 1], got " + str(p_con));
  }
  KeyRateReport r;
  r.e_b = e_b;
  r.e_p = inferred_phase_error(params, e_b);
  const LambdaRange lam = lambda_worst_case(params, mode, e_b, r.e_p);
  r.lambda_min = lam.min;
  r.lambda_max = lam.max;
  r.lambda_worst = lam.worst;
  r.p_con = p_con;
  r.sift_factor = params.sifting == SiftingMode::generic ? p_con / params.num_bases : p_con;
  r.bracket_shor_preskill = shor_preskill_bracket(e_b, r.e_p);
  r.bracket_h4 = h4_bracket(e_b, r.e_p, lam.worst);
  r.rate_shor_preskill = r.sift_factor * r.bracket_shor_preskill;
  r.rate_h4 = r.sift_factor * r.bracket_h4;
  r.abort_recommended = !(r.rate_h4 > 0.0);
  return r;
}

}  // namespace qkdrot
