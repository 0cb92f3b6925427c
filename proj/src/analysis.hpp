#pragma once

// Bit/phase error relations, the M = 2 phase-error bound and key rates.

#include <array>

#include "protocol.hpp"

namespace qkdrot {

enum class RelationKind { equality, upper_bound };

/// e_p = slope * e_b (M > 2) or e_p <= slope * e_b (M = 2).
struct ErrorRelation {
  int num_bases = 0;
  double theta = 0.0;
  double slope = 0.0;
  RelationKind kind = RelationKind::equality;
};

/// slope = 1 + cos^2 theta for M > 2, (1 + cos^2 theta) / cos^2 theta for M = 2.
/// Refuses M = 2 with theta = pi/2.
ErrorRelation error_relation(const ProtocolParams& params);

/// Largest phase error rate consistent with bit error rate e_b at M = 2.
struct M2BoundSolution {
  double e_p_max = 0.0;
  double maximizer_ai2 = 0.0;  // |a_i|^2
  double maximizer_ax2 = 0.0;  // |a_x|^2
  double a = 0.0;              // B cos^2 theta
  double b = 0.0;              // 1 / (1 + cos^2 theta)
  bool feasible = false;
};

/// Closed-form maximizer for e_b <= A; exact vertex enumeration of the
/// reduced two-variable LP above A. Requires 0 < theta < pi/2.
M2BoundSolution m2_bound(double theta, double e_b);

/// The reduced LP over (|a_i|^2, |a_x|^2) solved by enumerating the vertices
/// of the feasible polygon. Exposed for cross-checking the closed form.
M2BoundSolution m2_bound_vertex_enumeration(double theta, double e_b);

/// Brute force: grid over (|a_y|^2, |a_z|^2) with step `grid_step`, solving the
/// two equality constraints for the remaining weights and keeping nonnegative
/// points. Test oracle only.
double m2_bound_oracle(double theta, double e_b, double grid_step);

/// Binary Shannon entropy in bits, 0 log 0 = 0.
double entropy_h2(double p);
double entropy_h4(const std::array<double, 4>& x);

enum class LambdaMode { admissible_range, pessimistic };

struct LambdaRange {
  double min = 0.0;
  double max = 0.0;
  double worst = 0.0;
};

/// Worst-case lambda = p_y. For M > 2 in admissible_range mode the range is
/// [e_b cos^2 theta, e_b]; otherwise [0, e_b] with worst case e_b e_p.
LambdaRange lambda_worst_case(const ProtocolParams& params, LambdaMode mode, double e_b,
                              double e_p);

double shor_preskill_bracket(double e_b, double e_p);
double h4_bracket(double e_b, double e_p, double lambda);

struct KeyRateReport {
  double e_b = 0.0;
  double e_p = 0.0;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double lambda_worst = 0.0;
  double bracket_shor_preskill = 0.0;
  double bracket_h4 = 0.0;
  double rate_shor_preskill = 0.0;
  double rate_h4 = 0.0;
  double p_con = 0.0;
  double sift_factor = 0.0;
  bool abort_recommended = false;
};

/// Rates are reported unclamped; a non-positive worst-case rate sets
/// abort_recommended.
KeyRateReport key_rate(const ProtocolParams& params, LambdaMode mode, double e_b, double p_con);

/// Phase error rate inferred from e_b through error_relation (M > 2) or the
/// M = 2 bound.
double inferred_phase_error(const ProtocolParams& params, double e_b);

}  // namespace qkdrot
