#pragma once

// Entanglement-distillation picture of the protocol.
//
// Alice's preparation in basis l is the bipartite ket
//   |psi_l> = (I (x) R_{l pi/M}) |psi_0>,
//   |psi_0> = (|0_z>_A |phi_{+0}>_B + |1_z>_A |phi_{-0}>_B) / sqrt2,
// followed by a z measurement on A. Keeping only matched bases, Bob's
// operation is the filter F_0 R_{-l pi/M}, which gives
//   rho_AB ~ (1/M) sum_j sum_l P[(I (x) F_0 R_{-l pi/M} E_j R_{l pi/M}) |psi_0>].
//
// The numerical route builds rho_AB from that sum; the closed-form route
// uses only the Pauli weights sum_j |a_r^j|^2. They are independent and are
// checked against each other.

#include <array>

#include "channel.hpp"
#include "linalg.hpp"
#include "protocol.hpp"

namespace qkdrot {

enum class StateSource { numerical, closed_form };

struct BipartiteState {
  Matrix matrix = Matrix::zeros(4, 4);  // unit trace
  double norm_constant = 0.0;           // trace before normalization
  ProtocolParams params;
  StateSource source = StateSource::numerical;
};

struct BellDiagnostics {
  double p_i = 0.0;
  double p_x = 0.0;
  double p_y = 0.0;
  double p_z = 0.0;
  double e_b = 0.0;
  double e_p = 0.0;
  // N' (M > 2) or N'' (M = 2).
  double n_prime = 0.0;
  double p_con = 0.0;
  bool degenerate_parameters = false;
};

/// Traces below this are treated as "the channel removed every signal".
inline constexpr double kDegenerateTrace = 1e-14;

/// 4-d ket |psi_l>, built as (I (x) R_{l pi/M}) |psi_0>.
Matrix psi_l(const ProtocolParams& params, int basis);

/// Same ket from the expanded form (|0_z>|phi_l> + |1_z>|phi_{-l}>)/sqrt2.
Matrix psi_l_expanded(const ProtocolParams& params, int basis);

BipartiteState rho_ab_numerical(const ProtocolParams& params, const KrausChannel& channel);

/// rho_AB from the split E_j = U_j + V_j:
///   F_0 sum_j [U_j |psi_0><psi_0| U_j^dag + V_j Phi V_j^dag] F_0^dag
/// (operators on B), using phi_closed_form. Same normalization as the
/// numerical route.
BipartiteState rho_ab_symmetrized(const ProtocolParams& params, const KrausChannel& channel);

/// (1/M) sum_l (I (x) R_{2l pi/M}) |psi_0><psi_0| (I (x) R_{-2l pi/M}).
Matrix phi_operator(const ProtocolParams& params);

/// For M > 2: (1/4)(I (x) I + |0_z><1_z| (x) R_theta + |1_z><0_z| (x) R_{-theta}).
/// For M = 2: |psi_0><psi_0|.
Matrix phi_closed_form(const ProtocolParams& params);

struct BellBasis {
  Matrix phi_plus;   // (|00> + |11>)_z / sqrt2
  Matrix psi_plus;   // (|01> + |10>)_z / sqrt2
  Matrix psi_minus;  // (|01> - |10>)_z / sqrt2
  Matrix phi_minus;  // (|00> - |11>)_z / sqrt2

  static const BellBasis& get();
};

BellDiagnostics bell_diagnostics_numerical(const BipartiteState& state);

/// Closed forms from the Pauli weights; separate code paths for M > 2 and M = 2.
BellDiagnostics bell_diagnostics_closed_form(const ProtocolParams& params,
                                             const PauliCoefficients& coeffs);

/// Checks Hermiticity, unit trace and non-negative Bell projections.
bool is_valid_state(const BipartiteState& state, double tol = kAlgebraTol);

struct SphericalAverageReport {
  int num_bases = 0;
  double mean_cos_sq = 0.0;
  double mean_sin_sq = 0.0;
  double mean_cos_sin = 0.0;
  double rotation_sum_max_abs = 0.0;  // max |sum_l R_{2l pi/M}|

  // Largest deviation of the three averages from (1/2, 1/2, 0).
  double average_deviation() const;
};

SphericalAverageReport spherical_average_lemma_check(int num_bases);

}  // namespace qkdrot
