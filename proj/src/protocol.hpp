#pragma once

// The protocol family: M basis pairs separated by angle theta, rotated
// copies of each other at spacing pi/M. M = 4, theta = pi/2 is the
// symmetrized four-basis BB84 and M = 4, theta = pi/4 is SARG04.
//
// Working representation is the x-basis: |0_x> = e0, |1_x> = e1, and
// |0_z> = (|0_x> + |1_x>)/sqrt2, |1_z> = (|0_x> - |1_x>)/sqrt2.

#include <array>

#include "linalg.hpp"

namespace qkdrot {

class KrausChannel;

enum class SiftingMode { generic, basis_free };

struct ProtocolParams {
  int num_bases = 4;
  double theta = 0.0;
  SiftingMode sifting = SiftingMode::generic;

  /// Validates M >= 2 and 0 < theta <= pi/2.
  static ProtocolParams make(int num_bases, double theta,
                             SiftingMode sifting = SiftingMode::generic);

  void validate() const;

  /// M = 2 with theta = pi/2: both bases hold the same two orthogonal states.
  bool degenerate() const;
};

/// Validates params and 0 <= basis < M.
void require_basis(const ProtocolParams& params, int basis);

inline constexpr double kPi = 3.14159265358979323846;

Matrix ket_0x();
Matrix ket_1x();
Matrix ket_0z();
Matrix ket_1z();

/// R_beta = exp(-i beta sigma_y) = [[cos, -sin], [sin, cos]].
Matrix rotation(double beta);

struct SignalState {
  int basis = 0;
  int bit = 0;
  Matrix ket;
};

/// |phi_{+m}> for bit 0, |phi_{-m}> for bit 1.
SignalState prepare_state(const ProtocolParams& params, int basis, int bit);

struct FilterOperator {
  int basis = 0;
  Matrix matrix;
};

/// F_0 = sin(theta/2)|0_x><0_x| + cos(theta/2)|1_x><1_x|.
Matrix base_filter(double theta);

/// F_l = F_0 R_{-l pi/M}.
FilterOperator filter(const ProtocolParams& params, int basis);

enum class SetupChoice { plus, minus };
enum class Outcome { inconclusive, bit0, bit1 };

/// One of Bob's two projective measurements for basis k. `kets[i]` is the
/// projection ket for outcome i and `outcomes[i]` its interpretation.
struct MeasurementSetup {
  int basis = 0;
  SetupChoice choice = SetupChoice::plus;
  std::array<Matrix, 2> kets;
  std::array<Outcome, 2> outcomes{};

  Matrix projector_sum() const;
};

std::array<MeasurementSetup, 2> measurement_setups(const ProtocolParams& params, int basis);

struct OutcomeDistribution {
  double p_conclusive = 0.0;
  double p_conclusive_error = 0.0;  // joint: conclusive and wrong bit

  double error_rate() const { return p_conclusive > 0.0 ? p_conclusive_error / p_conclusive : 0.0; }
};

/// Exact enumeration over (m, bit, setup, outcome) with Bob in the matched
/// basis and a uniform choice between the two setups.
OutcomeDistribution outcome_distribution(const ProtocolParams& params, const KrausChannel& channel);

double conclusive_probability(const ProtocolParams& params, const KrausChannel& channel);

}  // namespace qkdrot
