#include "protocol.hpp"

#include <cmath>
#include <string>

#include "channel.hpp"
#include "errors.hpp"

namespace qkdrot {

void require_basis(const ProtocolParams& params, int basis) {
  params.validate();
  if (basis < 0 || basis >= params.num_bases) {
    fail(ErrorCode::invalid_argument, "basis index " + std::to_string(basis) +
                                          " out of range [0, " +
                                          std::to_string(params.num_bases) + ")");
  }
}

ProtocolParams ProtocolParams::make(int num_bases, double theta, SiftingMode sifting) {
  ProtocolParams p{num_bases, theta, sifting};
  p.validate();
  return p;
}

void ProtocolParams::validate() const {
  if (num_bases < 2) {
    fail(ErrorCode::invalid_argument, "M must be >= 2, got " + std::to_string(num_bases));
  }
  // Small slack so that pi/2 computed in different ways is accepted.
  if (!std::isfinite(theta) || theta <= 0.0 || theta > kPi / 2 + 1e-12) {
    fail(ErrorCode::invalid_argument,
         "theta must satisfy 0 < theta <= pi/2 (radians), got " + std::to_string(theta));
  }
}

bool ProtocolParams::degenerate() const {
  return num_bases == 2 && std::abs(theta - kPi / 2) <= 1e-12;
}

Matrix ket_0x() { return Matrix::ket({1.0, 0.0}); }
Matrix ket_1x() { return Matrix::ket({0.0, 1.0}); }
Matrix ket_0z() { return Matrix::ket({M_SQRT1_2, M_SQRT1_2}); }
Matrix ket_1z() { return Matrix::ket({M_SQRT1_2, -M_SQRT1_2}); }

Matrix rotation(double beta) {
  const double c = std::cos(beta);
  const double s = std::sin(beta);
  return Matrix(2, 2, {c, -s, s, c});
}

SignalState prepare_state(const ProtocolParams& params, int basis, int bit) {
  require_basis(params, basis);
  if (bit != 0 && bit != 1) fail(ErrorCode::invalid_argument, "bit must be 0 or 1");
  const double sign = bit == 0 ? 1.0 : -1.0;
  const Matrix base =
      Matrix::ket({std::cos(params.theta / 2), sign * std::sin(params.theta / 2)});
  return {basis, bit, rotation(basis * kPi / params.num_bases) * base};
}

Matrix base_filter(double theta) {
  return Matrix(2, 2, {std::sin(theta / 2), 0.0, 0.0, std::cos(theta / 2)});
}

FilterOperator filter(const ProtocolParams& params, int basis) {
  require_basis(params, basis);
  return {basis, base_filter(params.theta) * rotation(-basis * kPi / params.num_bases)};
}

Matrix MeasurementSetup::projector_sum() const {
  return projector(kets[0]) + projector(kets[1]);
}

std::array<MeasurementSetup, 2> measurement_setups(const ProtocolParams& params, int basis) {
  require_basis(params, basis);
  const Matrix quarter_turn = rotation(kPi / 2);
  const Matrix plus = prepare_state(params, basis, 0).ket;
  const Matrix minus = prepare_state(params, basis, 1).ket;
  // Outcome R_{pi/2}|phi_k> rules out |phi_k>, so the state was |phi_{-k}> (bit 1),
  // and symmetrically for the minus setup.
  MeasurementSetup plus_setup{basis,
                              SetupChoice::plus,
                              {plus, quarter_turn * plus},
                              {Outcome::inconclusive, Outcome::bit1}};
  MeasurementSetup minus_setup{basis,
                               SetupChoice::minus,
                               {minus, quarter_turn * minus},
                               {Outcome::inconclusive, Outcome::bit0}};
  return {plus_setup, minus_setup};
}

OutcomeDistribution outcome_distribution(const ProtocolParams& params,
                                         const KrausChannel& channel) {
  params.validate();
  OutcomeDistribution dist;
  const double weight = 1.0 / (2.0 * params.num_bases) * 0.5;  // (m, bit) then setup
  for (int m = 0; m < params.num_bases; ++m) {
    const auto setups = measurement_setups(params, m);
    for (int bit = 0; bit < 2; ++bit) {
      const Matrix sent = prepare_state(params, m, bit).ket;
      for (const Matrix& op : channel.operators()) {
        const Matrix received = op * sent;
        for (const auto& setup : setups) {
          for (std::size_t o = 0; o < 2; ++o) {
            if (setup.outcomes[o] == Outcome::inconclusive) continue;
            const double p = weight * std::norm(inner(setup.kets[o], received));
            dist.p_conclusive += p;
            const int decoded = setup.outcomes[o] == Outcome::bit0 ? 0 : 1;
            if (decoded != bit) dist.p_conclusive_error += p;
          }
        }
      }
    }
  }
  return dist;
}

double conclusive_probability(const ProtocolParams& params, const KrausChannel& channel) {
  return outcome_distribution(params, channel).p_conclusive;
}

}  // namespace qkdrot
