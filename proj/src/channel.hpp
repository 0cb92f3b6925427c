#pragma once

// Single-qubit Kraus channels and their Pauli decomposition.
//
// Pauli operators are the physical ones written in the working x-basis:
//   sigma_x = |0_x><0_x| - |1_x><1_x|        = [[1, 0], [0, -1]]
//   sigma_z = |0_z><0_z| - |1_z><1_z|        = [[0, 1], [1, 0]]
//   sigma_y = i(|1_x><0_x| - |0_x><1_x|)     = [[0, -i], [i, 0]]
// With this labeling U = a_i I + a_y sigma_y commutes with every rotation
// and V = a_x sigma_x + a_z sigma_z anticommutes with sigma_y.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "linalg.hpp"

namespace qkdrot {

// Completeness tolerance; looser than kAlgebraTol to admit channels read
// from decimal JSON.
inline constexpr double kCompletenessTol = 1e-10;

enum class ChannelKind {
  identity,
  depolarizing,
  pauli,
  unitary_rotation,
  amplitude_damping,
  random,
  custom,
};

struct ChannelSpec {
  ChannelKind kind = ChannelKind::identity;
  std::vector<double> values;  // kind-specific parameters, in declaration order
  std::uint64_t seed = 0;      // random only
};

class KrausChannel {
 public:
  /// Validates shapes and completeness sum_j E_j^dagger E_j = I.
  KrausChannel(std::vector<Matrix> operators, std::string label, ChannelSpec spec = {});

  const std::vector<Matrix>& operators() const noexcept { return operators_; }
  const std::string& label() const noexcept { return label_; }
  const ChannelSpec& spec() const noexcept { return spec_; }

  /// max |sum_j E_j^dagger E_j - I|.
  double completeness_residual() const;

  /// Applies the channel to a density matrix.
  Matrix apply(const Matrix& rho) const;

 private:
  std::vector<Matrix> operators_;
  std::string label_;
  ChannelSpec spec_;
};

double completeness_residual(const std::vector<Matrix>& operators);

struct PauliBasis {
  Matrix identity;
  Matrix x;
  Matrix y;
  Matrix z;

  static const PauliBasis& standard();
};

const Matrix& sigma_x();
const Matrix& sigma_y();
const Matrix& sigma_z();

struct PauliTerms {
  Complex i, x, y, z;

  Matrix commuting_part(const PauliBasis& basis = PauliBasis::standard()) const;
  Matrix anticommuting_part(const PauliBasis& basis = PauliBasis::standard()) const;
  Matrix reconstruct(const PauliBasis& basis = PauliBasis::standard()) const;
};

using PauliCoefficients = std::vector<PauliTerms>;

/// a_r = tr(sigma_r^dagger E) / 2 for every Kraus operator.
PauliCoefficients decompose(const KrausChannel& channel,
                            const PauliBasis& basis = PauliBasis::standard());

/// Channel {R_{-beta} E_j R_beta}.
KrausChannel conjugate_by_rotation(const KrausChannel& channel, double beta);

KrausChannel identity_channel();
/// {sqrt(1-3p/4) I, sqrt(p/4) sigma_x, sqrt(p/4) sigma_y, sqrt(p/4) sigma_z}.
KrausChannel depolarizing(double p);
KrausChannel pauli_channel(double p_i, double p_x, double p_y, double p_z);
KrausChannel unitary_rotation(double beta);
/// Decay |1_z> -> |0_z> with probability gamma.
KrausChannel amplitude_damping(double gamma);

/// Normalized Gaussian Kraus set; deterministic in (seed, num_kraus).
KrausChannel random_channel(std::uint64_t seed, int num_kraus);

/// JSON channel spec, e.g. {"type": "depolarizing", "p": 0.1} or
/// {"type": "custom", "kraus": [ [[[re,im],[re,im]],[[re,im],[re,im]]], ... ]}.
KrausChannel channel_from_json(const nlohmann::json& spec);
nlohmann::json channel_to_json(const KrausChannel& channel);

const char* channel_kind_name(ChannelKind kind);

}  // namespace qkdrot
