#include "edp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "errors.hpp"

namespace qkdrot {

namespace {

const Matrix& identity2() {
  static const Matrix m = Matrix::identity(2);
  return m;
}

Matrix on_b(const Matrix& op) { return tensor_product(identity2(), op); }

Matrix psi_0(const ProtocolParams& params) {
  const Matrix plus = prepare_state(params, 0, 0).ket;
  const Matrix minus = prepare_state(params, 0, 1).ket;
  return M_SQRT1_2 * (tensor_product(ket_0z(), plus) + tensor_product(ket_1z(), minus));
}

BipartiteState normalize(Matrix unnormalized, const ProtocolParams& params, StateSource source) {
  const double tr = trace(unnormalized).real();
  if (!(tr >= kDegenerateTrace)) {
    fail(ErrorCode::degenerate, "rho_AB has trace " + std::to_string(tr) +
                                    "; the channel and filter remove every signal");
  }
  return {(1.0 / tr) * unnormalized, tr, params, source};
}

double expectation(const Matrix& ket, const Matrix& rho) {
  return inner(ket, rho * ket).real();
}

struct PauliWeights {
  double i = 0.0, x = 0.0, y = 0.0, z = 0.0;
};

PauliWeights weights(const PauliCoefficients& coeffs) {
  PauliWeights w;
  for (const PauliTerms& t : coeffs) {
    w.i += std::norm(t.i);
    w.x += std::norm(t.x);
    w.y += std::norm(t.y);
    w.z += std::norm(t.z);
  }
  return w;
}

BellDiagnostics finish(double p_i, double p_x, double p_y, double p_z) {
  BellDiagnostics d;
  d.p_i = p_i;
  d.p_x = p_x;
  d.p_y = p_y;
  d.p_z = p_z;
  d.e_b = p_x + p_y;
  d.e_p = p_y + p_z;
  return d;
}

// N' = 4 tr(rho) for M > 2 and N'' = 2 tr(rho) for M = 2, where tr(rho) is the
// unnormalized trace, i.e. the conclusive probability.
double normalization_ratio(int num_bases) { return num_bases > 2 ? 4.0 : 2.0; }

}  // namespace

Matrix psi_l(const ProtocolParams& params, int basis) {
  require_basis(params, basis);
  return on_b(rotation(basis * kPi / params.num_bases)) * psi_0(params);
}

Matrix psi_l_expanded(const ProtocolParams& params, int basis) {
  const Matrix plus = prepare_state(params, basis, 0).ket;
  const Matrix minus = prepare_state(params, basis, 1).ket;
  return M_SQRT1_2 * (tensor_product(ket_0z(), plus) + tensor_product(ket_1z(), minus));
}

BipartiteState rho_ab_numerical(const ProtocolParams& params, const KrausChannel& channel) {
  params.validate();
  const Matrix psi = psi_0(params);
  const Matrix f0 = base_filter(params.theta);
  Matrix sum = Matrix::zeros(4, 4);
  for (const Matrix& e : channel.operators()) {
    for (int l = 0; l < params.num_bases; ++l) {
      const double angle = l * kPi / params.num_bases;
      const Matrix bob = f0 * rotation(-angle) * e * rotation(angle);
      sum = sum + projector(on_b(bob) * psi);
    }
  }
  return normalize((1.0 / params.num_bases) * sum, params, StateSource::numerical);
}

BipartiteState rho_ab_symmetrized(const ProtocolParams& params, const KrausChannel& channel) {
  params.validate();
  const Matrix psi_proj = projector(psi_0(params));
  const Matrix phi = phi_closed_form(params);
  const Matrix f0 = on_b(base_filter(params.theta));
  Matrix inner_sum = Matrix::zeros(4, 4);
  for (const PauliTerms& t : decompose(channel)) {
    const Matrix u = on_b(t.commuting_part());
    const Matrix v = on_b(t.anticommuting_part());
    inner_sum = inner_sum + u * psi_proj * adjoint(u) + v * phi * adjoint(v);
  }
  return normalize(f0 * inner_sum * adjoint(f0), params, StateSource::closed_form);
}

Matrix phi_operator(const ProtocolParams& params) {
  params.validate();
  const Matrix psi_proj = projector(psi_0(params));
  Matrix sum = Matrix::zeros(4, 4);
  for (int l = 0; l < params.num_bases; ++l) {
    const double angle = 2.0 * l * kPi / params.num_bases;
    sum = sum + on_b(rotation(angle)) * psi_proj * on_b(rotation(-angle));
  }
  return (1.0 / params.num_bases) * sum;
}

Matrix phi_closed_form(const ProtocolParams& params) {
  params.validate();
  if (params.num_bases == 2) return projector(psi_0(params));
  const Matrix up = ket_0z() * adjoint(ket_1z());
  const Matrix down = ket_1z() * adjoint(ket_0z());
  return 0.25 * (Matrix::identity(4) + tensor_product(up, rotation(params.theta)) +
                 tensor_product(down, rotation(-params.theta)));
}

const BellBasis& BellBasis::get() {
  static const BellBasis basis = [] {
    const Matrix z00 = tensor_product(ket_0z(), ket_0z());
    const Matrix z01 = tensor_product(ket_0z(), ket_1z());
    const Matrix z10 = tensor_product(ket_1z(), ket_0z());
    const Matrix z11 = tensor_product(ket_1z(), ket_1z());
    return BellBasis{M_SQRT1_2 * (z00 + z11), M_SQRT1_2 * (z01 + z10),
                     M_SQRT1_2 * (z01 - z10), M_SQRT1_2 * (z00 - z11)};
  }();
  return basis;
}

BellDiagnostics bell_diagnostics_numerical(const BipartiteState& state) {
  const BellBasis& bell = BellBasis::get();
  const Matrix& rho = state.matrix;
  BellDiagnostics d = finish(expectation(bell.phi_plus, rho), expectation(bell.psi_plus, rho),
                             expectation(bell.psi_minus, rho), expectation(bell.phi_minus, rho));
  d.p_con = state.norm_constant;
  d.n_prime = normalization_ratio(state.params.num_bases) * state.norm_constant;
  d.degenerate_parameters = state.params.degenerate();
  return d;
}

BellDiagnostics bell_diagnostics_closed_form(const ProtocolParams& params,
                                             const PauliCoefficients& coeffs) {
  params.validate();
  const PauliWeights w = weights(coeffs);
  const double s2 = std::pow(std::sin(params.theta), 2);
  const double c2 = std::pow(std::cos(params.theta), 2);
  BellDiagnostics d;
  double n = 0.0;
  if (params.num_bases > 2) {
    n = 2.0 * (s2 * w.i + w.x + (1.0 + c2) * w.y + w.z);
    if (!(n >= kDegenerateTrace)) fail(ErrorCode::degenerate, "N' vanishes for this channel");
    d = finish(2.0 * w.i * s2 / n, s2 * (w.x + w.z) / n, (2.0 * w.y + c2 * (w.x + w.z)) / n,
               (w.x + w.z + 2.0 * c2 * w.y) / n);
  } else {
    n = s2 * (w.i + w.x) + (1.0 + c2) * (w.y + w.z);
    if (!(n >= kDegenerateTrace)) fail(ErrorCode::degenerate, "N'' vanishes for this channel");
    d = finish(w.i * s2 / n, w.x * s2 / n, (w.y + w.z * c2) / n, (w.z + w.y * c2) / n);
  }
  d.n_prime = n;
  d.p_con = n / normalization_ratio(params.num_bases);
  d.degenerate_parameters = params.degenerate();
  return d;
}

bool is_valid_state(const BipartiteState& state, double tol) {
  const Matrix& rho = state.matrix;
  if (!is_hermitian(rho, tol)) return false;
  if (std::abs(trace(rho) - Complex(1.0)) > tol) return false;
  const BellBasis& bell = BellBasis::get();
  for (const Matrix* ket : {&bell.phi_plus, &bell.psi_plus, &bell.psi_minus, &bell.phi_minus}) {
    if (expectation(*ket, rho) < -tol) return false;
  }
  return true;
}

double SphericalAverageReport::average_deviation() const {
  return std::max({std::abs(mean_cos_sq - 0.5), std::abs(mean_sin_sq - 0.5),
                   std::abs(mean_cos_sin)});
}

SphericalAverageReport spherical_average_lemma_check(int num_bases) {
  if (num_bases < 2) fail(ErrorCode::invalid_argument, "M must be >= 2");
  SphericalAverageReport r;
  r.num_bases = num_bases;
  Matrix rotation_sum = Matrix::zeros(2, 2);
  for (int l = 0; l < num_bases; ++l) {
    const double angle = 2.0 * l * kPi / num_bases;
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    r.mean_cos_sq += c * c;
    r.mean_sin_sq += s * s;
    r.mean_cos_sin += c * s;
    rotation_sum = rotation_sum + rotation(angle);
  }
  r.mean_cos_sq /= num_bases;
  r.mean_sin_sq /= num_bases;
  r.mean_cos_sin /= num_bases;
  r.rotation_sum_max_abs = max_abs(rotation_sum);
  return r;
}

}  // namespace qkdrot
