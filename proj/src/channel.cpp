#include "channel.hpp"

#include <cmath>
#include <sstream>

#include "errors.hpp"
#include "protocol.hpp"
#include "rng.hpp"

namespace qkdrot {

namespace {

using nlohmann::json;

constexpr Complex kI{0.0, 1.0};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

void require_probability(double p, const char* name) {
  if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
    fail(ErrorCode::invalid_argument,
         std::string(name) + " must lie in [0, 1], got " + fmt(p));
  }
}

double number_field(const json& spec, const char* key) {
  const auto it = spec.find(key);
  if (it == spec.end()) {
    fail(ErrorCode::parse, std::string("channel spec: missing field \"") + key + "\"");
  }
  if (!it->is_number()) {
    fail(ErrorCode::parse, std::string("channel spec: field \"") + key + "\" must be a number");
  }
  return it->get<double>();
}

Complex complex_entry(const json& entry, std::size_t op, std::size_t r, std::size_t c) {
  const std::string where = "channel spec: kraus[" + std::to_string(op) + "][" +
                            std::to_string(r) + "][" + std::to_string(c) + "]";
  if (!entry.is_array() || entry.size() != 2 || !entry[0].is_number() || !entry[1].is_number()) {
    fail(ErrorCode::parse, where + " must be an [re, im] pair of numbers");
  }
  return {entry[0].get<double>(), entry[1].get<double>()};
}

Matrix kraus_matrix(const json& m, std::size_t op) {
  const std::string where = "channel spec: kraus[" + std::to_string(op) + "]";
  if (!m.is_array() || m.size() != 2) fail(ErrorCode::parse, where + " must have 2 rows");
  Matrix out(2, 2);
  for (std::size_t r = 0; r < 2; ++r) {
    if (!m[r].is_array() || m[r].size() != 2) {
      fail(ErrorCode::parse, where + "[" + std::to_string(r) + "] must have 2 entries");
    }
    for (std::size_t c = 0; c < 2; ++c) out(r, c) = complex_entry(m[r][c], op, r, c);
  }
  return out;
}

}  // namespace

double completeness_residual(const std::vector<Matrix>& operators) {
  Matrix sum = Matrix::zeros(2, 2);
  for (const Matrix& e : operators) sum = sum + adjoint(e) * e;
  return max_abs_diff(sum, Matrix::identity(2));
}

KrausChannel::KrausChannel(std::vector<Matrix> operators, std::string label, ChannelSpec spec)
    : operators_(std::move(operators)), label_(std::move(label)), spec_(std::move(spec)) {
  if (operators_.empty()) fail(ErrorCode::invalid_argument, "channel needs at least one Kraus operator");
  for (const Matrix& e : operators_) {
    if (e.rows() != 2 || e.cols() != 2) {
      fail(ErrorCode::dimension_mismatch, "Kraus operators must be 2x2");
    }
  }
  const double residual = qkdrot::completeness_residual(operators_);
  if (!(residual <= kCompletenessTol)) {
    fail(ErrorCode::invalid_argument,
         "channel \"" + label_ + "\" is not trace preserving: |sum E^dag E - I|_max = " +
             fmt(residual));
  }
}

double KrausChannel::completeness_residual() const {
  return qkdrot::completeness_residual(operators_);
}

Matrix KrausChannel::apply(const Matrix& rho) const {
  Matrix out = Matrix::zeros(2, 2);
  for (const Matrix& e : operators_) out = out + e * rho * adjoint(e);
  return out;
}

const Matrix& sigma_x() {
  static const Matrix m(2, 2, {1.0, 0.0, 0.0, -1.0});
  return m;
}

const Matrix& sigma_y() {
  static const Matrix m(2, 2, {0.0, -kI, kI, 0.0});
  return m;
}

const Matrix& sigma_z() {
  static const Matrix m(2, 2, {0.0, 1.0, 1.0, 0.0});
  return m;
}

const PauliBasis& PauliBasis::standard() {
  static const PauliBasis basis{Matrix::identity(2), sigma_x(), sigma_y(), sigma_z()};
  return basis;
}

Matrix PauliTerms::commuting_part(const PauliBasis& basis) const {
  return i * basis.identity + y * basis.y;
}

Matrix PauliTerms::anticommuting_part(const PauliBasis& basis) const {
  return x * basis.x + z * basis.z;
}

Matrix PauliTerms::reconstruct(const PauliBasis& basis) const {
  return commuting_part(basis) + anticommuting_part(basis);
}

PauliCoefficients decompose(const KrausChannel& channel, const PauliBasis& basis) {
  PauliCoefficients out;
  out.reserve(channel.operators().size());
  for (const Matrix& e : channel.operators()) {
    out.push_back({trace_inner(basis.identity, e) / 2.0, trace_inner(basis.x, e) / 2.0,
                   trace_inner(basis.y, e) / 2.0, trace_inner(basis.z, e) / 2.0});
  }
  return out;
}

KrausChannel conjugate_by_rotation(const KrausChannel& channel, double beta) {
  const Matrix left = rotation(-beta);
  const Matrix right = rotation(beta);
  std::vector<Matrix> ops;
  ops.reserve(channel.operators().size());
  for (const Matrix& e : channel.operators()) ops.push_back(left * e * right);
  ChannelSpec spec;
  spec.kind = ChannelKind::custom;
  return KrausChannel(std::move(ops), channel.label() + " conjugated by R(" + fmt(beta) + ")",
                      spec);
}

KrausChannel identity_channel() {
  return KrausChannel({Matrix::identity(2)}, "identity", {ChannelKind::identity, {}, 0});
}

KrausChannel depolarizing(double p) {
  require_probability(p, "depolarizing p");
  const double a = std::sqrt(1.0 - 0.75 * p);
  const double b = std::sqrt(0.25 * p);
  return KrausChannel({a * Matrix::identity(2), b * sigma_x(), b * sigma_y(), b * sigma_z()},
                      "depolarizing(p=" + fmt(p) + ")", {ChannelKind::depolarizing, {p}, 0});
}

KrausChannel pauli_channel(double p_i, double p_x, double p_y, double p_z) {
  require_probability(p_i, "pauli p_i");
  require_probability(p_x, "pauli p_x");
  require_probability(p_y, "pauli p_y");
  require_probability(p_z, "pauli p_z");
  const double total = p_i + p_x + p_y + p_z;
  if (std::abs(total - 1.0) > 1e-12) {
    fail(ErrorCode::invalid_argument, "pauli probabilities must sum to 1, got " + fmt(total));
  }
  std::vector<Matrix> ops;
  const std::pair<double, const Matrix*> terms[] = {
      {p_i, nullptr}, {p_x, &sigma_x()}, {p_y, &sigma_y()}, {p_z, &sigma_z()}};
  for (const auto& [p, m] : terms) {
    if (p == 0.0) continue;
    ops.push_back(std::sqrt(p) * (m ? *m : Matrix::identity(2)));
  }
  return KrausChannel(std::move(ops),
                      "pauli(" + fmt(p_i) + "," + fmt(p_x) + "," + fmt(p_y) + "," + fmt(p_z) + ")",
                      {ChannelKind::pauli, {p_i, p_x, p_y, p_z}, 0});
}

KrausChannel unitary_rotation(double beta) {
  if (!std::isfinite(beta)) fail(ErrorCode::invalid_argument, "rotation angle must be finite");
  return KrausChannel({rotation(beta)}, "unitary_rotation(beta=" + fmt(beta) + ")",
                      {ChannelKind::unitary_rotation, {beta}, 0});
}

KrausChannel amplitude_damping(double gamma) {
  require_probability(gamma, "amplitude damping gamma");
  const Matrix e0 = projector(ket_0z()) + std::sqrt(1.0 - gamma) * projector(ket_1z());
  const Matrix e1 = std::sqrt(gamma) * (ket_0z() * adjoint(ket_1z()));
  return KrausChannel({e0, e1}, "amplitude_damping(gamma=" + fmt(gamma) + ")",
                      {ChannelKind::amplitude_damping, {gamma}, 0});
}

KrausChannel random_channel(std::uint64_t seed, int num_kraus) {
  if (num_kraus < 1 || num_kraus > 4) {
    fail(ErrorCode::invalid_argument,
         "num_kraus must be in 1..4, got " + std::to_string(num_kraus));
  }
  constexpr int kMaxAttempts = 64;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    StreamRng rng(seed, static_cast<std::uint64_t>(attempt));
    std::vector<Matrix> gaussians;
    Matrix sum = Matrix::zeros(2, 2);
    for (int j = 0; j < num_kraus; ++j) {
      Matrix g(2, 2);
      for (std::size_t k = 0; k < 4; ++k) {
        const double re = rng.gaussian();
        const double im = rng.gaussian();
        g[k] = Complex(re, im);
      }
      sum = sum + adjoint(g) * g;
      gaussians.push_back(g);
    }
    // Symmetrize away roundoff so the Hermitian check is exact.
    sum = 0.5 * (sum + adjoint(sum));
    if (hermitian_eigenvalues_2x2(sum)[0] < 1e-8) continue;
    const Matrix normalizer = hermitian_sqrt_inv(sum);
    std::vector<Matrix> ops;
    for (const Matrix& g : gaussians) ops.push_back(g * normalizer);
    return KrausChannel(std::move(ops),
                        "random(seed=" + std::to_string(seed) + ",k=" + std::to_string(num_kraus) + ")",
                        {ChannelKind::random, {static_cast<double>(num_kraus)}, seed});
  }
  fail(ErrorCode::degenerate, "random_channel: no well-conditioned sample after retries");
}

const char* channel_kind_name(ChannelKind kind) {
  switch (kind) {
    case ChannelKind::identity: return "identity";
    case ChannelKind::depolarizing: return "depolarizing";
    case ChannelKind::pauli: return "pauli";
    case ChannelKind::unitary_rotation: return "unitary_rotation";
    case ChannelKind::amplitude_damping: return "amplitude_damping";
    case ChannelKind::random: return "random";
    case ChannelKind::custom: return "custom";
  }
  return "custom";
}

KrausChannel channel_from_json(const json& spec) {
  if (!spec.is_object()) fail(ErrorCode::parse, "channel spec must be a JSON object");
  const auto type_it = spec.find("type");
  if (type_it == spec.end() || !type_it->is_string()) {
    fail(ErrorCode::parse, "channel spec: missing string field \"type\"");
  }
  const std::string type = type_it->get<std::string>();
  if (type == "identity") return identity_channel();
  if (type == "depolarizing") return depolarizing(number_field(spec, "p"));
  if (type == "pauli") {
    return pauli_channel(number_field(spec, "p_i"), number_field(spec, "p_x"),
                         number_field(spec, "p_y"), number_field(spec, "p_z"));
  }
  if (type == "unitary_rotation") return unitary_rotation(number_field(spec, "beta"));
  if (type == "amplitude_damping") return amplitude_damping(number_field(spec, "gamma"));
  if (type == "random") {
    const auto seed = spec.find("seed");
    if (seed == spec.end() || !seed->is_number_integer() || seed->get<std::int64_t>() < 0) {
      fail(ErrorCode::parse, "channel spec: \"seed\" must be a non-negative integer");
    }
    const auto k = spec.find("num_kraus");
    int num_kraus = 2;
    if (k != spec.end()) {
      if (!k->is_number_integer()) fail(ErrorCode::parse, "channel spec: \"num_kraus\" must be an integer");
      num_kraus = k->get<int>();
    }
    return random_channel(seed->get<std::uint64_t>(), num_kraus);
  }
  if (type == "custom") {
    const auto kraus = spec.find("kraus");
    if (kraus == spec.end() || !kraus->is_array() || kraus->empty()) {
      fail(ErrorCode::parse, "channel spec: \"kraus\" must be a non-empty list of 2x2 matrices");
    }
    std::vector<Matrix> ops;
    for (std::size_t j = 0; j < kraus->size(); ++j) ops.push_back(kraus_matrix((*kraus)[j], j));
    std::string label = "custom";
    if (const auto l = spec.find("label"); l != spec.end() && l->is_string()) {
      label = l->get<std::string>();
    }
    return KrausChannel(std::move(ops), label, {ChannelKind::custom, {}, 0});
  }
  fail(ErrorCode::parse, "channel spec: unknown type \"" + type + "\"");
}

json channel_to_json(const KrausChannel& channel) {
  const ChannelSpec& s = channel.spec();
  switch (s.kind) {
    case ChannelKind::identity: return {{"type", "identity"}};
    case ChannelKind::depolarizing: return {{"type", "depolarizing"}, {"p", s.values.at(0)}};
    case ChannelKind::pauli:
      return {{"type", "pauli"},
              {"p_i", s.values.at(0)},
              {"p_x", s.values.at(1)},
              {"p_y", s.values.at(2)},
              {"p_z", s.values.at(3)}};
    case ChannelKind::unitary_rotation:
      return {{"type", "unitary_rotation"}, {"beta", s.values.at(0)}};
    case ChannelKind::amplitude_damping:
      return {{"type", "amplitude_damping"}, {"gamma", s.values.at(0)}};
    case ChannelKind::random:
      return {{"type", "random"}, {"seed", s.seed}, {"num_kraus", static_cast<int>(s.values.at(0))}};
    case ChannelKind::custom: break;
  }
  json kraus = json::array();
  for (const Matrix& e : channel.operators()) {
    json m = json::array();
    for (std::size_t r = 0; r < 2; ++r) {
      json row = json::array();
      for (std::size_t c = 0; c < 2; ++c) row.push_back({e(r, c).real(), e(r, c).imag()});
      m.push_back(row);
    }
    kraus.push_back(m);
  }
  return {{"type", "custom"}, {"label", channel.label()}, {"kraus", kraus}};
}

}  // namespace qkdrot
