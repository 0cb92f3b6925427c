#include "qkdrot/qkdrot.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <string>
#include <vector>

#include "analysis.hpp"
#include "channel.hpp"
#include "edp.hpp"
#include "errors.hpp"
#include "mc.hpp"
#include "verify.hpp"

struct qkd_channel {
  qkdrot::KrausChannel impl;
};

struct qkd_verify_report {
  std::vector<qkdrot::SuiteResult> suites;
};

namespace {

thread_local std::string last_error;

qkd_status set_error(qkd_status status, const char* message) {
  last_error = message;
  return status;
}

template <class Body>
qkd_status guarded(Body&& body) {
  try {
    body();
    return QKD_OK;
  } catch (const qkdrot::Error& e) {
    return set_error(static_cast<qkd_status>(static_cast<int>(e.code())), e.what());
  } catch (const nlohmann::json::exception& e) {
    return set_error(QKD_ERR_PARSE, e.what());
  } catch (const std::bad_alloc&) {
    return set_error(QKD_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(QKD_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(QKD_ERR_INTERNAL, "unknown error");
  }
}

qkd_status null_arg(const char* what) {
  return set_error(QKD_ERR_NULL, (std::string(what) + " is NULL").c_str());
}

qkdrot::ProtocolParams to_params(const qkd_params& p) {
  qkdrot::SiftingMode mode;
  switch (p.sifting) {
    case QKD_SIFT_GENERIC: mode = qkdrot::SiftingMode::generic; break;
    case QKD_SIFT_BASIS_FREE: mode = qkdrot::SiftingMode::basis_free; break;
    default: qkdrot::fail(qkdrot::ErrorCode::invalid_argument, "unknown sifting mode");
  }
  return qkdrot::ProtocolParams::make(p.num_bases, p.theta, mode);
}

qkdrot::LambdaMode to_mode(qkd_lambda_mode m) {
  switch (m) {
    case QKD_LAMBDA_ADMISSIBLE_RANGE: return qkdrot::LambdaMode::admissible_range;
    case QKD_LAMBDA_PESSIMISTIC: return qkdrot::LambdaMode::pessimistic;
  }
  qkdrot::fail(qkdrot::ErrorCode::invalid_argument, "unknown lambda mode");
}

void write_matrix(const qkdrot::Matrix& m, double* out) {
  std::size_t k = 0;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      out[k++] = m(r, c).real();
      out[k++] = m(r, c).imag();
    }
  }
}

qkd_status emit_channel(qkdrot::KrausChannel ch, qkd_channel** out) {
  *out = new qkd_channel{std::move(ch)};
  return QKD_OK;
}

template <class Make>
qkd_status make_channel(qkd_channel** out, Make&& make) {
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] { emit_channel(make(), out); });
}

void fill(const qkdrot::BellDiagnostics& d, qkd_bell_diagnostics* out) {
  *out = {d.p_i, d.p_x, d.p_y, d.p_z, d.e_b, d.e_p, d.n_prime, d.p_con,
          d.degenerate_parameters ? 1 : 0};
}

qkdrot::SimulationConfig to_sim(const qkd_params& p, const qkd_channel& ch,
                                const qkd_sim_config& c) {
  qkdrot::SimulationConfig s;
  s.n = c.n;
  s.seed = c.seed;
  s.test_fraction = c.test_fraction;
  s.params = to_params(p);
  s.channel = ch.impl;
  s.threads = c.threads;
  return s;
}

void fill(const qkdrot::TranscriptStats& s, qkd_transcript_stats* out) {
  *out = {s.n_total,
          s.n_basis_matched,
          s.n_conclusive,
          s.n_conclusive_errors,
          s.n_test,
          s.n_test_errors,
          s.key_bits_remaining,
          s.e_b_hat.value,
          s.e_b_hat.std_error,
          s.p_con_hat.value,
          s.p_con_hat.std_error,
          s.test_sample_warning ? 1 : 0};
}

}  // namespace

extern "C" {

const char* qkd_version(void) { return "0.1.0"; }

const char* qkd_status_string(qkd_status status) {
  switch (status) {
    case QKD_OK: return "ok";
    case QKD_ERR_INVALID_ARGUMENT: return "invalid argument";
    case QKD_ERR_DIMENSION: return "dimension mismatch";
    case QKD_ERR_DEGENERATE: return "degenerate parameters";
    case QKD_ERR_NOT_POSITIVE_DEFINITE: return "not positive definite";
    case QKD_ERR_PARSE: return "parse error";
    case QKD_ERR_CONSISTENCY: return "consistency error";
    case QKD_ERR_NULL: return "null argument";
    case QKD_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* qkd_last_error(void) { return last_error.c_str(); }

qkd_status qkd_params_validate(const qkd_params* params) {
  if (!params) return null_arg("params");
  return guarded([&] { to_params(*params); });
}

int qkd_params_degenerate(const qkd_params* params) {
  if (!params) return 0;
  int out = 0;
  guarded([&] { out = to_params(*params).degenerate() ? 1 : 0; });
  return out;
}

qkd_status qkd_channel_identity(qkd_channel** out) {
  return make_channel(out, [] { return qkdrot::identity_channel(); });
}

qkd_status qkd_channel_depolarizing(double p, qkd_channel** out) {
  return make_channel(out, [&] { return qkdrot::depolarizing(p); });
}

qkd_status qkd_channel_pauli(double p_i, double p_x, double p_y, double p_z, qkd_channel** out) {
  return make_channel(out, [&] { return qkdrot::pauli_channel(p_i, p_x, p_y, p_z); });
}

qkd_status qkd_channel_unitary_rotation(double beta, qkd_channel** out) {
  return make_channel(out, [&] { return qkdrot::unitary_rotation(beta); });
}

qkd_status qkd_channel_amplitude_damping(double gamma, qkd_channel** out) {
  return make_channel(out, [&] { return qkdrot::amplitude_damping(gamma); });
}

qkd_status qkd_channel_random(uint64_t seed, int num_kraus, qkd_channel** out) {
  return make_channel(out, [&] { return qkdrot::random_channel(seed, num_kraus); });
}

qkd_status qkd_channel_custom(const double* kraus, size_t num_kraus, const char* label,
                              qkd_channel** out) {
  if (!kraus && num_kraus > 0) return null_arg("kraus");
  return make_channel(out, [&] {
    std::vector<qkdrot::Matrix> ops;
    for (size_t k = 0; k < num_kraus; ++k) {
      qkdrot::Matrix m = qkdrot::Matrix::zeros(2, 2);
      for (size_t e = 0; e < 4; ++e) {
        m(e / 2, e % 2) = qkdrot::Complex(kraus[8 * k + 2 * e], kraus[8 * k + 2 * e + 1]);
      }
      ops.push_back(m);
    }
    qkdrot::ChannelSpec spec;
    spec.kind = qkdrot::ChannelKind::custom;
    return qkdrot::KrausChannel(std::move(ops), label ? label : "custom", spec);
  });
}

qkd_status qkd_channel_from_json(const char* json, qkd_channel** out) {
  if (!json) return null_arg("json");
  return make_channel(out, [&] { return qkdrot::channel_from_json(nlohmann::json::parse(json)); });
}

qkd_status qkd_channel_conjugate(const qkd_channel* channel, double beta, qkd_channel** out) {
  if (!channel) return null_arg("channel");
  return make_channel(out, [&] { return qkdrot::conjugate_by_rotation(channel->impl, beta); });
}

void qkd_channel_free(qkd_channel* channel) { delete channel; }

size_t qkd_channel_num_kraus(const qkd_channel* channel) {
  return channel ? channel->impl.operators().size() : 0;
}

qkd_status qkd_channel_get_kraus(const qkd_channel* channel, size_t index, double* out) {
  if (!channel) return null_arg("channel");
  if (!out) return null_arg("out");
  if (index >= channel->impl.operators().size()) {
    return set_error(QKD_ERR_INVALID_ARGUMENT, "Kraus index out of range");
  }
  write_matrix(channel->impl.operators()[index], out);
  return QKD_OK;
}

const char* qkd_channel_label(const qkd_channel* channel) {
  return channel ? channel->impl.label().c_str() : "";
}

double qkd_channel_param(const qkd_channel* channel) {
  if (!channel) return 0.0;
  const auto& spec = channel->impl.spec();
  if (spec.kind == qkdrot::ChannelKind::random) return static_cast<double>(spec.seed);
  return spec.values.empty() ? 0.0 : spec.values.front();
}

qkd_status qkd_channel_to_json(const qkd_channel* channel, char** out) {
  if (!channel) return null_arg("channel");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    const std::string text = qkdrot::channel_to_json(channel->impl).dump();
    char* buf = static_cast<char*>(std::malloc(text.size() + 1));
    if (!buf) throw std::bad_alloc();
    std::memcpy(buf, text.c_str(), text.size() + 1);
    *out = buf;
  });
}

qkd_status qkd_channel_pauli_coeffs(const qkd_channel* channel, size_t index, double* out) {
  if (!channel) return null_arg("channel");
  if (!out) return null_arg("out");
  if (index >= channel->impl.operators().size()) {
    return set_error(QKD_ERR_INVALID_ARGUMENT, "Kraus index out of range");
  }
  return guarded([&] {
    const qkdrot::PauliTerms t = qkdrot::decompose(channel->impl)[index];
    const qkdrot::Complex v[4] = {t.i, t.x, t.y, t.z};
    for (int k = 0; k < 4; ++k) {
      out[2 * k] = v[k].real();
      out[2 * k + 1] = v[k].imag();
    }
  });
}

void qkd_string_free(char* s) { std::free(s); }

qkd_status qkd_conclusive_probability(const qkd_params* params, const qkd_channel* channel,
                                      double* p_con, double* p_con_error) {
  if (!params) return null_arg("params");
  if (!channel) return null_arg("channel");
  return guarded([&] {
    const auto d = qkdrot::outcome_distribution(to_params(*params), channel->impl);
    if (p_con) *p_con = d.p_conclusive;
    if (p_con_error) *p_con_error = d.p_conclusive_error;
  });
}

qkd_status qkd_edp_numerical(const qkd_params* params, const qkd_channel* channel,
                             qkd_bell_diagnostics* out, double* rho_out) {
  if (!params) return null_arg("params");
  if (!channel) return null_arg("channel");
  if (!out) return null_arg("out");
  return guarded([&] {
    const auto state = qkdrot::rho_ab_numerical(to_params(*params), channel->impl);
    fill(qkdrot::bell_diagnostics_numerical(state), out);
    if (rho_out) write_matrix(state.matrix, rho_out);
  });
}

qkd_status qkd_edp_closed_form(const qkd_params* params, const qkd_channel* channel,
                               qkd_bell_diagnostics* out) {
  if (!params) return null_arg("params");
  if (!channel) return null_arg("channel");
  if (!out) return null_arg("out");
  return guarded([&] {
    fill(qkdrot::bell_diagnostics_closed_form(to_params(*params),
                                              qkdrot::decompose(channel->impl)),
         out);
  });
}

qkd_status qkd_phi_operator(const qkd_params* params, double* out32) {
  if (!params) return null_arg("params");
  if (!out32) return null_arg("out32");
  return guarded([&] { write_matrix(qkdrot::phi_operator(to_params(*params)), out32); });
}

qkd_status qkd_phi_closed_form(const qkd_params* params, double* out32) {
  if (!params) return null_arg("params");
  if (!out32) return null_arg("out32");
  return guarded([&] { write_matrix(qkdrot::phi_closed_form(to_params(*params)), out32); });
}

qkd_status qkd_spherical_average_check(int num_bases, qkd_spherical_average* out) {
  if (!out) return null_arg("out");
  return guarded([&] {
    const auto r = qkdrot::spherical_average_lemma_check(num_bases);
    *out = {r.mean_cos_sq, r.mean_sin_sq, r.mean_cos_sin, r.rotation_sum_max_abs};
  });
}

qkd_status qkd_error_relation_get(const qkd_params* params, qkd_error_relation* out) {
  if (!params) return null_arg("params");
  if (!out) return null_arg("out");
  return guarded([&] {
    const auto r = qkdrot::error_relation(to_params(*params));
    *out = {r.slope, r.kind == qkdrot::RelationKind::equality ? QKD_RELATION_EQUALITY
                                                             : QKD_RELATION_UPPER_BOUND};
  });
}

qkd_status qkd_m2_bound_solve(double theta, double e_b, qkd_m2_bound* out) {
  if (!out) return null_arg("out");
  return guarded([&] {
    const auto s = qkdrot::m2_bound(theta, e_b);
    *out = {s.e_p_max, s.maximizer_ai2, s.maximizer_ax2, s.a, s.b, s.feasible ? 1 : 0};
  });
}

qkd_status qkd_m2_bound_oracle(double theta, double e_b, double grid_step, double* out) {
  if (!out) return null_arg("out");
  return guarded([&] { *out = qkdrot::m2_bound_oracle(theta, e_b, grid_step); });
}

qkd_status qkd_entropy_h2(double p, double* out) {
  if (!out) return null_arg("out");
  return guarded([&] { *out = qkdrot::entropy_h2(p); });
}

qkd_status qkd_entropy_h4(const double x[4], double* out) {
  if (!x) return null_arg("x");
  if (!out) return null_arg("out");
  return guarded([&] { *out = qkdrot::entropy_h4({x[0], x[1], x[2], x[3]}); });
}

qkd_status qkd_lambda_worst_case(const qkd_params* params, qkd_lambda_mode mode, double e_b,
                                 double e_p, double* lambda_min, double* lambda_max,
                                 double* lambda_worst) {
  if (!params) return null_arg("params");
  return guarded([&] {
    const auto r = qkdrot::lambda_worst_case(to_params(*params), to_mode(mode), e_b, e_p);
    if (lambda_min) *lambda_min = r.min;
    if (lambda_max) *lambda_max = r.max;
    if (lambda_worst) *lambda_worst = r.worst;
  });
}

qkd_status qkd_key_rate(const qkd_params* params, qkd_lambda_mode mode, double e_b, double p_con,
                        qkd_key_rate_report* out) {
  if (!params) return null_arg("params");
  if (!out) return null_arg("out");
  return guarded([&] {
    const auto r = qkdrot::key_rate(to_params(*params), to_mode(mode), e_b, p_con);
    *out = {r.e_b,
            r.e_p,
            r.lambda_min,
            r.lambda_max,
            r.lambda_worst,
            r.bracket_shor_preskill,
            r.bracket_h4,
            r.rate_shor_preskill,
            r.rate_h4,
            r.p_con,
            r.sift_factor,
            r.abort_recommended ? 1 : 0};
  });
}

qkd_status qkd_simulate(const qkd_params* params, const qkd_channel* channel,
                        const qkd_sim_config* config, qkd_transcript_stats* out) {
  if (!params) return null_arg("params");
  if (!channel) return null_arg("channel");
  if (!config) return null_arg("config");
  if (!out) return null_arg("out");
  return guarded([&] { fill(qkdrot::run(to_sim(*params, *channel, *config)), out); });
}

qkd_status qkd_estimate_vs_analytic(const qkd_params* params, const qkd_channel* channel,
                                    const qkd_sim_config* config, qkd_sim_comparison* out) {
  if (!params) return null_arg("params");
  if (!channel) return null_arg("channel");
  if (!config) return null_arg("config");
  if (!out) return null_arg("out");
  return guarded([&] {
    const auto c = qkdrot::estimate_vs_analytic(to_sim(*params, *channel, *config));
    fill(c.stats, &out->stats);
    out->e_b_analytic = c.e_b_analytic;
    out->p_con_analytic = c.p_con_analytic;
    out->z_e_b = c.z_e_b;
    out->z_p_con = c.z_p_con;
    out->z_sifting = c.z_sifting;
  });
}

qkd_status qkd_verify_run(int trials, uint64_t seed, qkd_verify_report** out) {
  if (!out) return null_arg("out");
  *out = nullptr;
  if (trials < 1) return set_error(QKD_ERR_INVALID_ARGUMENT, "trials must be >= 1");
  return guarded([&] {
    qkdrot::VerifyOptions opts;
    opts.trials = trials;
    opts.seed = seed;
    *out = new qkd_verify_report{qkdrot::run_verify(opts)};
  });
}

void qkd_verify_report_free(qkd_verify_report* report) { delete report; }

size_t qkd_verify_count(const qkd_verify_report* report) {
  return report ? report->suites.size() : 0;
}

int qkd_verify_all_passed(const qkd_verify_report* report) {
  if (!report) return 0;
  for (const auto& s : report->suites) {
    if (!s.passed) return 0;
  }
  return 1;
}

qkd_status qkd_verify_suite(const qkd_verify_report* report, size_t index, const char** name,
                            int* passed, double* max_deviation, double* tolerance,
                            const char** failure) {
  if (!report) return null_arg("report");
  if (index >= report->suites.size()) {
    return set_error(QKD_ERR_INVALID_ARGUMENT, "suite index out of range");
  }
  const auto& s = report->suites[index];
  if (name) *name = s.name.c_str();
  if (passed) *passed = s.passed ? 1 : 0;
  if (max_deviation) *max_deviation = s.max_deviation;
  if (tolerance) *tolerance = s.tolerance;
  if (failure) *failure = s.failure.c_str();
  return QKD_OK;
}

}  // extern "C"
