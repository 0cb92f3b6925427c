#ifndef QKDROT_QKDROT_H
#define QKDROT_QKDROT_H

/* C interface to the qkdrot library.
 *
 * Every fallible call returns a qkd_status. On failure the message for the
 * calling thread is available from qkd_last_error() until the next failing
 * call on that thread. Objects behind opaque handles are immutable once
 * created and may be shared across threads; release them with their _free
 * function (passing NULL is a no-op).
 *
 * Complex matrices cross the boundary as interleaved (re, im) doubles in
 * row-major order: a 2x2 matrix is 8 doubles, a 4x4 matrix 32 doubles.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(QKDROT_BUILDING)
#define QKD_API __attribute__((visibility("default")))
#else
#define QKD_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qkd_status {
  QKD_OK = 0,
  QKD_ERR_INVALID_ARGUMENT = 1,
  QKD_ERR_DIMENSION = 2,
  QKD_ERR_DEGENERATE = 3,
  QKD_ERR_NOT_POSITIVE_DEFINITE = 4,
  QKD_ERR_PARSE = 5,
  QKD_ERR_CONSISTENCY = 6,
  QKD_ERR_NULL = 7,
  QKD_ERR_INTERNAL = 8
} qkd_status;

QKD_API const char* qkd_version(void);
QKD_API const char* qkd_status_string(qkd_status status);
/* Message of the last failure on this thread; "" if none. */
QKD_API const char* qkd_last_error(void);

/* ---- protocol ---------------------------------------------------------- */

typedef enum qkd_sifting { QKD_SIFT_GENERIC = 0, QKD_SIFT_BASIS_FREE = 1 } qkd_sifting;

typedef struct qkd_params {
  int num_bases;  /* M >= 2 */
  double theta;   /* radians, (0, pi/2] */
  qkd_sifting sifting;
} qkd_params;

/* Checks the parameters; QKD_ERR_DEGENERATE is never returned here since the
 * state at M = 2, theta = pi/2 is still well defined. */
QKD_API qkd_status qkd_params_validate(const qkd_params* params);
/* 1 when M = 2 and theta = pi/2, else 0. */
QKD_API int qkd_params_degenerate(const qkd_params* params);

/* ---- channels ---------------------------------------------------------- */

typedef struct qkd_channel qkd_channel;

QKD_API qkd_status qkd_channel_identity(qkd_channel** out);
QKD_API qkd_status qkd_channel_depolarizing(double p, qkd_channel** out);
QKD_API qkd_status qkd_channel_pauli(double p_i, double p_x, double p_y, double p_z,
                                     qkd_channel** out);
QKD_API qkd_status qkd_channel_unitary_rotation(double beta, qkd_channel** out);
QKD_API qkd_status qkd_channel_amplitude_damping(double gamma, qkd_channel** out);
QKD_API qkd_status qkd_channel_random(uint64_t seed, int num_kraus, qkd_channel** out);
/* num_kraus operators of 8 doubles each. label may be NULL. */
QKD_API qkd_status qkd_channel_custom(const double* kraus, size_t num_kraus, const char* label,
                                      qkd_channel** out);
/* Channel JSON spec, e.g. {"type": "depolarizing", "p": 0.1}. */
QKD_API qkd_status qkd_channel_from_json(const char* json, qkd_channel** out);
/* Returns the conjugated channel R(-beta) E R(beta) for every operator. */
QKD_API qkd_status qkd_channel_conjugate(const qkd_channel* channel, double beta,
                                         qkd_channel** out);
QKD_API void qkd_channel_free(qkd_channel* channel);

QKD_API size_t qkd_channel_num_kraus(const qkd_channel* channel);
/* Writes operator `index` into out[8]. */
QKD_API qkd_status qkd_channel_get_kraus(const qkd_channel* channel, size_t index, double* out);
/* Pointer valid while the channel lives. */
QKD_API const char* qkd_channel_label(const qkd_channel* channel);
/* First kind-specific parameter (p, beta, gamma, ...), 0 when there is none. */
QKD_API double qkd_channel_param(const qkd_channel* channel);
/* JSON spec of the channel. Free the string with qkd_string_free. */
QKD_API qkd_status qkd_channel_to_json(const qkd_channel* channel, char** out);
/* Pauli coefficients (a_i, a_x, a_y, a_z) of operator `index` as 8 doubles. */
QKD_API qkd_status qkd_channel_pauli_coeffs(const qkd_channel* channel, size_t index,
                                            double* out);

QKD_API void qkd_string_free(char* s);

/* ---- prepare-and-measure and EDP picture ------------------------------- */

typedef struct qkd_bell_diagnostics {
  double p_i, p_x, p_y, p_z;
  double e_b, e_p;
  double n_prime;
  double p_con;
  int degenerate_parameters;
} qkd_bell_diagnostics;

/* Probability that a basis-matched signal gives a conclusive result, and the
 * joint probability of a conclusive wrong bit, by POVM enumeration. */
QKD_API qkd_status qkd_conclusive_probability(const qkd_params* params,
                                              const qkd_channel* channel, double* p_con,
                                              double* p_con_error);

/* Bell projections of the numerically built state. rho_out (32 doubles, unit
 * trace) may be NULL. */
QKD_API qkd_status qkd_edp_numerical(const qkd_params* params, const qkd_channel* channel,
                                     qkd_bell_diagnostics* out, double* rho_out);
/* Same quantities from the Pauli coefficients of the channel. */
QKD_API qkd_status qkd_edp_closed_form(const qkd_params* params, const qkd_channel* channel,
                                       qkd_bell_diagnostics* out);

/* Averaged signal operator by direct summation, and its closed form. */
QKD_API qkd_status qkd_phi_operator(const qkd_params* params, double* out32);
QKD_API qkd_status qkd_phi_closed_form(const qkd_params* params, double* out32);

typedef struct qkd_spherical_average {
  double mean_cos_sq;
  double mean_sin_sq;
  double mean_cos_sin;
  double rotation_sum_max_abs;
} qkd_spherical_average;

QKD_API qkd_status qkd_spherical_average_check(int num_bases, qkd_spherical_average* out);

/* ---- analysis ---------------------------------------------------------- */

typedef enum qkd_relation_kind { QKD_RELATION_EQUALITY = 0, QKD_RELATION_UPPER_BOUND = 1 } qkd_relation_kind;

typedef struct qkd_error_relation {
  double slope;
  qkd_relation_kind kind;
} qkd_error_relation;

QKD_API qkd_status qkd_error_relation_get(const qkd_params* params, qkd_error_relation* out);

typedef struct qkd_m2_bound {
  double e_p_max;
  double maximizer_ai2;
  double maximizer_ax2;
  double a;
  double b;
  int feasible;
} qkd_m2_bound;

QKD_API qkd_status qkd_m2_bound_solve(double theta, double e_b, qkd_m2_bound* out);
QKD_API qkd_status qkd_m2_bound_oracle(double theta, double e_b, double grid_step, double* out);

QKD_API qkd_status qkd_entropy_h2(double p, double* out);
QKD_API qkd_status qkd_entropy_h4(const double x[4], double* out);

typedef enum qkd_lambda_mode { QKD_LAMBDA_ADMISSIBLE_RANGE = 0, QKD_LAMBDA_PESSIMISTIC = 1 } qkd_lambda_mode;

QKD_API qkd_status qkd_lambda_worst_case(const qkd_params* params, qkd_lambda_mode mode,
                                         double e_b, double e_p, double* lambda_min,
                                         double* lambda_max, double* lambda_worst);

typedef struct qkd_key_rate_report {
  double e_b, e_p;
  double lambda_min, lambda_max, lambda_worst;
  double bracket_shor_preskill, bracket_h4;
  double rate_shor_preskill, rate_h4;
  double p_con;
  double sift_factor;
  int abort_recommended;
} qkd_key_rate_report;

QKD_API qkd_status qkd_key_rate(const qkd_params* params, qkd_lambda_mode mode, double e_b,
                                double p_con, qkd_key_rate_report* out);

/* ---- Monte Carlo ------------------------------------------------------- */

typedef struct qkd_sim_config {
  uint64_t n;
  uint64_t seed;
  double test_fraction; /* [0, 1) */
  unsigned threads;     /* 0: implementation default */
} qkd_sim_config;

typedef struct qkd_transcript_stats {
  uint64_t n_total;
  uint64_t n_basis_matched;
  uint64_t n_conclusive;
  uint64_t n_conclusive_errors;
  uint64_t n_test;
  uint64_t n_test_errors;
  uint64_t key_bits_remaining;
  double e_b_hat, e_b_hat_std_error;
  double p_con_hat, p_con_hat_std_error;
  int test_sample_warning;
} qkd_transcript_stats;

typedef struct qkd_sim_comparison {
  qkd_transcript_stats stats;
  double e_b_analytic;
  double p_con_analytic;
  double z_e_b;
  double z_p_con;
  double z_sifting;
} qkd_sim_comparison;

QKD_API qkd_status qkd_simulate(const qkd_params* params, const qkd_channel* channel,
                                const qkd_sim_config* config, qkd_transcript_stats* out);
QKD_API qkd_status qkd_estimate_vs_analytic(const qkd_params* params, const qkd_channel* channel,
                                            const qkd_sim_config* config, qkd_sim_comparison* out);

/* ---- property suites ----------------------------------------------------- */

typedef struct qkd_verify_report qkd_verify_report;

QKD_API qkd_status qkd_verify_run(int trials, uint64_t seed, qkd_verify_report** out);
QKD_API void qkd_verify_report_free(qkd_verify_report* report);
QKD_API size_t qkd_verify_count(const qkd_verify_report* report);
/* 1 when every suite passed. */
QKD_API int qkd_verify_all_passed(const qkd_verify_report* report);
/* Strings stay valid while the report lives. failure is "" for passing suites. */
QKD_API qkd_status qkd_verify_suite(const qkd_verify_report* report, size_t index,
                                    const char** name, int* passed, double* max_deviation,
                                    double* tolerance, const char** failure);

#ifdef __cplusplus
}
#endif

#endif
