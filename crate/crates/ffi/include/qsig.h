#ifndef QSIG_H
#define QSIG_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QsigStatus {
  QSIG_STATUS_OK = 0,
  QSIG_STATUS_DIMENSION = 1,
  QSIG_STATUS_PARAMETER = 2,
  QSIG_STATUS_INSECURE = 3,
  QSIG_STATUS_DOMAIN = 4,
  QSIG_STATUS_RESOURCE = 5,
  QSIG_STATUS_DEGENERATE = 6,
  QSIG_STATUS_USAGE = 7,
  QSIG_STATUS_SWEEP = 8,
  QSIG_STATUS_NULL_POINTER = 9,
  QSIG_STATUS_INTERNAL = 10,
} QsigStatus;

typedef enum QsigScenario {
  QSIG_SCENARIO_GENUINE = 0,
  QSIG_SCENARIO_FORGERY = 1,
  QSIG_SCENARIO_TUNED_REPUDIATION = 2,
} QsigScenario;

typedef enum QsigEngine {
  QSIG_ENGINE_AGGREGATE = 0,
  QSIG_ENGINE_FULL = 1,
} QsigEngine;

// Derived scheme parameters.
typedef struct QsigParams QsigParams;

// Result of a Monte Carlo campaign.
typedef struct QsigTrialReport QsigTrialReport;

typedef struct QsigFigures {
  double g;
  double j;
  double gap;
  double p1;
  double qubits_per_bit;
  double qubits_per_bit_asymptotic;
  double repudiation_bound;
} QsigFigures;

typedef struct QsigTrialSummary {
  uint64_t trials;
  uint64_t mismatched;
  double q_reject;
  double q_reject_se;
  double q_zero;
  double q_zero_se;
  double q_one;
  double q_one_se;
  uint64_t rej;
  uint64_t acc0;
  uint64_t acc1;
  double repudiation;
  double repudiation_se;
  double mean_tally;
  double mean_tally_se;
} QsigTrialSummary;

typedef struct QsigRepudiation {
  double exact;
  double bound_pow;
  double bound_lin;
} QsigRepudiation;

typedef struct QsigConjectureResult {
  bool holds;
  uint64_t largest_checked;
  // Counterexample `(x, r)`; zero when the conjecture holds.
  uint64_t x;
  uint64_t r;
} QsigConjectureResult;

typedef struct QsigGcReport {
  double delta;
  double embedded_len;
  double p_forge1;
  double j_gc;
  uint64_t d_min_solved;
  uint64_t d_min_approx;
  double n_min;
  double qubits_per_bit;
} QsigGcReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copies the calling thread's last error message into `buf` (NUL
// terminated, truncated to `cap`) and returns the full message length
// excluding the terminator. Returns 0 when there is no error.
size_t qsig_last_error_message(char *buf, size_t cap);

// Derives secure parameters; on success `*out` owns a new handle.
enum QsigStatus qsig_params_new(double alpha,
                                uint64_t d,
                                uint32_t verifiers,
                                double nu,
                                double eps_c,
                                double eps_f,
                                bool include_correction,
                                struct QsigParams **out_params);

// Parameters with a user-chosen synthetic code and thresholds, for simulation.
enum QsigStatus qsig_params_custom(double alpha,
                                   uint64_t d,
                                   uint32_t verifiers,
                                   uint64_t codeword_len,
                                   double theta,
                                   uint64_t z_acc,
                                   uint64_t z_rej,
                                   struct QsigParams **out_params);

// Releases a handle from `qsig_params_new`; null is ignored.
void qsig_params_free(struct QsigParams *params);

// Returns 0 for a null handle.
uint64_t qsig_params_codeword_len(const struct QsigParams *params);

// Returns 0 for a null handle.
uint64_t qsig_params_message_len(const struct QsigParams *params);

// Returns 0 for a null handle.
uint64_t qsig_params_alphabet_size(const struct QsigParams *params);

// Returns 0 for a null handle.
uint64_t qsig_params_revealed(const struct QsigParams *params);

// Returns 0 for a null handle.
uint64_t qsig_params_z_acc(const struct QsigParams *params);

// Returns 0 for a null handle.
uint64_t qsig_params_z_rej(const struct QsigParams *params);

// Returns 0 for a null handle.
double qsig_params_theta(const struct QsigParams *params);

// Returns 0 for a null handle.
double qsig_params_p1(const struct QsigParams *params);

// Returns 0 for a null handle.
double qsig_params_gap(const struct QsigParams *params);

// Returns 0 for a null handle.
double qsig_params_phi(const struct QsigParams *params);

enum QsigStatus qsig_params_figures(const struct QsigParams *params,
                                    struct QsigFigures *out_figures);

// Lower bound on the probability that a forgery is rejected.
enum QsigStatus qsig_params_forgery_reject_bound(const struct QsigParams *params,
                                                 double *out_value);

// Runs `trials` trials. `forged_positions < 0` selects `round(2 theta N)`.
enum QsigStatus qsig_simulate(const struct QsigParams *params,
                              enum QsigScenario scenario,
                              int64_t forged_positions,
                              uint64_t trials,
                              enum QsigEngine engine,
                              uint64_t seed,
                              struct QsigTrialReport **out_report);

void qsig_report_free(struct QsigTrialReport *report);

enum QsigStatus qsig_report_summary(const struct QsigTrialReport *report,
                                    struct QsigTrialSummary *out_summary);

// Number of distinct tally values in the histogram; 0 for a null handle.
size_t qsig_report_histogram_len(const struct QsigTrialReport *report);

// Writes up to `cap` `(tally, count)` pairs in increasing tally order and
// stores the number written in `*out_written`.
enum QsigStatus qsig_report_histogram(const struct QsigTrialReport *report,
                                      uint64_t *tallies,
                                      uint64_t *counts,
                                      size_t cap,
                                      size_t *out_written);

// `1 - 2|x xor y|/d` for two strings of `d` bits given one byte per bit.
enum QsigStatus qsig_inner_product(const uint8_t *x, const uint8_t *y, size_t d, double *out_value);

// Single-position acceptance probability `(l - 2w)^2 / (l d)`.
enum QsigStatus qsig_accept_probability(size_t revealed, size_t d, size_t w, double *out_value);

enum QsigStatus qsig_p1_bound(double alpha,
                              uint64_t d,
                              uint32_t verifiers,
                              double *out_p1,
                              double *out_gap);

enum QsigStatus qsig_binary_entropy(double p, double *out_value);

enum QsigStatus qsig_entropy_inverse(double y, double *out_value);

enum QsigStatus qsig_repudiation_probability(double q_reject,
                                             double q_zero,
                                             double q_one,
                                             uint32_t verifiers,
                                             struct QsigRepudiation *out_value);

// `Pr[Binomial(n, g) <= z_acc]`.
enum QsigStatus qsig_genuine_accept_probability(uint64_t n,
                                                double g,
                                                uint64_t z_acc,
                                                double *out_value);

// Exact monotonicity check for every `x <= x_max`.
enum QsigStatus qsig_check_conjecture(uint64_t x_max, struct QsigConjectureResult *out_result);

enum QsigStatus qsig_gc_report(uint64_t d,
                               double gamma,
                               double beta,
                               uint32_t verifiers,
                               bool reuse,
                               double qr_target,
                               struct QsigGcReport *out_report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QSIG_H */
