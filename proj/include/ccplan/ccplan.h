#ifndef CCPLAN_CCPLAN_H
#define CCPLAN_CCPLAN_H

/* Chance-constrained collision probability bounds and motion planning.
 * Every function returning int yields one of the status codes below; on a
 * nonzero code the session keeps a message readable via ccplan_last_error. */

#include <stdint.h>

#if defined(_WIN32)
#define CCPLAN_API __declspec(dllexport)
#else
#define CCPLAN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

enum ccplan_status {
    CCPLAN_OK = 0,
    CCPLAN_ERR_RUNTIME = 1,
    CCPLAN_ERR_CONFIG = 2
};

enum ccplan_method {
    CCPLAN_METHOD_PA = 0,
    CCPLAN_METHOD_US1 = 1,
    CCPLAN_METHOD_US2 = 2
};

typedef struct ccplan_session ccplan_session;

/* Position mean and covariance, heading mean and variance, and the
 * rectangle half-length a and half-width b. */
typedef struct ccplan_belief {
    double x, y;
    double sxx, syy, sxy;
    double heading, heading_var;
    double a, b;
} ccplan_belief;

CCPLAN_API const char* ccplan_version(void);

/* Returns NULL only when memory is exhausted. */
CCPLAN_API ccplan_session* ccplan_session_new(void);
CCPLAN_API void ccplan_session_free(ccplan_session* s);

/* Message of the most recent failure, or "" when the last call succeeded. */
CCPLAN_API const char* ccplan_last_error(const ccplan_session* s);
/* JSON summary written by the most recent successful ccplan_run. */
CCPLAN_API const char* ccplan_last_summary(const ccplan_session* s);

/* Run settings; each persists for later ccplan_run calls. */
CCPLAN_API int ccplan_set_seed(ccplan_session* s, uint64_t seed);
CCPLAN_API int ccplan_clear_seed(ccplan_session* s);
CCPLAN_API int ccplan_set_workers(ccplan_session* s, int workers);
CCPLAN_API int ccplan_set_runs(ccplan_session* s, int runs);
/* mode: direct-pa, direct-us1, convex-pa or convex-us. */
CCPLAN_API int ccplan_set_mode(ccplan_session* s, const char* mode);
/* Baseline mode run on the same seeds for comparison; NULL or "" clears it. */
CCPLAN_API int ccplan_set_baseline(ccplan_session* s, const char* mode);
CCPLAN_API int ccplan_set_timing(ccplan_session* s, int enabled);

/* command: contours, conservatism, bbox or simulate. Reads the JSON config
 * and writes CSV and JSON results into out_dir (created if missing). */
CCPLAN_API int ccplan_run(ccplan_session* s, const char* command, const char* config_path,
                          const char* out_dir);

/* Analytic upper bound on the collision probability of two vehicles. */
CCPLAN_API int ccplan_prob_upper_bound(ccplan_session* s, const ccplan_belief* ego,
                                       const ccplan_belief* ov, int method, int n_phi,
                                       double* out);

/* Monte Carlo estimate of the same probability. */
CCPLAN_API int ccplan_monte_carlo_prob(ccplan_session* s, const ccplan_belief* ego,
                                       const ccplan_belief* ov, uint64_t samples, uint64_t seed,
                                       double* estimate, double* std_err);

#ifdef __cplusplus
}
#endif

#endif
