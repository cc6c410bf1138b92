/* C interface to cocyclelab. All handles are opaque; functions return a
 * ccl_status and leave details in ccl_last_error(). */
#ifndef COCYCLELAB_H
#define COCYCLELAB_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
#define CCL_EXTERN extern "C"
#else
#define CCL_EXTERN
#endif

#if defined(_WIN32)
#ifdef CCL_BUILDING_LIB
#define CCL_API CCL_EXTERN __declspec(dllexport)
#else
#define CCL_API CCL_EXTERN __declspec(dllimport)
#endif
#else
#define CCL_API CCL_EXTERN __attribute__((visibility("default")))
#endif

/* Mirrors cocyclelab::ErrorCode. */
typedef enum ccl_status {
  CCL_OK = 0,
  CCL_INVALID_ARGUMENT = 1,
  CCL_CONFIG_ERROR = 2,
  CCL_IO_ERROR = 3,
  CCL_UNKNOWN_NAME = 4,
  CCL_INCOMPATIBLE_BASE = 5,
  CCL_NOT_APERIODIC = 6,
  CCL_HORIZON_EXHAUSTED = 7,
  CCL_EMPTY_TOWER = 8,
  CCL_SINGULAR_GENERATOR = 9,
  CCL_WINDOW_UNDERFLOW = 10,
  CCL_DEGENERATE = 11,
  CCL_ILL_CONDITIONED = 12,
  CCL_NOT_INVERTIBLE = 13,
  CCL_INCONCLUSIVE = 14,
  CCL_NOT_HYPERBOLIC = 15,
  CCL_UNSTABLE_NOT_INVERTIBLE = 16,
  CCL_VIOLATION = 17,
  CCL_WINDOW_TOO_SMALL = 18,
  CCL_TAIL_TOO_LARGE = 19,
  CCL_SINGULAR_SYSTEM = 20,
  CCL_NO_DECAY = 21,
  CCL_NO_CANDIDATE = 22,
  CCL_NOT_DEGENERATE = 23,
  CCL_RATIO_NOT_ACHIEVED = 24,
  CCL_BUDGET_VIOLATED = 25,
  CCL_NO_CONVERGENCE = 26,
  CCL_MISSING_ARTIFACT = 27,
  CCL_INTERNAL = 99
} ccl_status;

typedef struct ccl_config ccl_config;
typedef struct ccl_result ccl_result;
typedef struct ccl_base ccl_base;
typedef struct ccl_cocycle ccl_cocycle;

CCL_API const char* ccl_version(void);
CCL_API const char* ccl_status_name(ccl_status status);
/* Message of the last failure on the calling thread; empty after success. */
CCL_API const char* ccl_last_error(void);

CCL_API ccl_status ccl_config_load(const char* path, ccl_config** out);
CCL_API ccl_status ccl_config_parse(const char* text, ccl_config** out);
/* value is the JSON text of a config line, e.g. "[2, 0.5]". */
CCL_API ccl_status ccl_config_set(ccl_config* cfg, const char* key, const char* value);
/* Returned string is owned by cfg and valid until the next call on it. */
CCL_API const char* ccl_config_serialize(ccl_config* cfg);
CCL_API void ccl_config_free(ccl_config* cfg);

/* Runs the configured experiment into out_dir. The seed overrides the config
 * seed when has_seed is nonzero. *out is set even when the run fails. */
CCL_API ccl_status ccl_run(const ccl_config* cfg, const char* out_dir, uint64_t seed, int has_seed, unsigned threads,
                           ccl_result** out);
CCL_API ccl_status ccl_run_config(const char* path, const char* out_dir, uint64_t seed, int has_seed, unsigned threads,
                                  ccl_result** out);
/* 0 ok, 1 config error, 2 numerical failure. */
CCL_API int ccl_result_exit_code(const ccl_result* r);
CCL_API ccl_status ccl_result_status(const ccl_result* r);
CCL_API const char* ccl_result_error_name(const ccl_result* r);
CCL_API const char* ccl_result_message(const ccl_result* r);
CCL_API const char* ccl_result_summary(const ccl_result* r);
CCL_API void ccl_result_free(ccl_result* r);

/* kind: "rotation", "bernoulli" or "periodic"; params as in the config. */
CCL_API ccl_status ccl_base_create(const char* kind, const double* params, size_t n_params, ccl_base** out);
CCL_API void ccl_base_free(ccl_base* base);
/* Builtin cocycle by name over base. */
CCL_API ccl_status ccl_cocycle_create(const ccl_base* base, const char* name, const double* params, size_t n_params,
                                      ccl_cocycle** out);
CCL_API size_t ccl_cocycle_dimension(const ccl_cocycle* c);
CCL_API void ccl_cocycle_free(ccl_cocycle* c);

/* Lyapunov exponents with multiplicity (d values, descending) at a point
 * sampled from the base with the given seed. */
CCL_API ccl_status ccl_lyapunov(const ccl_cocycle* c, uint64_t seed, int64_t steps, int64_t reorth, double* exponents,
                                size_t capacity);

#endif
