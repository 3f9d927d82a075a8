#ifndef LRNORM_LRNORM_H
#define LRNORM_LRNORM_H

#if defined(_WIN32)
#if defined(LRNORM_BUILDING_LIBRARY)
#define LRN_API __declspec(dllexport)
#else
#define LRN_API __declspec(dllimport)
#endif
#else
#define LRN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lrn_status {
  LRN_OK = 0,
  LRN_ERR_PARAMETER = 1,
  LRN_ERR_NUMERICAL = 2,
  LRN_ERR_INVARIANT = 3,
  LRN_ERR_INTERNAL = 4
} lrn_status;

/* Flat key=value request. Keys are the CLI flag names of each operation. */
typedef struct lrn_request lrn_request;
/* Result of one operation: a JSON document plus the files it writes. */
typedef struct lrn_result lrn_result;

LRN_API const char* lrn_version(void);

/* Message of the last failure on the calling thread ("" if none). */
LRN_API const char* lrn_last_error(void);

LRN_API lrn_request* lrn_request_new(void);
LRN_API void lrn_request_free(lrn_request* req);
LRN_API lrn_status lrn_request_set(lrn_request* req, const char* key, const char* value);
/* NULL when the key is unset. The pointer stays valid until the key changes. */
LRN_API const char* lrn_request_get(const lrn_request* req, const char* key);
/* Merges a key=value file ('#' comments); later calls and lrn_request_set win. */
LRN_API lrn_status lrn_request_load_file(lrn_request* req, const char* path);
/* Copies LRNORM_SEED, when set, into the "seed" key. */
LRN_API lrn_status lrn_request_apply_environment(lrn_request* req);

/* Operations. On success *out owns a new result; on failure *out is NULL. */
LRN_API lrn_status lrn_approx(const lrn_request* req, lrn_result** out);
LRN_API lrn_status lrn_hermite(const lrn_request* req, lrn_result** out);
LRN_API lrn_status lrn_kernel(const lrn_request* req, lrn_result** out);
LRN_API lrn_status lrn_simulate(const lrn_request* req, lrn_result** out);
LRN_API lrn_status lrn_estimate(const lrn_request* req, lrn_result** out);
LRN_API lrn_status lrn_adapt(const lrn_request* req, lrn_result** out);
LRN_API lrn_status lrn_rates(const lrn_request* req, lrn_result** out);
LRN_API lrn_status lrn_lowerbound(const lrn_request* req, lrn_result** out);
/* Succeeds even when checks fail; see lrn_result_passed. */
LRN_API lrn_status lrn_invariants(const lrn_request* req, lrn_result** out);

/* Dispatches on an operation name ("approx", "rates", ...). */
LRN_API lrn_status lrn_run(const char* operation, const lrn_request* req, lrn_result** out);

LRN_API const char* lrn_result_json(const lrn_result* res);
/* 0 when the result reports a failed check (invariants), else 1. */
LRN_API int lrn_result_passed(const lrn_result* res);
LRN_API int lrn_result_file_count(const lrn_result* res);
LRN_API const char* lrn_result_file_name(const lrn_result* res, int index);
LRN_API const char* lrn_result_file_contents(const lrn_result* res, int index);
/* Writes every file of the result into dir, creating it if needed. */
LRN_API lrn_status lrn_result_write(const lrn_result* res, const char* dir);
LRN_API void lrn_result_free(lrn_result* res);

#ifdef __cplusplus
}
#endif

#endif
