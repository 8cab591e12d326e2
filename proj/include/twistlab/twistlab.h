#ifndef TWISTLAB_H
#define TWISTLAB_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define TWL_API __declspec(dllexport)
#else
#define TWL_API __attribute__((visibility("default")))
#endif

#define TWL_API_VERSION 1

typedef enum twl_status {
    TWL_OK = 0,
    TWL_E_INVALID_ARGUMENT = 1,
    TWL_E_DOMAIN = 2,
    TWL_E_RESOURCE = 3,
    TWL_E_CONTRACT = 4,
    TWL_E_PRECISION = 5,
    TWL_E_INCONSISTENT = 6,
    TWL_E_UNKNOWN_FORM = 7,
    TWL_E_IO = 8,
    TWL_E_INTERNAL = 9
} twl_status;

typedef enum twl_format { TWL_FORMAT_TEXT = 0, TWL_FORMAT_JSON = 1 } twl_format;

typedef struct twl_session twl_session;

typedef struct twl_config {
    unsigned threads;         /* 0: hardware count */
    const char* cache_dir;    /* NULL or "": no file cache */
    uint64_t memory_budget;   /* bytes */
    double delta;             /* bump transition width */
    uint64_t prime_limit;     /* Euler products run over p <= prime_limit */
    double sample_rate;       /* (0, 1] */
    uint64_t sample_seed;
    int fail_fast;            /* nonzero: first member failure aborts a moment */
} twl_config;

typedef struct twl_form_info {
    int kappa;
    uint64_t level;
    int eta;          /* inferred */
    int root_number;  /* i^kappa eta */
    double eta_residual;
    double eta_rejected_residual;
} twl_form_info;

enum {
    TWL_LV_DERIV = 1,
    TWL_LV_UNTWISTED = 2,
    TWL_LV_CHECK_Z = 4
};

typedef struct twl_lvalue {
    uint64_t d;
    uint64_t D;
    int untwisted;
    int root_number;
    double Z;
    double value;
    double abs_terms;
    uint64_t length;
    int checked;
    double Z_other;
    double value_other;
    double z_difference;
} twl_lvalue;

TWL_API int twl_api_version(void);
TWL_API const char* twl_status_name(twl_status status);
TWL_API void twl_config_default(twl_config* config);

TWL_API twl_status twl_session_create(const twl_config* config, twl_session** out);
TWL_API void twl_session_destroy(twl_session* session);
/* Message for the last failing call on this session; valid until the next call. */
TWL_API const char* twl_last_error(const twl_session* session);
/* Message for a failed twl_session_create. */
TWL_API const char* twl_create_error(void);

/* Comma-separated registry labels. Static storage. */
TWL_API const char* twl_registry_labels(void);
TWL_API twl_status twl_form_info_get(twl_session* session, const char* label, twl_form_info* out);

/* kind: "second", "mixed" (label2 required) or "first". */
TWL_API twl_status twl_constants(twl_session* session, const char* kind, const char* label, const char* label2,
                                 twl_format format, char** out);

TWL_API twl_status twl_lvalue_eval(twl_session* session, const char* label, uint64_t d, double Z, int flags,
                                   twl_lvalue* out);

/* One JSON object per line in *jsonl, CSV with a header row in *csv. Either
   output pointer may be NULL. runtime_seconds is left out when
   include_runtime is 0. */
TWL_API twl_status twl_moment(twl_session* session, const char* kind, const char* label, const char* label2,
                              const double* xgrid, size_t count, int include_runtime, char** jsonl, char** csv);

/* suite: "gauss", "poisson" or "afe" (label required). *passed is 1 iff every check passed. */
TWL_API twl_status twl_verify(twl_session* session, const char* suite, const char* label, twl_format format,
                              char** out, int* passed);

/* One line per cached table: label, n_max, bytes, path (tab separated). */
TWL_API twl_status twl_cache_list(twl_session* session, char** out);
TWL_API twl_status twl_cache_clear(twl_session* session, size_t* removed);
TWL_API twl_status twl_cache_warm(twl_session* session, const char* label, uint64_t n_max, char** path);

TWL_API void twl_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif
