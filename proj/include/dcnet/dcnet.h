/* C interface to the dcnet library. All functions are safe to call from C;
 * none of them throw. Strings returned through char** are owned by the caller
 * and must be released with dcnet_string_free. */
#ifndef DCNET_DCNET_H
#define DCNET_DCNET_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define DCNET_API __declspec(dllexport)
#else
#define DCNET_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dcnet_status {
  DCNET_OK = 0,
  DCNET_ERR_ALGEBRAIC_LOOP = 1,
  DCNET_ERR_POLE_ON_GRID = 2,
  DCNET_ERR_UNSTABLE = 3,
  DCNET_ERR_ORDER_TOO_LARGE = 4,
  DCNET_ERR_CLOSURE_MISMATCH = 5,
  DCNET_ERR_UNSTABLE_LOOP = 6,
  DCNET_ERR_SHARE_SUM_VIOLATION = 7,
  DCNET_ERR_NUMERICAL_BLOWUP = 8,
  DCNET_ERR_CONFIG = 9,
  DCNET_ERR_WINDOW_TOO_SHORT = 10,
  DCNET_ERR_PARSE = 11,
  DCNET_ERR_VALIDATION = 12,
  DCNET_ERR_IO = 13,
  DCNET_ERR_INVALID_ARGUMENT = 14,
  DCNET_ERR_INTERNAL = 99
} dcnet_status;

typedef enum dcnet_mode { DCNET_MODE_CENTRALIZED = 0, DCNET_MODE_DECENTRALIZED = 1 } dcnet_mode;

typedef struct dcnet_scenario dcnet_scenario;

DCNET_API const char* dcnet_version(void);
DCNET_API const char* dcnet_status_name(dcnet_status status);
/* Message of the last failure on the calling thread, "" if none. */
DCNET_API const char* dcnet_last_error(void);
DCNET_API void dcnet_string_free(char* s);

DCNET_API dcnet_status dcnet_scenario_load(const char* path, dcnet_scenario** out);
/* base_dir resolves a relative PV trace path; NULL means ".". */
DCNET_API dcnet_status dcnet_scenario_parse(const char* text, const char* base_dir, dcnet_scenario** out);
DCNET_API void dcnet_scenario_free(dcnet_scenario* sc);
DCNET_API dcnet_status dcnet_scenario_serialize(const dcnet_scenario* sc, char** out);
DCNET_API dcnet_status dcnet_scenario_converters(const dcnet_scenario* sc, size_t* count);

DCNET_API dcnet_status dcnet_scenario_set_mode(dcnet_scenario* sc, dcnet_mode mode);
DCNET_API dcnet_status dcnet_scenario_set_iref(dcnet_scenario* sc, double iref);
DCNET_API dcnet_status dcnet_scenario_set_dt(dcnet_scenario* sc, double dt);
DCNET_API dcnet_status dcnet_scenario_set_seed(dcnet_scenario* sc, uint64_t seed);
DCNET_API dcnet_status dcnet_scenario_set_horizon(dcnet_scenario* sc, double horizon);

/* Frequency-domain checks. *passed is set to 1 when every check passed. */
DCNET_API dcnet_status dcnet_verify(const dcnet_scenario* sc, char** report, int* passed);
/* Analysis plus simulation; writes trace.csv, metrics.json, bode.csv and
 * report.txt into out_dir. */
DCNET_API dcnet_status dcnet_run(const dcnet_scenario* sc, const char* out_dir, char** report, int* passed);

/* Newline-separated preset names (built-in, then DCNET_PRESET_DIR). */
DCNET_API dcnet_status dcnet_presets_list(char** names);

/* H-infinity norm of a stable proper transfer function given by coefficient
 * lists, highest power first. */
DCNET_API dcnet_status dcnet_hinf_norm(const double* num, size_t num_len, const double* den, size_t den_len,
                                       double* norm);

#ifdef __cplusplus
}
#endif

#endif /* DCNET_DCNET_H */
