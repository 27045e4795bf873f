/*
 * Copyright 2026 The DaoEval Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * C interface to the daoeval library.
 *
 * All state lives behind opaque handles. Functions return a daoeval_status;
 * on failure the message is available from daoeval_last_error() on the
 * handle (or with NULL for failures that happen before a handle exists).
 * Strings returned through char** out-parameters are owned by the caller
 * and must be released with daoeval_string_free().
 */

#ifndef DAOEVAL_DAOEVAL_H_
#define DAOEVAL_DAOEVAL_H_

#include <stddef.h>

#if defined(_WIN32)
#define DAOEVAL_API __declspec(dllexport)
#elif defined(DAOEVAL_BUILDING_LIBRARY)
#define DAOEVAL_API __attribute__((visibility("default")))
#else
#define DAOEVAL_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum daoeval_status {
  DAOEVAL_OK = 0,
  DAOEVAL_ERR_INVALID_ARGUMENT = 1, /* bad pointer or argument to the API */
  DAOEVAL_ERR_CONFIG = 2,           /* configuration or scenario error */
  DAOEVAL_ERR_SOURCE = 3,           /* upstream service failed */
  DAOEVAL_ERR_COVERAGE = 4,         /* evaluation inputs incomplete */
  DAOEVAL_ERR_DATA = 5,             /* malformed or inconsistent records */
  DAOEVAL_ERR_IO = 6,
  DAOEVAL_ERR_POLICY = 7,
  DAOEVAL_ERR_NOT_FOUND = 8,
  DAOEVAL_ERR_INTERNAL = 9
} daoeval_status;

typedef struct daoeval_context daoeval_context;
typedef struct daoeval_dataset daoeval_dataset;

/* Receives one structured JSON log line per event. */
typedef void (*daoeval_log_fn)(const char* line, void* user_data);

DAOEVAL_API const char* daoeval_version(void);
DAOEVAL_API const char* daoeval_status_string(daoeval_status status);
/* Process exit code for a status: 0 ok, 2 config, 3 source, 4 coverage, 1 other. */
DAOEVAL_API int daoeval_exit_code(daoeval_status status);
DAOEVAL_API void daoeval_string_free(char* str);

/*
 * Creates a context from a JSON run configuration. Relative paths in the
 * configuration resolve against base_dir (NULL for the working directory).
 */
DAOEVAL_API daoeval_status daoeval_create(const char* config_json, const char* base_dir,
                                          daoeval_context** out);
DAOEVAL_API void daoeval_destroy(daoeval_context* ctx);
DAOEVAL_API const char* daoeval_last_error(const daoeval_context* ctx);

DAOEVAL_API void daoeval_set_log_callback(daoeval_context* ctx, daoeval_log_fn fn,
                                          void* user_data);

/* command: "ingest", "features", "simulate", "evaluate", "report" or "synth". */
DAOEVAL_API daoeval_status daoeval_run(daoeval_context* ctx, const char* command);

/* Warning counters accumulated by the context, as a JSON object. */
DAOEVAL_API daoeval_status daoeval_counters_json(const daoeval_context* ctx, char** out);

/* Read-only access to a stored dataset. */
DAOEVAL_API daoeval_status daoeval_dataset_open(const char* root, daoeval_dataset** out);
DAOEVAL_API void daoeval_dataset_close(daoeval_dataset* ds);
DAOEVAL_API const char* daoeval_dataset_last_error(const daoeval_dataset* ds);
DAOEVAL_API size_t daoeval_dataset_proposal_count(const daoeval_dataset* ds);
/* Id of the i-th proposal; valid until the dataset is closed. */
DAOEVAL_API const char* daoeval_dataset_proposal_id(const daoeval_dataset* ds, size_t i);
/* Realized tally of one proposal as JSON. */
DAOEVAL_API daoeval_status daoeval_dataset_outcome_json(daoeval_dataset* ds,
                                                        const char* proposal_id, char** out);

#ifdef __cplusplus
}
#endif

#endif /* DAOEVAL_DAOEVAL_H_ */
