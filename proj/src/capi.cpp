// Copyright 2026 The DaoEval Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "daoeval/daoeval.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <mutex>
#include <new>
#include <string>

#include "daoeval/codec.hpp"
#include "daoeval/config.hpp"
#include "daoeval/dataset.hpp"
#include "daoeval/diagnostics.hpp"
#include "daoeval/error.hpp"
#include "daoeval/pipeline.hpp"
#include "daoeval/store.hpp"

#ifndef DAOEVAL_VERSION_STRING
#define DAOEVAL_VERSION_STRING "0.1.0"
#endif

struct daoeval_context {
  daoeval::RunConfig config;
  daoeval::Diagnostics diag;
  std::string last_error;

  std::mutex log_mu;
  daoeval_log_fn log_fn = nullptr;
  void* log_user = nullptr;

  daoeval_context()
      : diag([this](const std::string& line) {
          std::lock_guard<std::mutex> lock(log_mu);
          if (log_fn) log_fn(line.c_str(), log_user);
        }) {}
};

struct daoeval_dataset {
  daoeval::Dataset data;
  std::unique_ptr<daoeval::DatasetIndex> index;
  std::string last_error;
};

namespace {

thread_local std::string g_last_error;

daoeval_status status_for(daoeval::ErrorCode code) {
  using daoeval::ErrorCode;
  switch (code) {
    case ErrorCode::kConfigError:
    case ErrorCode::kSpecError:
      return DAOEVAL_ERR_CONFIG;
    case ErrorCode::kSourceUnavailable:
    case ErrorCode::kSourceProtocolError:
      return DAOEVAL_ERR_SOURCE;
    case ErrorCode::kCoverageError:
    case ErrorCode::kEmptyEvaluation:
      return DAOEVAL_ERR_COVERAGE;
    case ErrorCode::kInvalidArgument:
      return DAOEVAL_ERR_INVALID_ARGUMENT;
    case ErrorCode::kNotFound:
      return DAOEVAL_ERR_NOT_FOUND;
    case ErrorCode::kIoError:
      return DAOEVAL_ERR_IO;
    case ErrorCode::kPolicyInapplicable:
    case ErrorCode::kPolicyFailure:
      return DAOEVAL_ERR_POLICY;
    case ErrorCode::kInvalidProposal:
    case ErrorCode::kInvalidChoice:
    case ErrorCode::kInvalidRecord:
    case ErrorCode::kEmptyTally:
    case ErrorCode::kDegenerateTally:
    case ErrorCode::kDegenerateSeries:
    case ErrorCode::kDegenerateBaseline:
    case ErrorCode::kNoData:
    case ErrorCode::kLoadError:
      return DAOEVAL_ERR_DATA;
  }
  return DAOEVAL_ERR_INTERNAL;
}

// Runs fn, translating exceptions into a status and a message.
template <typename Fn>
daoeval_status guarded(std::string& error_slot, Fn&& fn) {
  try {
    fn();
    error_slot.clear();
    return DAOEVAL_OK;
  } catch (const daoeval::Error& e) {
    error_slot = std::string(daoeval::ErrorCodeName(e.code())) + ": " + e.what();
    return status_for(e.code());
  } catch (const std::bad_alloc&) {
    error_slot = "out of memory";
    return DAOEVAL_ERR_INTERNAL;
  } catch (const std::filesystem::filesystem_error& e) {
    error_slot = std::string("IoError: ") + e.what();
    return DAOEVAL_ERR_IO;
  } catch (const std::exception& e) {
    error_slot = std::string("internal error: ") + e.what();
    return DAOEVAL_ERR_INTERNAL;
  } catch (...) {
    error_slot = "internal error: unknown exception";
    return DAOEVAL_ERR_INTERNAL;
  }
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* daoeval_version(void) { return DAOEVAL_VERSION_STRING; }

const char* daoeval_status_string(daoeval_status status) {
  switch (status) {
    case DAOEVAL_OK: return "ok";
    case DAOEVAL_ERR_INVALID_ARGUMENT: return "invalid argument";
    case DAOEVAL_ERR_CONFIG: return "configuration error";
    case DAOEVAL_ERR_SOURCE: return "upstream source failure";
    case DAOEVAL_ERR_COVERAGE: return "incomplete evaluation coverage";
    case DAOEVAL_ERR_DATA: return "invalid data";
    case DAOEVAL_ERR_IO: return "i/o error";
    case DAOEVAL_ERR_POLICY: return "policy error";
    case DAOEVAL_ERR_NOT_FOUND: return "not found";
    case DAOEVAL_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

int daoeval_exit_code(daoeval_status status) {
  switch (status) {
    case DAOEVAL_OK: return 0;
    case DAOEVAL_ERR_CONFIG: return 2;
    case DAOEVAL_ERR_SOURCE: return 3;
    case DAOEVAL_ERR_COVERAGE: return 4;
    default: return 1;
  }
}

void daoeval_string_free(char* str) { std::free(str); }

daoeval_status daoeval_create(const char* config_json, const char* base_dir,
                              daoeval_context** out) {
  if (!out) {
    g_last_error = "daoeval_create: out must not be NULL";
    return DAOEVAL_ERR_INVALID_ARGUMENT;
  }
  *out = nullptr;
  if (!config_json) {
    g_last_error = "daoeval_create: config_json must not be NULL";
    return DAOEVAL_ERR_INVALID_ARGUMENT;
  }
  daoeval_context* ctx = nullptr;
  const daoeval_status st = guarded(g_last_error, [&] {
    daoeval::Json doc;
    try {
      doc = daoeval::Json::parse(config_json);
    } catch (const daoeval::Json::exception& e) {
      throw daoeval::Error(daoeval::ErrorCode::kConfigError,
                           std::string("config is not valid JSON: ") + e.what());
    }
    const std::filesystem::path base =
        base_dir && *base_dir ? std::filesystem::path(base_dir) : std::filesystem::current_path();
    auto config = daoeval::parse_run_config(doc, base);
    ctx = new daoeval_context();
    ctx->config = std::move(config);
  });
  if (st == DAOEVAL_OK) *out = ctx;
  return st;
}

void daoeval_destroy(daoeval_context* ctx) { delete ctx; }

const char* daoeval_last_error(const daoeval_context* ctx) {
  return ctx ? ctx->last_error.c_str() : g_last_error.c_str();
}

void daoeval_set_log_callback(daoeval_context* ctx, daoeval_log_fn fn, void* user_data) {
  if (!ctx) return;
  std::lock_guard<std::mutex> lock(ctx->log_mu);
  ctx->log_fn = fn;
  ctx->log_user = user_data;
}

daoeval_status daoeval_run(daoeval_context* ctx, const char* command) {
  if (!ctx) {
    g_last_error = "daoeval_run: ctx must not be NULL";
    return DAOEVAL_ERR_INVALID_ARGUMENT;
  }
  if (!command) {
    ctx->last_error = "daoeval_run: command must not be NULL";
    return DAOEVAL_ERR_INVALID_ARGUMENT;
  }
  return guarded(ctx->last_error, [&] {
    daoeval::Pipeline pipeline(ctx->config, ctx->diag);
    pipeline.run(daoeval::parse_command(command));
  });
}

daoeval_status daoeval_counters_json(const daoeval_context* ctx, char** out) {
  if (!ctx || !out) {
    g_last_error = "daoeval_counters_json: NULL argument";
    return DAOEVAL_ERR_INVALID_ARGUMENT;
  }
  *out = nullptr;
  return guarded(g_last_error, [&] {
    daoeval::Json j = daoeval::Json::object();
    for (const auto& [name, count] : ctx->diag.Snapshot()) j[name] = count;
    *out = copy_string(j.dump());
  });
}

daoeval_status daoeval_dataset_open(const char* root, daoeval_dataset** out) {
  if (!root || !out) {
    g_last_error = "daoeval_dataset_open: NULL argument";
    return DAOEVAL_ERR_INVALID_ARGUMENT;
  }
  *out = nullptr;
  daoeval_dataset* ds = nullptr;
  const daoeval_status st = guarded(g_last_error, [&] {
    auto holder = std::make_unique<daoeval_dataset>();
    holder->data = daoeval::DatasetStore(root).load();
    holder->index = std::make_unique<daoeval::DatasetIndex>(holder->data);
    ds = holder.release();
  });
  if (st == DAOEVAL_OK) *out = ds;
  return st;
}

void daoeval_dataset_close(daoeval_dataset* ds) { delete ds; }

const char* daoeval_dataset_last_error(const daoeval_dataset* ds) {
  return ds ? ds->last_error.c_str() : g_last_error.c_str();
}

size_t daoeval_dataset_proposal_count(const daoeval_dataset* ds) {
  return ds ? ds->data.proposals.size() : 0;
}

const char* daoeval_dataset_proposal_id(const daoeval_dataset* ds, size_t i) {
  if (!ds || i >= ds->data.proposals.size()) return nullptr;
  return ds->data.proposals[i].id.c_str();
}

daoeval_status daoeval_dataset_outcome_json(daoeval_dataset* ds, const char* proposal_id,
                                            char** out) {
  if (!ds || !proposal_id || !out) {
    g_last_error = "daoeval_dataset_outcome_json: NULL argument";
    return DAOEVAL_ERR_INVALID_ARGUMENT;
  }
  *out = nullptr;
  return guarded(ds->last_error, [&] {
    const daoeval::Proposal& p = ds->index->proposal(proposal_id);
    const auto outcome = daoeval::tally_outcome(p, ds->index->votes_for(proposal_id));
    daoeval::Json j;
    j["proposal_id"] = p.id;
    j["per_option_vp"] = outcome.per_option_vp;
    j["total_vp"] = outcome.total_vp;
    j["n_voters"] = outcome.n_voters;
    j["final_option"] = outcome.final_option + 1;
    j["final_choice"] = p.choices[outcome.final_option];
    j["tie"] = outcome.tie;
    *out = copy_string(j.dump());
  });
}

}  // extern "C"
