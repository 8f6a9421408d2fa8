#include "fusedlink.h"

#include <string>

#include "core/pipeline.hpp"

using fel::Error;
using fel::ErrorCode;

struct fel_config {
  fel::cfg::RunConfig impl;
  mutable std::string last_get;
};

namespace {

thread_local std::string g_last_error;

fel_status classify(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConfigError:
    case ErrorCode::IoError:
    case ErrorCode::MalformedRecord:
    case ErrorCode::DuplicateTitle:
    case ErrorCode::EmptyTitle:
    case ErrorCode::EmptyDataset:
    case ErrorCode::EmptyCorpus:
    case ErrorCode::InvalidWindow:
    case ErrorCode::OutOfRange:
      return FEL_INVALID;
    default:
      return FEL_RUNTIME;
  }
}

template <typename Fn>
fel_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return FEL_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return classify(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return FEL_RUNTIME;
  }
}

}  // namespace

extern "C" {

fel_config* fel_config_new(void) { return new fel_config(); }

void fel_config_free(fel_config* cfg) { delete cfg; }

fel_status fel_config_load(fel_config* cfg, const char* path) {
  if (!cfg || !path) {
    g_last_error = "null argument";
    return FEL_INVALID;
  }
  return guarded([&] { cfg->impl = fel::cfg::RunConfig::load(path); });
}

fel_status fel_config_set(fel_config* cfg, const char* key, const char* value) {
  if (!cfg || !key || !value) {
    g_last_error = "null argument";
    return FEL_INVALID;
  }
  cfg->impl.set(key, value);
  return FEL_OK;
}

const char* fel_config_get(const fel_config* cfg, const char* key) {
  if (!cfg || !key) return nullptr;
  auto v = cfg->impl.get(key);
  if (!v) return nullptr;
  cfg->last_get = *v;
  return cfg->last_get.c_str();
}

#define FEL_DEFINE_RUN(name)                                     \
  fel_status fel_run_##name(const fel_config* cfg) {             \
    if (!cfg) {                                                  \
      g_last_error = "null config";                              \
      return FEL_INVALID;                                        \
    }                                                            \
    return guarded([&] { fel::pipeline::run_##name(cfg->impl); }); \
  }

FEL_DEFINE_RUN(ingest)
FEL_DEFINE_RUN(build_index)
FEL_DEFINE_RUN(train_retriever)
FEL_DEFINE_RUN(train_reader)
FEL_DEFINE_RUN(disambiguate)
FEL_DEFINE_RUN(link)
FEL_DEFINE_RUN(evaluate)

#undef FEL_DEFINE_RUN

fel_status fel_run_gradcheck(const fel_config* cfg, double* max_rel_error) {
  if (!cfg || !max_rel_error) {
    g_last_error = "null argument";
    return FEL_INVALID;
  }
  return guarded(
      [&] { *max_rel_error = fel::pipeline::run_gradcheck(cfg->impl); });
}

const char* fel_last_error(void) { return g_last_error.c_str(); }

const char* fel_version(void) { return "0.1.0"; }

}  // extern "C"
