#include "cocyclelab/cocyclelab.h"

#include <string>

#include "cocyclelab/met.hpp"
#include "cocyclelab/random.hpp"
#include "cocyclelab/run.hpp"

using namespace cocyclelab;

struct ccl_config {
  RunConfig config;
  std::string text;
};

struct ccl_result {
  RunResult result;
};

struct ccl_base {
  BaseSystem base;
};

struct ccl_cocycle {
  BaseSystem base;
  CocyclePtr cocycle;
};

namespace {

thread_local std::string last_error;

template <class F>
ccl_status guarded(F&& f) {
  try {
    f();
    last_error.clear();
    return CCL_OK;
  } catch (const Error& e) {
    last_error = e.what();
    return static_cast<ccl_status>(e.code());
  } catch (const std::exception& e) {
    last_error = e.what();
    return CCL_INTERNAL;
  } catch (...) {
    last_error = "unknown exception";
    return CCL_INTERNAL;
  }
}

RunOptions options(const char* out_dir, uint64_t seed, int has_seed, unsigned threads) {
  RunOptions o;
  if (out_dir) o.out_dir = out_dir;
  if (has_seed) o.seed = seed;
  o.threads = threads == 0 ? 1 : threads;
  return o;
}

}  // namespace

const char* ccl_version(void) { return "0.1.0"; }

const char* ccl_status_name(ccl_status status) {
  // error_name returns views of string literals.
  return error_name(static_cast<ErrorCode>(status)).data();
}

const char* ccl_last_error(void) { return last_error.c_str(); }

ccl_status ccl_config_load(const char* path, ccl_config** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = new ccl_config{load_config(path), {}};
  });
}

ccl_status ccl_config_parse(const char* text, ccl_config** out) {
  return guarded([&] {
    require(text && out, "null argument");
    *out = new ccl_config{parse_config(text), {}};
  });
}

ccl_status ccl_config_set(ccl_config* cfg, const char* key, const char* value) {
  return guarded([&] {
    require(cfg && key && value, "null argument");
    set_config_value(cfg->config, key, value);
  });
}

const char* ccl_config_serialize(ccl_config* cfg) {
  if (!cfg) return nullptr;
  cfg->text = serialize_config(cfg->config);
  return cfg->text.c_str();
}

void ccl_config_free(ccl_config* cfg) { delete cfg; }

ccl_status ccl_run(const ccl_config* cfg, const char* out_dir, uint64_t seed, int has_seed, unsigned threads,
                   ccl_result** out) {
  return guarded([&] {
    require(cfg && out, "null argument");
    *out = new ccl_result{run_experiment(cfg->config, options(out_dir, seed, has_seed, threads))};
  });
}

ccl_status ccl_run_config(const char* path, const char* out_dir, uint64_t seed, int has_seed, unsigned threads,
                          ccl_result** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = new ccl_result{run_config_file(path, options(out_dir, seed, has_seed, threads))};
  });
}

int ccl_result_exit_code(const ccl_result* r) { return r ? r->result.exit_code : 2; }
ccl_status ccl_result_status(const ccl_result* r) {
  return r ? static_cast<ccl_status>(r->result.error) : CCL_INVALID_ARGUMENT;
}
const char* ccl_result_error_name(const ccl_result* r) {
  return r ? error_name(r->result.error).data() : error_name(ErrorCode::InvalidArgument).data();
}
const char* ccl_result_message(const ccl_result* r) { return r ? r->result.message.c_str() : ""; }
const char* ccl_result_summary(const ccl_result* r) { return r ? r->result.summary.c_str() : ""; }
void ccl_result_free(ccl_result* r) { delete r; }

ccl_status ccl_base_create(const char* kind, const double* params, size_t n_params, ccl_base** out) {
  return guarded([&] {
    require(kind && out && (params || n_params == 0), "null argument");
    RunConfig c;
    c.base = kind;
    c.base_params.assign(params, params + n_params);
    *out = new ccl_base{make_base(c)};
  });
}

void ccl_base_free(ccl_base* base) { delete base; }

ccl_status ccl_cocycle_create(const ccl_base* base, const char* name, const double* params, size_t n_params,
                              ccl_cocycle** out) {
  return guarded([&] {
    require(base && name && out && (params || n_params == 0), "null argument");
    RunConfig c;
    c.cocycle = name;
    c.cocycle_params.assign(params, params + n_params);
    *out = new ccl_cocycle{base->base, make_cocycle(c, base->base)};
  });
}

size_t ccl_cocycle_dimension(const ccl_cocycle* c) { return c ? c->cocycle->dimension() : 0; }

void ccl_cocycle_free(ccl_cocycle* c) { delete c; }

ccl_status ccl_lyapunov(const ccl_cocycle* c, uint64_t seed, int64_t steps, int64_t reorth, double* exponents,
                        size_t capacity) {
  return guarded([&] {
    require(c && exponents, "null argument");
    require(capacity >= c->cocycle->dimension(), "exponent buffer is smaller than the dimension");
    Rng rng = Rng(seed).substream("base");
    const BasePoint w = c->base.sample(rng);
    LyapunovOptions o;
    o.steps = steps;
    o.reorth = reorth;
    const auto s = lyapunov_exponents(*c->cocycle, c->base, w, o);
    for (std::size_t i = 0; i < s.raw.size(); ++i) exponents[i] = s.raw[i];
  });
}
