#include "specmode.h"

#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "analysis/chirp_fit.hpp"
#include "analysis/schmidt.hpp"
#include "core/errors.hpp"
#include "core/io.hpp"
#include "core/jsa.hpp"
#include "pipeline/config.hpp"
#include "pipeline/runner.hpp"

struct spm_config {
  spm::PipelineConfig value;
};

struct spm_jsa {
  spm::Jsa value;
};

namespace {

thread_local std::string g_last_error;

template <typename Fn>
spm_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return SPM_OK;
  } catch (const spm::ConfigError& e) {
    g_last_error = e.what();
    return SPM_ERR_CONFIG;
  } catch (const spm::DataError& e) {
    g_last_error = e.what();
    return SPM_ERR_DATA;
  } catch (const spm::NumericError& e) {
    g_last_error = e.what();
    return SPM_ERR_NUMERIC;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return SPM_ERR_NUMERIC;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return SPM_ERR_NUMERIC;
  }
}

spm_status invalid_argument(const char* message) {
  g_last_error = message;
  return SPM_ERR_CONFIG;
}

spm::RunOptions to_options(const spm_run_options* options) {
  spm::RunOptions run;
  if (!options) return run;
  if (options->out_dir) run.out_dir = options->out_dir;
  run.has_seed_override = options->has_seed != 0;
  run.seed_override = options->seed;
  run.threads = options->threads > 1 ? options->threads : 1;
  run.force = options->force != 0;
  return run;
}

}  // namespace

extern "C" {

const char* spm_last_error(void) { return g_last_error.c_str(); }

spm_status spm_config_default(spm_config** out) {
  if (!out) return invalid_argument("spm_config_default: out is null");
  return guarded([&] { *out = new spm_config{spm::PipelineConfig{}}; });
}

spm_status spm_config_parse(const char* text, spm_config** out) {
  if (!text || !out)
    return invalid_argument("spm_config_parse: null argument");
  return guarded([&] { *out = new spm_config{spm::parse_config(text)}; });
}

spm_status spm_config_load(const char* path, spm_config** out) {
  if (!path || !out) return invalid_argument("spm_config_load: null argument");
  return guarded([&] { *out = new spm_config{spm::load_config(path)}; });
}

spm_status spm_config_dump(const spm_config* config, char* buffer,
                           size_t buffer_size, size_t* needed) {
  if (!config) return invalid_argument("spm_config_dump: config is null");
  return guarded([&] {
    const std::string text = config->value.dump();
    if (needed) *needed = text.size() + 1;
    if (buffer && buffer_size > 0) {
      const size_t n = std::min(buffer_size - 1, text.size());
      std::memcpy(buffer, text.data(), n);
      buffer[n] = '\0';
    }
  });
}

spm_status spm_config_hash(const spm_config* config, uint64_t* out) {
  if (!config || !out)
    return invalid_argument("spm_config_hash: null argument");
  return guarded([&] { *out = config->value.hash(); });
}

void spm_config_free(spm_config* config) { delete config; }

spm_status spm_run_simulate(const spm_config* config,
                            const spm_run_options* options) {
  if (!config) return invalid_argument("spm_run_simulate: config is null");
  return guarded([&] { spm::run_simulate(config->value, to_options(options)); });
}

spm_status spm_run_ingest(const spm_config* config,
                          const spm_run_options* options) {
  if (!config) return invalid_argument("spm_run_ingest: config is null");
  return guarded([&] { spm::run_ingest(config->value, to_options(options)); });
}

spm_status spm_run_reconstruct(const spm_config* config,
                               const spm_run_options* options) {
  if (!config) return invalid_argument("spm_run_reconstruct: config is null");
  return guarded(
      [&] { spm::run_reconstruct(config->value, to_options(options)); });
}

spm_status spm_run_analyze(const spm_config* config,
                           const spm_run_options* options,
                           const char* jsa_path) {
  if (!config) return invalid_argument("spm_run_analyze: config is null");
  return guarded([&] {
    spm::run_analyze(config->value, to_options(options),
                     jsa_path ? jsa_path : "");
  });
}

spm_status spm_run_pipeline(const spm_config* config,
                            const spm_run_options* options) {
  if (!config) return invalid_argument("spm_run_pipeline: config is null");
  return guarded([&] { spm::run_pipeline(config->value, to_options(options)); });
}

spm_status spm_jsa_load(const char* path, spm_jsa** out) {
  if (!path || !out) return invalid_argument("spm_jsa_load: null argument");
  return guarded([&] { *out = new spm_jsa{spm::io::read_jsa_binary(path)}; });
}

void spm_jsa_free(spm_jsa* jsa) { delete jsa; }

spm_status spm_jsa_dims(const spm_jsa* jsa, uint32_t* n1, uint32_t* n2) {
  if (!jsa || !n1 || !n2) return invalid_argument("spm_jsa_dims: null argument");
  return guarded([&] {
    *n1 = static_cast<uint32_t>(jsa->value.grid1().n_bins());
    *n2 = static_cast<uint32_t>(jsa->value.grid2().n_bins());
  });
}

spm_status spm_jsa_schmidt_number(const spm_jsa* jsa, double* k_complex,
                                  double* k_amplitude) {
  if (!jsa || !k_complex || !k_amplitude)
    return invalid_argument("spm_jsa_schmidt_number: null argument");
  return guarded([&] {
    *k_complex = spm::schmidt(jsa->value).schmidt_number;
    const spm::Jsa amp(jsa->value.grid1(), jsa->value.grid2(),
                       jsa->value.f().cwiseAbs().cast<std::complex<double>>());
    *k_amplitude = spm::schmidt(amp).schmidt_number;
  });
}

spm_status spm_jsa_fit_chirp(const spm_jsa* jsa, double amplitude_floor,
                             double* beta_fs2, double* beta_stderr_fs2) {
  if (!jsa || !beta_fs2 || !beta_stderr_fs2)
    return invalid_argument("spm_jsa_fit_chirp: null argument");
  return guarded([&] {
    const spm::ChirpFit fit =
        amplitude_floor > 0.0 ? spm::fit_chirp(jsa->value, amplitude_floor)
                              : spm::fit_chirp(jsa->value);
    *beta_fs2 = fit.beta_fs2;
    *beta_stderr_fs2 = fit.beta_stderr_fs2;
  });
}

spm_status spm_jsa_overlap(const spm_jsa* a, const spm_jsa* b, double* out) {
  if (!a || !b || !out) return invalid_argument("spm_jsa_overlap: null argument");
  return guarded([&] { *out = spm::jsa_overlap(a->value, b->value); });
}

}  // extern "C"
