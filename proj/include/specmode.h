#ifndef SPECMODE_H
#define SPECMODE_H

/* C API of libspecmode: simulation and reconstruction of joint spectral
 * amplitudes from spectrally resolved intensity interferometry.
 *
 * All functions return spm_status; on failure spm_last_error() gives a
 * thread-local description of the most recent error. Objects returned
 * through out-pointers are owned by the caller and released with the
 * matching *_free function.
 */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum spm_status {
  SPM_OK = 0,
  SPM_ERR_CONFIG = 1,  /* invalid configuration or precondition */
  SPM_ERR_DATA = 2,    /* corrupt or missing input data */
  SPM_ERR_NUMERIC = 3  /* numerical failure (no sideband, stitching, ...) */
} spm_status;

typedef struct spm_config spm_config;
typedef struct spm_jsa spm_jsa;

/* Description of the last error on this thread; empty string if none. */
const char* spm_last_error(void);

/* Configuration -------------------------------------------------------- */

spm_status spm_config_default(spm_config** out);
spm_status spm_config_parse(const char* text, spm_config** out);
spm_status spm_config_load(const char* path, spm_config** out);
/* Canonical text dump. Writes up to buffer_size bytes (always terminated
 * when buffer_size > 0); *needed receives the full length including the
 * terminator. */
spm_status spm_config_dump(const spm_config* config, char* buffer,
                           size_t buffer_size, size_t* needed);
spm_status spm_config_hash(const spm_config* config, uint64_t* out);
void spm_config_free(spm_config* config);

/* Pipeline stages ------------------------------------------------------ */

typedef struct spm_run_options {
  const char* out_dir; /* NULL means "." */
  int has_seed;        /* nonzero: seed overrides the config seed */
  uint64_t seed;
  int threads;         /* <= 1 means single-threaded */
  int force;           /* nonzero: skip config-hash checks on inputs */
} spm_run_options;

spm_status spm_run_simulate(const spm_config* config,
                            const spm_run_options* options);
spm_status spm_run_ingest(const spm_config* config,
                          const spm_run_options* options);
spm_status spm_run_reconstruct(const spm_config* config,
                               const spm_run_options* options);
/* jsa_path NULL means <out_dir>/jsa_reconstructed.jsab. */
spm_status spm_run_analyze(const spm_config* config,
                           const spm_run_options* options,
                           const char* jsa_path);
spm_status spm_run_pipeline(const spm_config* config,
                            const spm_run_options* options);

/* JSA files ------------------------------------------------------------ */

spm_status spm_jsa_load(const char* path, spm_jsa** out);
void spm_jsa_free(spm_jsa* jsa);
spm_status spm_jsa_dims(const spm_jsa* jsa, uint32_t* n1, uint32_t* n2);
/* Schmidt number of the complex matrix and of its modulus. */
spm_status spm_jsa_schmidt_number(const spm_jsa* jsa, double* k_complex,
                                  double* k_amplitude);
/* Quadratic cross-phase fit; amplitude_floor <= 0 selects the default. */
spm_status spm_jsa_fit_chirp(const spm_jsa* jsa, double amplitude_floor,
                             double* beta_fs2, double* beta_stderr_fs2);
/* Global-phase-invariant overlap in [0, 1]; grids must match. */
spm_status spm_jsa_overlap(const spm_jsa* a, const spm_jsa* b, double* out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* SPECMODE_H */
