#pragma once

#include <cstdint>
#include <string>

#include "pipeline/config.hpp"

namespace spm {

struct RunOptions {
  std::string out_dir = ".";
  bool has_seed_override = false;
  std::uint64_t seed_override = 0;
  int threads = 1;
  bool force = false;  // skip config-hash checks on inputs
};

/// Forward model: truth JSA, reference mode, expected (and optionally
/// sampled) histograms, optional synthesized tag streams, and a manifest.
void run_simulate(const PipelineConfig& config, const RunOptions& options);

/// Tag streams in out_dir -> coincidences -> histograms + ingest report.
void run_ingest(const PipelineConfig& config, const RunOptions& options);

/// Histograms -> reconstructed JSA (or mode mixture for thermal runs) +
/// reconstruction report. Prefers ingested over sampled over expected inputs.
void run_reconstruct(const PipelineConfig& config, const RunOptions& options);

/// JSA file -> Schmidt/chirp/visibility report and plot CSVs. `jsa_path`
/// empty means out_dir/jsa_reconstructed.jsab.
void run_analyze(const PipelineConfig& config, const RunOptions& options,
                 const std::string& jsa_path = "");

/// simulate -> ingest (when tags were emitted) -> reconstruct -> analyze,
/// composed in-process with the same seeds and outputs.
void run_pipeline(const PipelineConfig& config, const RunOptions& options);

}  // namespace spm
