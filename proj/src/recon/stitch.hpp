#pragma once

#include <optional>
#include <vector>

#include "core/interferogram.hpp"
#include "core/jsa.hpp"
#include "core/spectral_mode.hpp"
#include "recon/fourier_filter.hpp"
#include "recon/mode_estimate.hpp"

namespace spm {

/// Assembled JSA plus the stitching diagnostics the report carries.
struct StitchResult {
  Jsa jsa;
  double residual = 0.0;         // weighted phase mismatch after convergence
  int iterations = 0;
  int n_components = 1;          // connected support components
  bool underdetermined = false;  // cross-component phases are arbitrary
  double amplitude_discrepancy = 0.0;  // weighted RMS of |A| vs |B| mismatch
};

/// Merges two JSA estimates with complementary phase ambiguities: `columns`
/// knows each column f(., w_hj) up to a per-column phase, `rows` knows each
/// row f(w_ai, .) up to a per-row phase. Solves for the phases by alternating
/// weighted averaging (weights |A||B|), merges amplitudes as the geometric
/// mean, and fixes the global phase so arg f = 0 at the center bin.
/// Disconnected support is stitched per component and flagged.
StitchResult assemble_jsa(const Jsa& columns, const Jsa& rows,
                          double support_threshold = 1e-3);

struct ReconstructionSettings {
  FilterSpec filter;
  double tau_fs = 0.0;
  double division_threshold = 0.05;
  int threads = 1;
};

/// Per-slice reconstruction report lines.
struct ReconstructionReport {
  double hermiticity_residual = 0.0;  // worst slice
  double masked_fraction = 0.0;       // worst slice
  double clipped_weight = 0.0;        // worst slice
  double mean_purity = 0.0;           // weight-averaged over slices
  double stitch_residual = 0.0;
  int stitch_components = 1;
  bool underdetermined = false;
};

/// One column (or row) of the JSA per herald bin from a heralded histogram:
/// slice j is filtered, divided by the reference, and reduced to its dominant
/// mode scaled by sqrt of the slice weight. Empty slices yield zero columns.
Jsa estimate_slices(const Interferogram& heralded, const SpectralMode& reference,
                    const ReconstructionSettings& settings,
                    ReconstructionReport* report = nullptr);

/// Full pipeline for two heralded measurements with swapped herald roles:
/// histogram_a heralds on grid2 (giving columns), histogram_b on grid1
/// (giving rows, i.e. the transposed source).
StitchResult reconstruct_heralded(const Interferogram& histogram_a,
                                  const Interferogram& histogram_b,
                                  const SpectralMode& reference,
                                  const ReconstructionSettings& settings,
                                  ReconstructionReport* report = nullptr);

/// Seeded (stimulated) reconstruction: one 2D interferogram per seed bin,
/// each giving the cross-section f(., w_s). With only one seed axis the
/// cross-column phases are undetermined; each column is given a canonical
/// phase and the result flagged. Supplying `rows` (a seed scan of the other
/// arm) removes the ambiguity via assemble_jsa.
StitchResult reconstruct_seeded(
    const std::vector<std::optional<Interferogram>>& per_seed,
    const FrequencyGrid& seed_grid, const SpectralMode& reference,
    const ReconstructionSettings& settings, const Jsa* rows = nullptr,
    ReconstructionReport* report = nullptr);

}  // namespace spm
