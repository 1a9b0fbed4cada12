#pragma once

#include <utility>
#include <vector>

#include "core/interferogram.hpp"
#include "core/jsa.hpp"
#include "core/spectral_mode.hpp"
#include "sim/source_model.hpp"

namespace spm {

/// Weighted mixture of signal preparations; weights must be positive and are
/// normalized internally.
using ModeMixture = std::vector<std::pair<double, SpectralMode>>;

/// Expected spectral intensity cross-correlation <G(w1,w2)> for a signal in
/// mode `psi` interfered with a delayed coherent reference `ref`.
///
///   SinglePhoton: (1/4) (zeta - Gamma - Gamma*)
///   Coherent:     adds |psi(w1) psi(w2)|^2 inside the bracket
///   Thermal:      adds 2 |psi(w1) psi(w2)|^2 (single-mode moment <|s|^4> =
///                 2 <|s|^2>^2; validated against a Monte Carlo oracle)
///
/// The reference amplitude's norm^2 is its mean photon number; for Coherent
/// and Thermal the signal is scaled to stats.mean_photons.
Interferogram expected_interferogram(const SpectralMode& psi,
                                     const SpectralMode& ref, double tau_fs,
                                     const SignalStatistics& stats);

/// Statistical mixture: the pure-state expectation averaged over {p_i, psi_i}.
Interferogram expected_interferogram(const ModeMixture& mixture,
                                     const SpectralMode& ref, double tau_fs,
                                     const SignalStatistics& stats);

/// Herald-resolved histogram: plane j is the single-photon interferogram of
/// the conditioned mode f(., w_hj), weighted by the herald marginal
/// probability sum_w |f(w, w_hj)|^2 dw. herald_grid must equal jsa.grid2.
Interferogram expected_heralded_histogram(const Jsa& jsa,
                                          const SpectralMode& ref,
                                          double tau_fs,
                                          const FrequencyGrid& herald_grid);

}  // namespace spm
