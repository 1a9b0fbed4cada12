#pragma once

#include "core/grid.hpp"
#include "core/jsa.hpp"
#include "core/spectral_mode.hpp"

namespace spm {

/// Parametric pair-source model: Gaussian pump envelope A(w1+w2) with
/// quadratic spectral phase (GDD beta), times a phase-matching ridge of
/// adjustable width and orientation. The default Gaussian ridge models the
/// post-bandpass spectrum; a sinc ridge is available for sensitivity studies.
struct SourceModel {
  double pump_bandwidth = 0.0;       // rad/fs, amplitude std of |A|
  double pump_gdd_fs2 = 0.0;         // beta
  double phasematch_bandwidth = 0.0; // rad/fs, amplitude std of the ridge
  double phasematch_angle_rad = 0.0; // ridge orientation in (w1,w2)
  bool sinc_phasematch = false;
  double signal_wavelength_nm = 1550.0;
  double herald_wavelength_nm = 1550.0;

  void validate() const;

  /// Phase-matching angle giving a separable (K=1) Gaussian JSA for this
  /// pump/ridge width pair: sin(2*theta) = 2*pm_bw^2 / pump_bw^2.
  static double separable_angle(double pump_bw, double pm_bw);
};

enum class SignalKind { SinglePhoton, Coherent, Thermal };

struct SignalStatistics {
  SignalKind kind = SignalKind::SinglePhoton;
  double mean_photons = 1.0;  // used by Coherent and Thermal

  static SignalStatistics single_photon() { return {SignalKind::SinglePhoton, 1.0}; }
  static SignalStatistics coherent(double mean) { return {SignalKind::Coherent, mean}; }
  static SignalStatistics thermal(double mean) { return {SignalKind::Thermal, mean}; }
};

/// Gaussian pump amplitude with quadratic phase exp(-i beta/2 w^2).
SpectralMode pump_mode(const SourceModel& model, const FrequencyGrid& grid);

/// Normalized JSA f(w1,w2) = A(w1+w2) * phi_pm(w1,w2). The pump GDD imprints
/// exp(-i beta/2 (w1+w2)^2), whose cross term is the correlated phase
/// exp(-i beta w1 w2).
Jsa build_jsa(const SourceModel& model, const FrequencyGrid& grid1,
              const FrequencyGrid& grid2);

}  // namespace spm
