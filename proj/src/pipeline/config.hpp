#pragma once

#include <cstdint>
#include <string>

#include "recon/fourier_filter.hpp"
#include "sim/detector.hpp"
#include "sim/source_model.hpp"

namespace spm {

/// Declarative run configuration. Text format: `[section]` headers and
/// `key = value` lines, `#` comments; unknown sections or keys are rejected
/// with a line diagnostic. Defaults are those of a default-constructed
/// PipelineConfig and can be dumped with `config print-defaults`.
struct PipelineConfig {
  // [grid]
  double center_wavelength_nm = 1550.0;
  double bin_width_ghz = 10.0;
  int n_bins = 128;
  double herald_bin_width_ghz = 0.0;  // 0 -> bin_width_ghz
  int herald_n_bins = 0;              // 0 -> n_bins

  // [source]
  double pump_bandwidth_radfs = 1.86e-3;
  double pump_gdd_fs2 = 0.0;
  double phasematch_bandwidth_radfs = 1.32e-3;
  double phasematch_angle_deg = 45.0;
  bool sinc_phasematch = false;

  // [signal]
  std::string statistics = "single_photon";  // coherent | thermal
  double signal_mean_photons = 1.0;

  // [reference]
  double reference_bandwidth_scale = 1.5;  // x signal marginal width
  double reference_mean_photons = 0.01;
  double delay_ps = 10.0;

  // [detector]
  double dispersion_ps_per_nm = -997.0;
  double jitter_fwhm_ps = 40.0;
  double efficiency = 1.0;
  double rep_period_ns = 12.5;

  // [sampling]
  std::int64_t events = 0;  // 0 -> noiseless outputs only
  double rate_per_s = 100.0;
  bool emit_tags = false;
  double coincidence_window_ps = 6000.0;
  std::uint64_t seed = 12345;

  // [filter]
  std::string filter_shape = "tukey";  // gaussian | tukey
  double filter_sigma_t_ps = 0.0;      // 0 -> delay/4
  double filter_flat_half_ps = 4.0;
  double filter_taper_ps = 3.0;

  // [reconstruction]
  double division_threshold = 0.05;

  // [analysis]
  double amplitude_floor = 0.05;
  int smooth_radius = 1;

  void validate() const;

  // Derived builders.
  FrequencyGrid signal_grid() const;
  FrequencyGrid herald_grid() const;
  SourceModel source_model() const;
  DetectorModel detector_model() const;
  SignalStatistics signal_statistics() const;
  FilterSpec filter_spec() const;
  double tau_fs() const;

  /// Canonical text dump (stable ordering); its FNV-1a hash identifies the
  /// configuration in every output file.
  std::string dump() const;
  std::uint64_t hash() const;
};

PipelineConfig parse_config(const std::string& text);
PipelineConfig load_config(const std::string& path);

}  // namespace spm
