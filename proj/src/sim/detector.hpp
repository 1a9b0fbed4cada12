#pragma once

#include "core/grid.hpp"
#include "core/interferogram.hpp"

namespace spm {

/// Dispersive time-of-flight spectrometer chain: DCF dispersion maps
/// frequency to arrival time, timing jitter maps back to spectral blur.
struct DetectorModel {
  double dispersion_ps_per_nm = -997.0;  // signed
  double jitter_fwhm_ps = 40.0;
  double efficiency = 1.0;
  double rep_period_ns = 12.5;

  void validate() const;

  double rep_period_ps() const { return rep_period_ns * 1e3; }
};

/// Spectral uncertainty caused by timing jitter, as wavelength FWHM in nm.
double jitter_blur_fwhm_nm(const DetectorModel& det);

/// Same uncertainty as an angular-frequency FWHM (rad/fs) at lambda_center.
double jitter_blur_fwhm_radfs(const DetectorModel& det, double lambda_center_nm);

/// Arrival-time offset (ps from pulse epoch) for a detuning on this grid.
double detuning_to_offset_ps(double detuning_radfs, const DetectorModel& det,
                             double lambda_center_nm);

/// Inverse mapping: arrival-time offset -> detuning in rad/fs.
double offset_ps_to_detuning(double offset_ps, const DetectorModel& det,
                             double lambda_center_nm);

/// Gaussian blur along every frequency axis (herald axis included) with the
/// sigma implied by the jitter. Total counts are conserved; a blur narrower
/// than 0.1 bin is a documented no-op.
Interferogram apply_detector_blur(const Interferogram& h,
                                  const DetectorModel& det);

}  // namespace spm
