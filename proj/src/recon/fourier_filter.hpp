#pragma once

#include <Eigen/Core>

#include "core/grid.hpp"
#include "core/interferogram.hpp"
#include "core/jsa.hpp"

namespace spm {

/// Time-domain window applied to the 2D Fourier transform of an
/// interferogram. The interference term rides at (t1, t2) = (-tau, +tau),
/// so the window must be centered there and vanish at the baseband.
struct FilterSpec {
  enum class Shape { Gaussian, Tukey };

  Shape shape = Shape::Gaussian;
  double center_t1_fs = 0.0;
  double center_t2_fs = 0.0;
  double sigma_t_fs = 0.0;      // Gaussian width per axis
  double flat_half_fs = 0.0;    // Tukey: half width of the flat top
  double taper_fs = 0.0;        // Tukey: cosine roll-off length

  /// Gaussian window at (-tau, +tau); sigma defaults to tau/4.
  static FilterSpec gaussian_for_delay(double tau_fs, double sigma_t_fs = 0.0);
  /// Flat-top window at (-tau, +tau).
  static FilterSpec tukey_for_delay(double tau_fs, double flat_half_fs,
                                    double taper_fs);

  double value(double t1_fs, double t2_fs) const;

  /// Rejects windows that overlap the baseband or exceed the unambiguous
  /// time range of the grids.
  void validate(const FrequencyGrid& g1, const FrequencyGrid& g2) const;
};

struct SidebandLocation {
  double t1_fs = 0.0;
  double t2_fs = 0.0;
  double tau_fs = 0.0;  // (t2 - t1) / 2
  double peak_magnitude = 0.0;
  double median_magnitude = 0.0;
};

/// Finds the interference sideband in the quadrant t1 < 0 < t2 of the 2D
/// Fourier magnitude, with 4x zero padding and sub-bin refinement by
/// log-parabola interpolation. Throws NumericError when no peak stands out
/// (strict local maximum at least 5x the median magnitude).
SidebandLocation locate_sideband(const Interferogram& interferogram);

struct FourierPlane {
  Eigen::ArrayXXd magnitude;  // centered: t = 0 at the middle bin
  double dt1_fs = 0.0;
  double dt2_fs = 0.0;
};

/// |F{counts}| on the time-time plane, shifted so t1 = t2 = 0 sits at the
/// central bin. Plot-ready view of baseband and sidebands.
FourierPlane fourier_magnitude(const Interferogram& interferogram);

/// Isolates the interference term: -4 * IFFT( W * FFT(counts) ). The result
/// estimates Gamma(w1,w2) = psi(w1) psi*(w2) alpha*(w1) alpha(w2)
/// exp(i (w2-w1) tau) up to the additive terms the window rejects.
Jsa fourier_filter(const Interferogram& interferogram, const FilterSpec& spec);

}  // namespace spm
