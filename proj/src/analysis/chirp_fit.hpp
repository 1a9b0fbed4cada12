#pragma once

#include <Eigen/Core>

#include "core/jsa.hpp"

namespace spm {

struct ChirpFit {
  double beta_fs2 = 0.0;        // cross-phase coefficient of -beta w1 w2
  double beta_stderr_fs2 = 0.0;
  Eigen::Array<double, 6, 1> coefficients;  // c0, c1, c2, c11, c22, c12
  double rms_residual_rad = 0.0;            // weighted, on accepted bins
  int n_accepted = 0;
};

/// Weighted least-squares fit of the unwrapped JSA phase against
/// c0 + c1 w1 + c2 w2 + c11 w1^2 + c22 w2^2 - beta w1 w2, weights |f|^2.
/// Bins below `amplitude_floor` of the peak amplitude are excluded. Phase
/// unwrapping is quality-guided (highest |f| first) from the peak bin;
/// inconsistent residues between accepted neighbours raise NumericError.
ChirpFit fit_chirp(const Jsa& jsa, double amplitude_floor = 0.05);

}  // namespace spm
