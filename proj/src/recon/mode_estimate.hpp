#pragma once

#include <vector>

#include <Eigen/Core>

#include "core/grid.hpp"
#include "core/jsa.hpp"
#include "core/spectral_mode.hpp"

namespace spm {

/// Estimate of Phi(w1,w2) = psi(w1) psi*(w2) (or a mixture sum p_i Phi_i)
/// after dividing out the reference. Hermitian after symmetrization; the mask
/// marks bins where the reference was strong enough to divide by.
struct ModeEstimate {
  FrequencyGrid grid;
  Eigen::MatrixXcd phi;
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> mask;  // true = valid
  double hermiticity_residual = 0.0;  // pre-symmetrization, Frobenius relative
  double masked_fraction = 0.0;       // of signal-support bins
};

/// Divides the filtered sideband by alpha*(w1) alpha(w2) exp(i (w2-w1) tau).
/// Bins where |alpha| < threshold * max|alpha| are masked and zeroed. Signal
/// support is |Gamma| >= 1% of its peak; losing more than half of it to the
/// mask raises NumericError ("reference too narrow").
ModeEstimate remove_reference(const Jsa& gamma, const SpectralMode& reference,
                              double tau_fs, double threshold = 0.05);

struct ModeDecomposition {
  Eigen::ArrayXd weights;           // descending, >= 0, sum 1
  std::vector<SpectralMode> modes;  // normalized eigenvectors
  double purity = 0.0;              // weights(0)
  double total_weight = 0.0;        // trace of Phi * dw before normalization
  double clipped_weight = 0.0;      // |negative eigenvalue| mass / total |mass|
};

/// Eigen-decomposition of the Hermitian Phi with the dw measure. Negative
/// eigenvalues are clipped to zero and the clipped mass reported.
ModeDecomposition extract_modes(const ModeEstimate& estimate,
                                int max_modes = 0);

}  // namespace spm
