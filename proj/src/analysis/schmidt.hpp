#pragma once

#include <vector>

#include <Eigen/Core>

#include "core/jsa.hpp"
#include "core/spectral_mode.hpp"

namespace spm {

struct SchmidtResult {
  Eigen::ArrayXd lambdas;  // descending, >= 0, sum of squares = 1
  std::vector<SpectralMode> modes1;
  std::vector<SpectralMode> modes2;
  double schmidt_number = 1.0;  // K = 1 / sum lambda^4
};

/// Schmidt decomposition of the JSA: SVD of f with the dw measure folded in,
/// so K is stable under grid refinement.
SchmidtResult schmidt(const Jsa& jsa, int max_modes = 0);

/// Heralded-arm autocorrelation prediction g2 = 1 + 1/K.
double g2_predicted(double schmidt_number);

}  // namespace spm
