#pragma once

#include <complex>

#include <Eigen/Core>

#include "core/grid.hpp"

namespace spm {

/// Complex spectral amplitude sampled on a FrequencyGrid. Norms and inner
/// products carry the discretization measure dw so values are stable under
/// grid refinement.
class SpectralMode {
 public:
  SpectralMode() = default;
  SpectralMode(FrequencyGrid grid, Eigen::ArrayXcd amp);

  const FrequencyGrid& grid() const { return grid_; }
  const Eigen::ArrayXcd& amp() const { return amp_; }
  Eigen::ArrayXcd& amp() { return amp_; }

  double norm_sq() const;  // sum |amp|^2 dw
  SpectralMode normalized() const;

 private:
  FrequencyGrid grid_;
  Eigen::ArrayXcd amp_;
};

std::complex<double> inner_product(const SpectralMode& a,
                                   const SpectralMode& b);

/// |<a|b>|^2 / (|a|^2 |b|^2); global-phase invariant, in [0,1].
double mode_overlap(const SpectralMode& a, const SpectralMode& b);

}  // namespace spm
