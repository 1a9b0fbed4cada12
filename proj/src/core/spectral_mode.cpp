#include "core/spectral_mode.hpp"

#include <cmath>

#include "core/errors.hpp"

namespace spm {

SpectralMode::SpectralMode(FrequencyGrid grid, Eigen::ArrayXcd amp)
    : grid_(grid), amp_(std::move(amp)) {
  if (amp_.size() != grid_.n_bins())
    throw ConfigError("spectral mode: amplitude length does not match grid");
}

double SpectralMode::norm_sq() const {
  return amp_.abs2().sum() * grid_.spacing();
}

SpectralMode SpectralMode::normalized() const {
  const double n2 = norm_sq();
  if (!(n2 > 0.0) || !std::isfinite(n2))
    throw NumericError("spectral mode: cannot normalize zero or non-finite mode");
  return SpectralMode(grid_, amp_ / std::sqrt(n2));
}

std::complex<double> inner_product(const SpectralMode& a,
                                   const SpectralMode& b) {
  if (!(a.grid() == b.grid()))
    throw ConfigError("inner_product: grid mismatch");
  return (a.amp().conjugate() * b.amp()).sum() * a.grid().spacing();
}

double mode_overlap(const SpectralMode& a, const SpectralMode& b) {
  const double na = a.norm_sq(), nb = b.norm_sq();
  if (na <= 0.0 || nb <= 0.0) return 0.0;
  return std::norm(inner_product(a, b)) / (na * nb);
}

}  // namespace spm
