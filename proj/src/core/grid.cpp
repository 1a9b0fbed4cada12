#include "core/grid.hpp"

#include <cmath>

#include "core/errors.hpp"

namespace spm {

FrequencyGrid::FrequencyGrid(double center_radfs, double span_radfs, int n_bins)
    : center_(center_radfs), span_(span_radfs), n_(n_bins) {
  if (!std::isfinite(center_radfs) || !std::isfinite(span_radfs))
    throw ConfigError("grid: non-finite center or span");
  if (span_radfs <= 0.0) throw ConfigError("grid: span must be positive");
  if (n_bins < 8) throw ConfigError("grid: n_bins must be >= 8");
}

int FrequencyGrid::bin_of(double detuning_radfs) const {
  const double dw = spacing();
  const double idx = (detuning_radfs + 0.5 * span_) / dw;
  const long k = std::lround(idx);
  if (k < 0 || k >= n_) return -1;
  return static_cast<int>(k);
}

Eigen::ArrayXd FrequencyGrid::detunings() const {
  Eigen::ArrayXd w(n_);
  for (int k = 0; k < n_; ++k) w[k] = detuning(k);
  return w;
}

FrequencyGrid make_grid(double center_radfs, double span_radfs, int n_bins) {
  return FrequencyGrid(center_radfs, span_radfs, n_bins);
}

int bins_for_span(double span_radfs, double bin_width_radfs) {
  if (bin_width_radfs <= 0.0 || span_radfs <= 0.0)
    throw ConfigError("bins_for_span: span and bin width must be positive");
  return static_cast<int>(std::lround(span_radfs / bin_width_radfs)) + 1;
}

}  // namespace spm
