#pragma once

#include <cstdint>

#include <Eigen/Core>

namespace spm {

/// Uniform grid of angular-frequency detunings about a center frequency.
/// Bin k sits at detuning -span/2 + k*dw with dw = span/(n_bins-1), endpoints
/// included. All spectra and interferograms share this coordinate system.
class FrequencyGrid {
 public:
  FrequencyGrid() = default;
  FrequencyGrid(double center_radfs, double span_radfs, int n_bins);

  double center() const { return center_; }
  double span() const { return span_; }
  int n_bins() const { return n_; }
  double spacing() const { return span_ / (n_ - 1); }

  double detuning(int k) const { return -0.5 * span_ + k * spacing(); }
  double absolute(int k) const { return center_ + detuning(k); }

  /// Nearest bin for a detuning, or -1 when outside [min-dw/2, max+dw/2).
  int bin_of(double detuning_radfs) const;

  Eigen::ArrayXd detunings() const;

  bool operator==(const FrequencyGrid& o) const {
    return center_ == o.center_ && span_ == o.span_ && n_ == o.n_;
  }

 private:
  double center_ = 0.0;
  double span_ = 0.0;
  int n_ = 0;
};

FrequencyGrid make_grid(double center_radfs, double span_radfs, int n_bins);

/// Grid with a target bin width; n_bins = round(span/width) + 1.
int bins_for_span(double span_radfs, double bin_width_radfs);

}  // namespace spm
