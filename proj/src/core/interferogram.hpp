#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "core/grid.hpp"

namespace spm {

/// Nonnegative counts (expected intensities or integer samples) over
/// grid1 x grid2, optionally resolved along a herald axis. The 3D form stores
/// one (n1 x n2) plane per herald bin; summing the planes gives a valid 2D
/// interferogram.
class Interferogram {
 public:
  Interferogram() = default;

  /// 2D form.
  Interferogram(FrequencyGrid g1, FrequencyGrid g2, Eigen::ArrayXXd counts);

  /// 3D form, one plane per bin of herald_grid.
  Interferogram(FrequencyGrid g1, FrequencyGrid g2, FrequencyGrid herald_grid,
                std::vector<Eigen::ArrayXXd> planes);

  const FrequencyGrid& grid1() const { return g1_; }
  const FrequencyGrid& grid2() const { return g2_; }
  bool has_herald_axis() const { return herald_.has_value(); }
  const FrequencyGrid& herald_grid() const;

  int n_planes() const { return static_cast<int>(planes_.size()); }
  const Eigen::ArrayXXd& plane(int j) const { return planes_.at(j); }
  Eigen::ArrayXXd& plane(int j) { return planes_.at(j); }

  /// The 2D counts; for the 3D form this is the herald-axis sum.
  Eigen::ArrayXXd counts() const;

  double total() const;

  /// 2D interferogram for one herald bin (weight preserved).
  Interferogram herald_slice(int j) const;

 private:
  void validate() const;

  FrequencyGrid g1_, g2_;
  std::optional<FrequencyGrid> herald_;
  std::vector<Eigen::ArrayXXd> planes_;
};

}  // namespace spm
