#pragma once

#include <complex>

#include <Eigen/Core>

#include "core/grid.hpp"
#include "core/spectral_mode.hpp"

namespace spm {

/// Complex two-photon amplitude f(w1,w2) over grid1 x grid2. Two Jsa are
/// physically equal when they differ by one unit-modulus global factor.
class Jsa {
 public:
  Jsa() = default;
  Jsa(FrequencyGrid grid1, FrequencyGrid grid2, Eigen::MatrixXcd f);

  const FrequencyGrid& grid1() const { return g1_; }
  const FrequencyGrid& grid2() const { return g2_; }
  const Eigen::MatrixXcd& f() const { return f_; }
  Eigen::MatrixXcd& f() { return f_; }

  double norm_sq() const;  // sum |f|^2 dw1 dw2
  Jsa normalized() const;

  /// Rotates the global phase so arg f at the (0,0)-detuning bin is zero.
  Jsa with_canonical_phase() const;

  /// Cross-section f(., w2 = bin j of grid2) as a mode over grid1.
  SpectralMode slice_signal(int j) const;
  /// Cross-section f(w1 = bin i of grid1, .) as a mode over grid2.
  SpectralMode slice_herald(int i) const;

 private:
  FrequencyGrid g1_, g2_;
  Eigen::MatrixXcd f_;
};

/// |<a,b>|^2 / (|a|^2 |b|^2); global-phase invariant, in [0,1].
double jsa_overlap(const Jsa& a, const Jsa& b);

}  // namespace spm
