#include "core/jsa.hpp"

#include <cmath>

#include "core/errors.hpp"

namespace spm {

Jsa::Jsa(FrequencyGrid grid1, FrequencyGrid grid2, Eigen::MatrixXcd f)
    : g1_(grid1), g2_(grid2), f_(std::move(f)) {
  if (f_.rows() != g1_.n_bins() || f_.cols() != g2_.n_bins())
    throw ConfigError("jsa: matrix dimensions do not match grids");
}

double Jsa::norm_sq() const {
  return f_.array().abs2().sum() * g1_.spacing() * g2_.spacing();
}

Jsa Jsa::normalized() const {
  const double n2 = norm_sq();
  if (!(n2 > 0.0) || !std::isfinite(n2))
    throw NumericError("jsa: cannot normalize zero or non-finite matrix");
  return Jsa(g1_, g2_, f_ / std::sqrt(n2));
}

Jsa Jsa::with_canonical_phase() const {
  const int i0 = g1_.bin_of(0.0), j0 = g2_.bin_of(0.0);
  std::complex<double> ref =
      (i0 >= 0 && j0 >= 0) ? f_(i0, j0) : std::complex<double>(0.0, 0.0);
  if (std::abs(ref) == 0.0) {
    Eigen::Index i, j;
    f_.array().abs().maxCoeff(&i, &j);
    ref = f_(i, j);
  }
  if (std::abs(ref) == 0.0) return *this;
  return Jsa(g1_, g2_, f_ * (std::abs(ref) / ref));
}

SpectralMode Jsa::slice_signal(int j) const {
  if (j < 0 || j >= g2_.n_bins()) throw ConfigError("jsa: slice index out of range");
  return SpectralMode(g1_, f_.col(j).array());
}

SpectralMode Jsa::slice_herald(int i) const {
  if (i < 0 || i >= g1_.n_bins()) throw ConfigError("jsa: slice index out of range");
  return SpectralMode(g2_, f_.row(i).transpose().array());
}

double jsa_overlap(const Jsa& a, const Jsa& b) {
  if (!(a.grid1() == b.grid1()) || !(a.grid2() == b.grid2()))
    throw ConfigError("jsa_overlap: grid mismatch");
  const double na = a.f().squaredNorm(), nb = b.f().squaredNorm();
  if (na <= 0.0 || nb <= 0.0) return 0.0;
  const std::complex<double> ip = (a.f().conjugate().array() * b.f().array()).sum();
  return std::norm(ip) / (na * nb);
}

}  // namespace spm
