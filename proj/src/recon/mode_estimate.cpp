#include "recon/mode_estimate.hpp"

#include <cmath>
#include <complex>

#include <Eigen/Eigenvalues>

#include "core/errors.hpp"

namespace spm {

ModeEstimate remove_reference(const Jsa& gamma, const SpectralMode& reference,
                              double tau_fs, double threshold) {
  if (!(reference.grid() == gamma.grid1()) ||
      !(reference.grid() == gamma.grid2()))
    throw ConfigError("remove_reference: reference grid must match both JSA axes");
  if (!(threshold > 0.0) || threshold >= 1.0)
    throw ConfigError("remove_reference: threshold must be in (0, 1)");

  const int n = reference.grid().n_bins();
  const Eigen::ArrayXcd& alpha = reference.amp();
  const double alpha_max = alpha.abs().maxCoeff();
  if (!(alpha_max > 0.0))
    throw ConfigError("remove_reference: reference amplitude is zero");
  const double cutoff = threshold * alpha_max;

  const double gamma_max = gamma.f().cwiseAbs().maxCoeff();
  const double support_cut = 0.01 * gamma_max;

  ModeEstimate est;
  est.grid = reference.grid();
  est.phi = Eigen::MatrixXcd::Zero(n, n);
  est.mask.setConstant(n, n, false);

  const Eigen::ArrayXd w = reference.grid().detunings();
  long support = 0, support_masked = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const bool in_support = std::abs(gamma.f()(i, j)) >= support_cut;
      const bool ok = std::abs(alpha(i)) >= cutoff && std::abs(alpha(j)) >= cutoff;
      if (in_support) {
        ++support;
        if (!ok) ++support_masked;
      }
      if (!ok) continue;
      est.mask(i, j) = true;
      const std::complex<double> denom =
          std::conj(alpha(i)) * alpha(j) *
          std::exp(std::complex<double>(0.0, (w(j) - w(i)) * tau_fs));
      est.phi(i, j) = gamma.f()(i, j) / denom;
    }

  est.masked_fraction =
      support > 0 ? static_cast<double>(support_masked) / support : 1.0;
  if (est.masked_fraction > 0.5)
    throw NumericError(
        "remove_reference: reference too narrow; more than half of the signal "
        "support fell below the division threshold");

  const double norm = est.phi.norm();
  if (norm > 0.0)
    est.hermiticity_residual =
        0.5 * (est.phi - est.phi.adjoint()).norm() / norm;
  est.phi = 0.5 * (est.phi + est.phi.adjoint()).eval();
  // Symmetrization can repopulate bins whose mirror was masked; keep the
  // mask symmetric as well.
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j) {
      const bool m = est.mask(i, j) || est.mask(j, i);
      est.mask(i, j) = est.mask(j, i) = m;
    }
  return est;
}

ModeDecomposition extract_modes(const ModeEstimate& estimate, int max_modes) {
  const int n = estimate.grid.n_bins();
  if (estimate.phi.rows() != n || estimate.phi.cols() != n)
    throw ConfigError("extract_modes: matrix does not match grid");
  if (!(estimate.phi.norm() > 0.0))
    throw NumericError("extract_modes: mode matrix is zero");

  const double dw = estimate.grid.spacing();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(estimate.phi * dw);
  if (solver.info() != Eigen::Success)
    throw NumericError("extract_modes: eigen-decomposition failed");

  // Eigen returns ascending order; flip to descending.
  const int n_keep = (max_modes > 0) ? std::min(max_modes, n) : n;
  Eigen::ArrayXd raw(n);
  for (int k = 0; k < n; ++k) raw(k) = solver.eigenvalues()(n - 1 - k);

  double positive = 0.0, negative = 0.0;
  for (int k = 0; k < n; ++k)
    (raw(k) >= 0.0 ? positive : negative) += std::abs(raw(k));
  if (!(positive > 0.0))
    throw NumericError("extract_modes: no positive eigenvalue");

  ModeDecomposition dec;
  dec.total_weight = positive - negative;
  dec.clipped_weight = negative / (positive + negative);
  dec.weights = Eigen::ArrayXd::Zero(n_keep);
  for (int k = 0; k < n_keep; ++k)
    dec.weights(k) = std::max(raw(k), 0.0) / positive;
  dec.purity = dec.weights(0);

  dec.modes.reserve(n_keep);
  for (int k = 0; k < n_keep; ++k) {
    Eigen::ArrayXcd v = solver.eigenvectors().col(n - 1 - k).array();
    dec.modes.emplace_back(
        SpectralMode(estimate.grid, std::move(v)).normalized());
  }
  return dec;
}

}  // namespace spm
