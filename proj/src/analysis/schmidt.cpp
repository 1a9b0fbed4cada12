#include "analysis/schmidt.hpp"

#include <cmath>

#include <Eigen/SVD>

#include "core/errors.hpp"

namespace spm {

SchmidtResult schmidt(const Jsa& jsa, int max_modes) {
  if (!(jsa.f().norm() > 0.0)) throw NumericError("schmidt: zero JSA");

  const double dw1 = jsa.grid1().spacing();
  const double dw2 = jsa.grid2().spacing();
  // f * sqrt(dw1 dw2) makes the singular values the measure-weighted Schmidt
  // coefficients.
  const Eigen::MatrixXcd scaled = jsa.f() * std::sqrt(dw1 * dw2);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(
      scaled, Eigen::ComputeThinU | Eigen::ComputeThinV);

  Eigen::ArrayXd s = svd.singularValues().array();
  const double norm = std::sqrt((s * s).sum());
  if (!(norm > 0.0)) throw NumericError("schmidt: zero JSA");
  s /= norm;

  const int n_all = static_cast<int>(s.size());
  const int n_keep = (max_modes > 0) ? std::min(max_modes, n_all) : n_all;

  SchmidtResult result;
  result.lambdas = s;
  result.schmidt_number = 1.0 / (s * s * s * s).sum();
  result.modes1.reserve(n_keep);
  result.modes2.reserve(n_keep);
  for (int k = 0; k < n_keep; ++k) {
    result.modes1.emplace_back(
        SpectralMode(jsa.grid1(), svd.matrixU().col(k).array()).normalized());
    // f = sum_k lambda_k u_k(w1) v_k(w2); SVD gives f = U S V^dagger, so the
    // herald-side mode is conj(V).
    result.modes2.emplace_back(
        SpectralMode(jsa.grid2(), svd.matrixV().col(k).array().conjugate())
            .normalized());
  }
  return result;
}

double g2_predicted(double schmidt_number) {
  if (!(schmidt_number >= 1.0))
    throw ConfigError("g2_predicted: Schmidt number must be >= 1");
  return 1.0 + 1.0 / schmidt_number;
}

}  // namespace spm
