#include "sim/detector.hpp"

#include <cmath>
#include <vector>

#include "core/errors.hpp"
#include "core/units.hpp"

namespace spm {

void DetectorModel::validate() const {
  if (!(std::abs(dispersion_ps_per_nm) > 0.0))
    throw ConfigError("detector model: dispersion must be nonzero");
  if (jitter_fwhm_ps < 0.0)
    throw ConfigError("detector model: jitter must be nonnegative");
  if (efficiency < 0.0 || efficiency > 1.0)
    throw ConfigError("detector model: efficiency must be in [0,1]");
  if (!(rep_period_ns > 0.0))
    throw ConfigError("detector model: rep period must be positive");
}

double jitter_blur_fwhm_nm(const DetectorModel& det) {
  det.validate();
  return det.jitter_fwhm_ps / std::abs(det.dispersion_ps_per_nm);
}

double jitter_blur_fwhm_radfs(const DetectorModel& det,
                              double lambda_center_nm) {
  const double dlam = jitter_blur_fwhm_nm(det);
  // dnu = c * dlam / lambda^2; in rad/fs with c in nm/fs.
  return units::kTwoPi * units::kSpeedOfLightNmPerFs * dlam /
         (lambda_center_nm * lambda_center_nm);
}

double detuning_to_offset_ps(double detuning_radfs, const DetectorModel& det,
                             double lambda_center_nm) {
  const double w_center = units::wavelength_nm_to_radfs(lambda_center_nm);
  const double lambda = units::radfs_to_wavelength_nm(w_center + detuning_radfs);
  return det.dispersion_ps_per_nm * (lambda - lambda_center_nm);
}

double offset_ps_to_detuning(double offset_ps, const DetectorModel& det,
                             double lambda_center_nm) {
  const double dlam = offset_ps / det.dispersion_ps_per_nm;
  const double w_center = units::wavelength_nm_to_radfs(lambda_center_nm);
  return units::wavelength_nm_to_radfs(lambda_center_nm + dlam) - w_center;
}

namespace {

// Count-conserving discrete Gaussian blur of one axis: each source bin
// redistributes into in-range neighbors with renormalized kernel weights.
std::vector<double> kernel_for(double sigma_bins, int& half) {
  half = static_cast<int>(std::ceil(6.0 * sigma_bins));
  std::vector<double> k(2 * half + 1);
  for (int d = -half; d <= half; ++d)
    k[d + half] = std::exp(-0.5 * d * d / (sigma_bins * sigma_bins));
  return k;
}

Eigen::ArrayXXd blur_rows(const Eigen::ArrayXXd& in, double sigma_bins) {
  int half;
  const auto k = kernel_for(sigma_bins, half);
  const int n = static_cast<int>(in.rows());
  Eigen::ArrayXXd out = Eigen::ArrayXXd::Zero(in.rows(), in.cols());
  for (int i = 0; i < n; ++i) {
    const int lo = std::max(0, i - half), hi = std::min(n - 1, i + half);
    double wsum = 0.0;
    for (int t = lo; t <= hi; ++t) wsum += k[t - i + half];
    for (int t = lo; t <= hi; ++t)
      out.row(t) += in.row(i) * (k[t - i + half] / wsum);
  }
  return out;
}

}  // namespace

Interferogram apply_detector_blur(const Interferogram& h,
                                  const DetectorModel& det) {
  det.validate();
  auto sigma_bins_for = [&](const FrequencyGrid& g) {
    const double lam = units::radfs_to_wavelength_nm(g.center());
    const double sigma =
        jitter_blur_fwhm_radfs(det, lam) * units::kFwhmToSigma;
    return sigma / g.spacing();
  };
  const double s1 = sigma_bins_for(h.grid1());
  const double s2 = sigma_bins_for(h.grid2());

  std::vector<Eigen::ArrayXXd> planes(h.n_planes());
  for (int j = 0; j < h.n_planes(); ++j) {
    Eigen::ArrayXXd p = h.plane(j);
    if (s1 >= 0.1) p = blur_rows(p, s1);
    if (s2 >= 0.1) p = blur_rows(p.transpose().eval(), s2).transpose().eval();
    planes[j] = std::move(p);
  }

  if (!h.has_herald_axis())
    return Interferogram(h.grid1(), h.grid2(), std::move(planes[0]));

  const double sh = sigma_bins_for(h.herald_grid());
  if (sh >= 0.1) {
    // Herald-axis pass: flatten planes into rows of an (nh x n1*n2) array.
    const int nh = h.n_planes();
    const int stride = static_cast<int>(planes[0].size());
    Eigen::ArrayXXd flat(nh, stride);
    for (int j = 0; j < nh; ++j)
      flat.row(j) = Eigen::Map<const Eigen::ArrayXd>(planes[j].data(), stride);
    flat = blur_rows(flat, sh);
    for (int j = 0; j < nh; ++j)
      Eigen::Map<Eigen::ArrayXd>(planes[j].data(), stride) = flat.row(j);
  }
  return Interferogram(h.grid1(), h.grid2(), h.herald_grid(), std::move(planes));
}

}  // namespace spm
