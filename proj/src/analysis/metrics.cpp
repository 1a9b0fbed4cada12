#include "analysis/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "core/errors.hpp"
#include "core/units.hpp"

namespace spm {

namespace {

// Parabolic refinement of the extremum value around sample k.
double refined_extremum(const Eigen::ArrayXd& p, int k) {
  if (k <= 0 || k >= p.size() - 1) return p(k);
  const double ym = p(k - 1), y0 = p(k), yp = p(k + 1);
  const double denom = ym - 2.0 * y0 + yp;
  if (denom == 0.0) return y0;
  const double d = 0.5 * (ym - yp) / denom;
  if (std::abs(d) > 1.0) return y0;
  return y0 - 0.25 * (ym - yp) * d;
}

}  // namespace

Eigen::ArrayXd antidiagonal_profile(const Interferogram& g, int smooth_radius) {
  if (g.grid1().n_bins() != g.grid2().n_bins())
    throw ConfigError("antidiagonal_profile: grids must have equal size");
  const int n = g.grid1().n_bins();
  const Eigen::ArrayXXd counts = g.counts();
  Eigen::ArrayXd raw(n);
  for (int k = 0; k < n; ++k) raw(k) = counts(k, n - 1 - k);
  if (smooth_radius <= 0) return raw;

  Eigen::ArrayXd smooth(n);
  for (int k = 0; k < n; ++k) {
    const int lo = std::max(0, k - smooth_radius);
    const int hi = std::min(n - 1, k + smooth_radius);
    smooth(k) = raw.segment(lo, hi - lo + 1).mean();
  }
  return smooth;
}

double fringe_visibility(const Interferogram& g, int smooth_radius) {
  const Eigen::ArrayXd p = antidiagonal_profile(g, smooth_radius);
  const int n = static_cast<int>(p.size());
  if (!(p.maxCoeff() > 0.0))
    throw NumericError("fringe_visibility: empty interferogram");

  // Fringe period from the profile's DFT: the strongest strict local
  // maximum away from the envelope's low-frequency lobe.
  const Eigen::ArrayXd centered = p - p.mean();
  Eigen::ArrayXd spectrum(n / 2 + 1);
  for (int k = 0; k <= n / 2; ++k) {
    std::complex<double> acc = 0.0;
    for (int m = 0; m < n; ++m)
      acc += centered(m) *
             std::exp(std::complex<double>(0.0, -units::kTwoPi * k * m / n));
    spectrum(k) = std::abs(acc);
  }
  int k_dom = 0;
  double best = 0.0;
  for (int k = 2; k < n / 2; ++k) {
    if (spectrum(k) <= spectrum(k - 1) || spectrum(k) < spectrum(k + 1))
      continue;
    if (spectrum(k) > best) {
      best = spectrum(k);
      k_dom = k;
    }
  }
  if (k_dom < 2)
    throw NumericError(
        "fringe_visibility: fewer than two fringe periods across the profile");
  const double period = static_cast<double>(n) / k_dom;

  const int center = (n - 1) / 2;
  const int half = std::max(1, static_cast<int>(std::lround(0.75 * period)));
  const int lo = std::max(0, center - half);
  const int hi = std::min(n - 1, center + half);

  int k_max = lo, k_min = lo;
  for (int k = lo; k <= hi; ++k) {
    if (p(k) > p(k_max)) k_max = k;
    if (p(k) < p(k_min)) k_min = k;
  }
  const double vmax = refined_extremum(p, k_max);
  const double vmin = std::max(0.0, refined_extremum(p, k_min));
  if (!(vmax + vmin > 0.0))
    throw NumericError("fringe_visibility: profile vanishes at the center");
  return std::clamp((vmax - vmin) / (vmax + vmin), 0.0, 1.0);
}

}  // namespace spm
