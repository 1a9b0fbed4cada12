#include "recon/fourier_filter.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>
#include <vector>

#include <fftw3.h>

#include "core/errors.hpp"
#include "core/units.hpp"

namespace spm {

namespace {

std::mutex& fftw_mutex() {
  static std::mutex m;
  return m;
}

// 2D DFT of a row-major complex buffer, in place. FFTW_FORWARD applies the
// kernel exp(-2 pi i (i m1/n1 + j m2/n2)), matching the sign convention of
// the continuous transform used throughout.
void dft2(std::vector<std::complex<double>>& buf, int rows, int cols,
          int sign) {
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    plan = fftw_plan_dft_2d(rows, cols,
                            reinterpret_cast<fftw_complex*>(buf.data()),
                            reinterpret_cast<fftw_complex*>(buf.data()), sign,
                            FFTW_ESTIMATE);
  }
  if (!plan) throw NumericError("fourier filter: FFTW plan creation failed");
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    fftw_destroy_plan(plan);
  }
}

// Time coordinate of DFT index m for an n-point axis with frequency spacing
// dw, mapped to the symmetric range [-T/2, T/2).
double dft_time(int m, int n, double dw) {
  const double dt = units::kTwoPi / (n * dw);
  const int ms = (m <= (n - 1) / 2) ? m : m - n;
  return ms * dt;
}

double log_parabola_offset(double lm, double l0, double lp) {
  const double denom = lm - 2.0 * l0 + lp;
  if (!(denom < 0.0)) return 0.0;
  double d = 0.5 * (lm - lp) / denom;
  return std::clamp(d, -0.5, 0.5);
}

}  // namespace

FilterSpec FilterSpec::gaussian_for_delay(double tau_fs, double sigma_t_fs) {
  FilterSpec spec;
  spec.shape = Shape::Gaussian;
  spec.center_t1_fs = -tau_fs;
  spec.center_t2_fs = tau_fs;
  spec.sigma_t_fs = (sigma_t_fs > 0.0) ? sigma_t_fs : std::abs(tau_fs) / 4.0;
  return spec;
}

FilterSpec FilterSpec::tukey_for_delay(double tau_fs, double flat_half_fs,
                                       double taper_fs) {
  FilterSpec spec;
  spec.shape = Shape::Tukey;
  spec.center_t1_fs = -tau_fs;
  spec.center_t2_fs = tau_fs;
  spec.flat_half_fs = flat_half_fs;
  spec.taper_fs = taper_fs;
  return spec;
}

double FilterSpec::value(double t1_fs, double t2_fs) const {
  auto axis = [this](double t, double c) {
    const double d = std::abs(t - c);
    if (shape == Shape::Gaussian)
      return std::exp(-0.5 * d * d / (sigma_t_fs * sigma_t_fs));
    if (d <= flat_half_fs) return 1.0;
    if (d >= flat_half_fs + taper_fs) return 0.0;
    const double x = (d - flat_half_fs) / taper_fs;
    return 0.5 * (1.0 + std::cos(std::numbers::pi * x));
  };
  return axis(t1_fs, center_t1_fs) * axis(t2_fs, center_t2_fs);
}

void FilterSpec::validate(const FrequencyGrid& g1,
                          const FrequencyGrid& g2) const {
  double reach;  // distance from center beyond which the window is negligible
  if (shape == Shape::Gaussian) {
    if (!(sigma_t_fs > 0.0))
      throw ConfigError("filter: Gaussian width must be positive");
    reach = 3.0 * sigma_t_fs;
  } else {
    if (!(flat_half_fs > 0.0) || !(taper_fs > 0.0))
      throw ConfigError("filter: Tukey flat width and taper must be positive");
    reach = flat_half_fs + taper_fs;
  }
  const double c1 = std::abs(center_t1_fs), c2 = std::abs(center_t2_fs);
  if (c1 <= reach || c2 <= reach)
    throw ConfigError(
        "filter: window overlaps the baseband; increase the delay or narrow "
        "the window");
  const double half_range1 = std::numbers::pi / g1.spacing();
  const double half_range2 = std::numbers::pi / g2.spacing();
  if (c1 + reach > half_range1 || c2 + reach > half_range2)
    throw ConfigError(
        "filter: window exceeds the unambiguous time range of the grid; "
        "the delay aliases at this bin width");
}

SidebandLocation locate_sideband(const Interferogram& interferogram) {
  const FrequencyGrid& g1 = interferogram.grid1();
  const FrequencyGrid& g2 = interferogram.grid2();
  const int n1 = g1.n_bins(), n2 = g2.n_bins();
  constexpr int kPad = 4;
  const int p1 = kPad * n1, p2 = kPad * n2;

  const Eigen::ArrayXXd counts = interferogram.counts();
  std::vector<std::complex<double>> buf(static_cast<std::size_t>(p1) * p2,
                                        {0.0, 0.0});
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j)
      buf[static_cast<std::size_t>(i) * p2 + j] = counts(i, j);
  dft2(buf, p1, p2, FFTW_FORWARD);

  std::vector<double> mag(buf.size());
  for (std::size_t k = 0; k < buf.size(); ++k) mag[k] = std::abs(buf[k]);

  std::vector<double> sorted = mag;
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2,
                   sorted.end());
  const double median = sorted[sorted.size() / 2];

  // Zero padding extends the frequency span at the same spacing, so the
  // padded time axis is four times finer.
  const double dw1 = g1.spacing();
  const double dw2 = g2.spacing();

  auto at = [&](int m1, int m2) {
    return mag[static_cast<std::size_t>(m1) * p2 + m2];
  };

  // Largest strict local maximum inside the quadrant t1 < 0, t2 > 0, away
  // from its edges. The global quadrant maximum would be the shoulder of the
  // baseband lobe next to the axes whenever the reference is weak; the
  // baseband tail is monotone, so insisting on a local maximum skips it.
  constexpr int kEdge = 2;
  const int half1 = p1 / 2, half2 = p2 / 2;
  int best1 = -1, best2 = -1;
  double best = 0.0;
  for (int m1 = 0; m1 < p1; ++m1) {
    const double t1 = dft_time(m1, p1, dw1);
    if (!(t1 < 0.0)) continue;
    // Reject bins on the quadrant boundary: they belong to the baseband or
    // to wrap-around, not to a resolved sideband.
    if (std::min(p1 - m1, m1) <= kEdge || std::abs(m1 - half1) <= kEdge)
      continue;
    for (int m2 = 0; m2 < p2; ++m2) {
      const double t2 = dft_time(m2, p2, dw2);
      if (!(t2 > 0.0)) continue;
      if (std::min(m2, p2 - m2) <= kEdge || std::abs(m2 - half2) <= kEdge)
        continue;
      const double v = at(m1, m2);
      if (v <= best) continue;
      bool local_max = true;
      for (int a = -1; a <= 1 && local_max; ++a)
        for (int b = -1; b <= 1 && local_max; ++b) {
          if (a == 0 && b == 0) continue;
          if (at(m1 + a, m2 + b) >= v) local_max = false;
        }
      if (!local_max) continue;
      best = v;
      best1 = m1;
      best2 = m2;
    }
  }
  // Significance: well above the plane's median and above the ringing floor
  // that padding the truncated spectrum leaves around the baseband. A usable
  // interference term carries orders of magnitude more than 1e-6 of the
  // total counts.
  const double mag_max = *std::max_element(mag.begin(), mag.end());
  bool ok = best1 >= 0 && best >= 5.0 * median && best >= 1e-6 * mag_max;

  // Isolation: between a resolved sideband and the baseband the magnitude
  // drops to the noise floor. Ripples of the baseband itself (sign changes
  // in its envelope) fail this because the inner lobes dominate them.
  if (ok) {
    const int ms1 = (best1 <= (p1 - 1) / 2) ? best1 : best1 - p1;
    const int ms2 = (best2 <= (p2 - 1) / 2) ? best2 : best2 - p2;
    for (double fr : {0.35, 0.5, 0.65}) {
      const int q1 = static_cast<int>(std::lround(fr * ms1));
      const int q2 = static_cast<int>(std::lround(fr * ms2));
      const double v = at((q1 + p1) % p1, (q2 + p2) % p2);
      if (v >= 0.5 * best) {
        ok = false;
        break;
      }
    }
  }
  if (!ok)
    throw NumericError(
        "locate_sideband: no isolated interference peak in the t1 < 0 < t2 "
        "quadrant; check the delay and count statistics");

  auto safe_log = [&](int m1, int m2) {
    return std::log(std::max(at(m1, m2), 1e-300));
  };
  const double off1 = log_parabola_offset(safe_log(best1 - 1, best2),
                                          safe_log(best1, best2),
                                          safe_log(best1 + 1, best2));
  const double off2 = log_parabola_offset(safe_log(best1, best2 - 1),
                                          safe_log(best1, best2),
                                          safe_log(best1, best2 + 1));

  const double dt1 = units::kTwoPi / (p1 * dw1);
  const double dt2 = units::kTwoPi / (p2 * dw2);
  const int ms1 = (best1 <= (p1 - 1) / 2) ? best1 : best1 - p1;
  const int ms2 = (best2 <= (p2 - 1) / 2) ? best2 : best2 - p2;

  SidebandLocation loc;
  loc.t1_fs = (ms1 + off1) * dt1;
  loc.t2_fs = (ms2 + off2) * dt2;
  loc.tau_fs = 0.5 * (loc.t2_fs - loc.t1_fs);
  loc.peak_magnitude = best;
  loc.median_magnitude = median;
  return loc;
}

FourierPlane fourier_magnitude(const Interferogram& interferogram) {
  const int n1 = interferogram.grid1().n_bins();
  const int n2 = interferogram.grid2().n_bins();
  const Eigen::ArrayXXd counts = interferogram.counts();
  std::vector<std::complex<double>> buf(static_cast<std::size_t>(n1) * n2);
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j)
      buf[static_cast<std::size_t>(i) * n2 + j] = counts(i, j);
  dft2(buf, n1, n2, FFTW_FORWARD);

  FourierPlane plane;
  plane.dt1_fs = units::kTwoPi / (n1 * interferogram.grid1().spacing());
  plane.dt2_fs = units::kTwoPi / (n2 * interferogram.grid2().spacing());
  plane.magnitude.resize(n1, n2);
  for (int m1 = 0; m1 < n1; ++m1)
    for (int m2 = 0; m2 < n2; ++m2)
      plane.magnitude((m1 + n1 / 2) % n1, (m2 + n2 / 2) % n2) =
          std::abs(buf[static_cast<std::size_t>(m1) * n2 + m2]);
  return plane;
}

Jsa fourier_filter(const Interferogram& interferogram, const FilterSpec& spec) {
  const FrequencyGrid& g1 = interferogram.grid1();
  const FrequencyGrid& g2 = interferogram.grid2();
  spec.validate(g1, g2);
  const int n1 = g1.n_bins(), n2 = g2.n_bins();

  const Eigen::ArrayXXd counts = interferogram.counts();
  std::vector<std::complex<double>> buf(static_cast<std::size_t>(n1) * n2);
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j)
      buf[static_cast<std::size_t>(i) * n2 + j] = counts(i, j);

  dft2(buf, n1, n2, FFTW_FORWARD);
  for (int m1 = 0; m1 < n1; ++m1) {
    const double t1 = dft_time(m1, n1, g1.spacing());
    for (int m2 = 0; m2 < n2; ++m2) {
      const double t2 = dft_time(m2, n2, g2.spacing());
      buf[static_cast<std::size_t>(m1) * n2 + m2] *= spec.value(t1, t2);
    }
  }
  dft2(buf, n1, n2, FFTW_BACKWARD);

  // FFTW leaves the inverse unnormalized; the interference term enters the
  // measured correlation with weight -1/4.
  const double scale = -4.0 / (static_cast<double>(n1) * n2);
  Eigen::MatrixXcd gamma(n1, n2);
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j)
      gamma(i, j) = scale * buf[static_cast<std::size_t>(i) * n2 + j];
  return Jsa(g1, g2, std::move(gamma));
}

}  // namespace spm
