#include "sim/source_model.hpp"

#include <cmath>
#include <complex>

#include "core/errors.hpp"

namespace spm {

namespace {
constexpr std::complex<double> kI{0.0, 1.0};

double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }
}  // namespace

void SourceModel::validate() const {
  if (!(pump_bandwidth > 0.0) || !(phasematch_bandwidth > 0.0))
    throw ConfigError("source model: bandwidths must be positive");
  if (!std::isfinite(pump_gdd_fs2) || !std::isfinite(phasematch_angle_rad))
    throw ConfigError("source model: non-finite parameter");
  if (!(signal_wavelength_nm > 0.0) || !(herald_wavelength_nm > 0.0))
    throw ConfigError("source model: wavelengths must be positive");
}

double SourceModel::separable_angle(double pump_bw, double pm_bw) {
  const double s = 2.0 * pm_bw * pm_bw / (pump_bw * pump_bw);
  if (s > 1.0)
    throw ConfigError("source model: no separable angle for this width ratio");
  return 0.5 * std::asin(s);
}

SpectralMode pump_mode(const SourceModel& model, const FrequencyGrid& grid) {
  model.validate();
  const double s = model.pump_bandwidth;
  const double beta = model.pump_gdd_fs2;
  Eigen::ArrayXcd amp(grid.n_bins());
  for (int k = 0; k < grid.n_bins(); ++k) {
    const double w = grid.detuning(k);
    amp[k] = std::exp(-w * w / (2.0 * s * s)) *
             std::exp(-kI * (0.5 * beta * w * w));
  }
  return SpectralMode(grid, std::move(amp)).normalized();
}

Jsa build_jsa(const SourceModel& model, const FrequencyGrid& grid1,
              const FrequencyGrid& grid2) {
  model.validate();
  const double sp = model.pump_bandwidth;
  const double sm = model.phasematch_bandwidth;
  const double beta = model.pump_gdd_fs2;
  const double ct = std::cos(model.phasematch_angle_rad);
  const double st = std::sin(model.phasematch_angle_rad);

  Eigen::MatrixXcd f(grid1.n_bins(), grid2.n_bins());
  for (int i = 0; i < grid1.n_bins(); ++i) {
    const double w1 = grid1.detuning(i);
    for (int j = 0; j < grid2.n_bins(); ++j) {
      const double w2 = grid2.detuning(j);
      const double wp = w1 + w2;
      const double u = ct * w1 - st * w2;
      const double pm = model.sinc_phasematch
                            ? sinc(u / sm)
                            : std::exp(-u * u / (2.0 * sm * sm));
      f(i, j) = std::exp(-wp * wp / (2.0 * sp * sp)) * pm *
                std::exp(-kI * (0.5 * beta * wp * wp));
    }
  }
  return Jsa(grid1, grid2, std::move(f)).normalized().with_canonical_phase();
}

}  // namespace spm
