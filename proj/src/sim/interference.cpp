#include "sim/interference.hpp"

#include <cmath>
#include <complex>

#include "core/errors.hpp"
#include "core/units.hpp"

namespace spm {

namespace {

constexpr std::complex<double> kI{0.0, 1.0};

void check_fringe_sampling(double tau_fs, const FrequencyGrid& g) {
  if (tau_fs == 0.0) return;
  // Fringe period 2*pi/tau must cover at least 2.5 bins.
  if (units::kTwoPi / std::abs(tau_fs) < 2.5 * g.spacing())
    throw ConfigError(
        "expected_interferogram: delay aliases the fringes on this grid "
        "(period < 2.5 bins)");
}

Eigen::ArrayXXd expected_pure(const Eigen::ArrayXcd& psi,
                              const Eigen::ArrayXcd& alpha, double tau_fs,
                              SignalKind kind, const FrequencyGrid& g1,
                              const FrequencyGrid& g2) {
  const Eigen::ArrayXd psi2_1 = psi.abs2();
  const Eigen::ArrayXd alpha2_1 = alpha.abs2();

  const int n1 = g1.n_bins(), n2 = g2.n_bins();
  Eigen::ArrayXcd phase1(n1), phase2(n2);
  for (int k = 0; k < n1; ++k) phase1[k] = std::exp(-kI * (g1.detuning(k) * tau_fs));
  for (int k = 0; k < n2; ++k) phase2[k] = std::exp(kI * (g2.detuning(k) * tau_fs));

  // Gamma(w1,w2) = [psi a* e^{-i w1 tau}](w1) * [psi* a e^{+i w2 tau}](w2)
  const Eigen::ArrayXcd u = psi * alpha.conjugate() * phase1;
  const Eigen::ArrayXcd v = psi.conjugate() * alpha * phase2;

  Eigen::ArrayXXd out(n1, n2);
  for (int j = 0; j < n2; ++j) {
    for (int i = 0; i < n1; ++i) {
      double zeta = alpha2_1[i] * psi2_1[j] + psi2_1[i] * alpha2_1[j] +
                    alpha2_1[i] * alpha2_1[j];
      if (kind == SignalKind::Coherent) zeta += psi2_1[i] * psi2_1[j];
      if (kind == SignalKind::Thermal) zeta += 2.0 * psi2_1[i] * psi2_1[j];
      const double cross = 2.0 * (u[i] * v[j]).real();
      double val = 0.25 * (zeta - cross);
      if (val < 0.0) val = 0.0;  // roundoff at exact HOM suppression
      out(i, j) = val;
    }
  }
  return out;
}

}  // namespace

Interferogram expected_interferogram(const SpectralMode& psi,
                                     const SpectralMode& ref, double tau_fs,
                                     const SignalStatistics& stats) {
  if (!(psi.grid() == ref.grid()))
    throw ConfigError("expected_interferogram: signal/reference grid mismatch");
  if (!std::isfinite(tau_fs))
    throw ConfigError("expected_interferogram: non-finite delay");
  if (stats.kind != SignalKind::SinglePhoton && !(stats.mean_photons > 0.0))
    throw ConfigError("expected_interferogram: mean photons must be positive");
  check_fringe_sampling(tau_fs, psi.grid());

  // Signal norm^2 (dw measure) is the mean photon number: 1 for a single
  // photon, stats.mean_photons otherwise. The reference carries its own scale.
  Eigen::ArrayXcd amp = psi.normalized().amp();
  if (stats.kind != SignalKind::SinglePhoton)
    amp *= std::sqrt(stats.mean_photons);

  return Interferogram(
      psi.grid(), psi.grid(),
      expected_pure(amp, ref.amp(), tau_fs, stats.kind, psi.grid(), psi.grid()));
}

Interferogram expected_interferogram(const ModeMixture& mixture,
                                     const SpectralMode& ref, double tau_fs,
                                     const SignalStatistics& stats) {
  if (mixture.empty())
    throw ConfigError("expected_interferogram: empty mixture");
  double wsum = 0.0;
  for (const auto& [p, m] : mixture) {
    if (!(p > 0.0)) throw ConfigError("expected_interferogram: mixture weights must be positive");
    wsum += p;
  }
  Eigen::ArrayXXd acc;
  for (const auto& [p, m] : mixture) {
    Interferogram g = expected_interferogram(m, ref, tau_fs, stats);
    if (acc.size() == 0)
      acc = (p / wsum) * g.plane(0);
    else
      acc += (p / wsum) * g.plane(0);
  }
  const auto& g0 = mixture.front().second.grid();
  return Interferogram(g0, g0, std::move(acc));
}

Interferogram expected_heralded_histogram(const Jsa& jsa,
                                          const SpectralMode& ref,
                                          double tau_fs,
                                          const FrequencyGrid& herald_grid) {
  if (!(herald_grid == jsa.grid2()))
    throw ConfigError(
        "expected_heralded_histogram: herald grid must match jsa.grid2");
  if (!(ref.grid() == jsa.grid1()))
    throw ConfigError("expected_heralded_histogram: reference grid mismatch");
  check_fringe_sampling(tau_fs, jsa.grid1());

  const double dw1 = jsa.grid1().spacing();
  std::vector<Eigen::ArrayXXd> planes(herald_grid.n_bins());
  const int n1 = jsa.grid1().n_bins();
  for (int j = 0; j < herald_grid.n_bins(); ++j) {
    const Eigen::ArrayXcd col = jsa.f().col(j).array();
    const double weight = col.abs2().sum() * dw1;  // herald marginal
    if (weight <= 0.0) {
      planes[j] = Eigen::ArrayXXd::Zero(n1, n1);
      continue;
    }
    const Eigen::ArrayXcd psi = col / std::sqrt(weight);
    planes[j] = weight * expected_pure(psi, ref.amp(), tau_fs,
                                       SignalKind::SinglePhoton, jsa.grid1(),
                                       jsa.grid1());
  }
  return Interferogram(jsa.grid1(), jsa.grid1(), herald_grid, std::move(planes));
}

}  // namespace spm
