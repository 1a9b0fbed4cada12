#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <optional>

#include "core/errors.hpp"
#include "core/rng.hpp"
#include "core/units.hpp"
#include "recon/fourier_filter.hpp"
#include "recon/mode_estimate.hpp"
#include "recon/stitch.hpp"
#include "sim/interference.hpp"
#include "sim/source_model.hpp"
#include "support/oracles.hpp"

using namespace spm;

namespace {

const double kCenter = units::wavelength_nm_to_radfs(1550.0);

// Grid chosen so the 10 ps sideband sits far outside the baseband and the
// flat-top window covers the interference term without truncation:
// dw = 2*pi / (20 * tau), 512 bins.
const double kTau = 1.0e4;  // fs
const FrequencyGrid kFine(kCenter, 511.0 * units::kTwoPi / (20.0 * kTau), 512);

// Longer delay used by the precision tests: the interference term and the
// fringe-free baseband are separated by many widths of either.
const double kTauFar = 1.5e4;

FilterSpec wide_tukey(double tau_fs) {
  return FilterSpec::tukey_for_delay(tau_fs, 6000.0, 2500.0);
}

Jsa gamma_truth(const SpectralMode& psi, const SpectralMode& alpha,
                double tau_fs) {
  return Jsa(psi.grid(), psi.grid(),
             test::gamma_direct(psi, alpha, tau_fs).matrix());
}

double relative_error(const Jsa& a, const Jsa& b) {
  return (a.f() - b.f()).cwiseAbs().maxCoeff() / b.f().cwiseAbs().maxCoeff();
}

SourceModel separable_source(double beta = 0.0) {
  SourceModel m;
  m.pump_bandwidth = 1.86e-3;
  m.phasematch_bandwidth = 1.86e-3 / std::sqrt(2.0);
  m.phasematch_angle_rad = std::numbers::pi / 4.0;
  m.pump_gdd_fs2 = beta;
  return m;
}

}  // namespace

TEST_CASE("filter windows validate against baseband overlap and aliasing") {
  FrequencyGrid g(kCenter, 6e-3, 128);
  // Reaching the baseband: flat top wider than the delay.
  FilterSpec bad = FilterSpec::tukey_for_delay(1.0e4, 9000.0, 2000.0);
  CHECK_THROWS_AS(bad.validate(g, g), ConfigError);
  // Beyond the unambiguous time range of the grid (T/2 = pi/dw).
  FilterSpec far = FilterSpec::tukey_for_delay(1.0e6, 4000.0, 3000.0);
  CHECK_THROWS_AS(far.validate(g, g), ConfigError);
  FilterSpec ok = FilterSpec::tukey_for_delay(1.0e4, 3000.0, 2000.0);
  CHECK_NOTHROW(ok.validate(g, g));
  // Gaussian default width is tau/4.
  FilterSpec gauss = FilterSpec::gaussian_for_delay(8000.0);
  CHECK(gauss.sigma_t_fs == doctest::Approx(2000.0));
  CHECK(gauss.center_t1_fs == doctest::Approx(-8000.0));
  CHECK(gauss.center_t2_fs == doctest::Approx(8000.0));
  CHECK(gauss.value(-8000.0, 8000.0) == doctest::Approx(1.0));
  CHECK(gauss.value(-8000.0, 8000.0 + 2000.0) ==
        doctest::Approx(std::exp(-0.5)));
}

TEST_CASE("sideband location recovers the delay to sub-bin precision") {
  auto psi = test::gaussian_mode(kFine, 2e-3);
  auto ref = test::gaussian_mode(kFine, 3e-3, 0.0, 0.0, 0.01);
  Interferogram h = expected_interferogram(psi, ref, kTau,
                                           SignalStatistics::single_photon());
  SidebandLocation loc = locate_sideband(h);
  CHECK(loc.t1_fs < 0.0);
  CHECK(loc.t2_fs > 0.0);
  CHECK(loc.tau_fs == doctest::Approx(kTau).epsilon(0.01));
  CHECK(std::abs(loc.tau_fs - kTau) < 100.0);
  CHECK(loc.peak_magnitude > 5.0 * loc.median_magnitude);

  // Doubling the delay doubles the located offset.
  Interferogram h2 = expected_interferogram(psi, ref, 2.0 * kTau,
                                            SignalStatistics::single_photon());
  SidebandLocation loc2 = locate_sideband(h2);
  CHECK(loc2.tau_fs == doctest::Approx(2.0 * kTau).epsilon(0.01));

  // No fringes at zero delay: nothing stands out.
  Interferogram flat = expected_interferogram(
      psi, ref, 0.0, SignalStatistics::single_photon());
  CHECK_THROWS_AS(locate_sideband(flat), NumericError);
}

TEST_CASE("fourier filter isolates the interference term") {
  auto psi = test::gaussian_mode(kFine, 1.5e-3, 2e-4, 0.0);
  auto ref = test::gaussian_mode(kFine, 2.2e-3, 0.0, 0.0, 0.01);
  Interferogram h = expected_interferogram(psi, ref, kTauFar,
                                           SignalStatistics::single_photon());
  Jsa gamma_hat = fourier_filter(h, wide_tukey(kTauFar));
  Jsa truth = gamma_truth(psi.normalized(), ref, kTauFar);
  CHECK(relative_error(gamma_hat, truth) < 1e-6);
}

TEST_CASE("filtering the fringe-free part leaves nothing") {
  auto psi = test::gaussian_mode(kFine, 1.5e-3);
  auto ref = test::gaussian_mode(kFine, 2.2e-3, 0.0, 0.0, 0.01);
  // zeta only: the single-photon pattern minus its interference term.
  Eigen::ArrayXXd zeta = 0.25 * test::zeta_direct(psi, ref);
  Interferogram h(kFine, kFine, zeta);
  Jsa gamma_hat = fourier_filter(h, wide_tukey(kTauFar));
  const double leak = gamma_hat.f().cwiseAbs().maxCoeff() / zeta.maxCoeff();
  CHECK(leak <= 1e-8);
}

TEST_CASE("fourier filter is linear in the counts") {
  auto psi_a = test::gaussian_mode(kFine, 1.5e-3);
  auto psi_b = test::gaussian_mode(kFine, 1.8e-3, 3e-4);
  auto ref = test::gaussian_mode(kFine, 2.2e-3, 0.0, 0.0, 0.01);
  const auto stats = SignalStatistics::single_photon();
  Interferogram ha = expected_interferogram(psi_a, ref, kTauFar, stats);
  Interferogram hb = expected_interferogram(psi_b, ref, kTauFar, stats);
  Interferogram mix(kFine, kFine, 0.3 * ha.counts() + 0.7 * hb.counts());
  const FilterSpec spec = wide_tukey(kTauFar);
  Jsa fa = fourier_filter(ha, spec);
  Jsa fb = fourier_filter(hb, spec);
  Jsa fm = fourier_filter(mix, spec);
  const Eigen::MatrixXcd expect = 0.3 * fa.f() + 0.7 * fb.f();
  CHECK((fm.f() - expect).cwiseAbs().maxCoeff() /
            expect.cwiseAbs().maxCoeff() <=
        1e-12);
}

TEST_CASE("conjugate sideband yields the adjoint estimate") {
  auto psi = test::gaussian_mode(kFine, 1.5e-3, 2e-4);
  auto ref = test::gaussian_mode(kFine, 2.2e-3, 0.0, 0.0, 0.01);
  Interferogram h = expected_interferogram(psi, ref, kTauFar,
                                           SignalStatistics::single_photon());
  FilterSpec spec = wide_tukey(kTauFar);
  Jsa gamma_hat = fourier_filter(h, spec);
  FilterSpec mirror = spec;
  std::swap(mirror.center_t1_fs, mirror.center_t2_fs);
  Jsa other = fourier_filter(h, mirror);
  // The mirrored window picks the conjugate term.
  const double err =
      (other.f() - gamma_hat.f().conjugate()).cwiseAbs().maxCoeff() /
      gamma_hat.f().cwiseAbs().maxCoeff();
  CHECK(err < 1e-6);
}

TEST_CASE("fourier magnitude plane shows baseband and both sidebands") {
  auto psi = test::gaussian_mode(kFine, 2e-3);
  auto ref = test::gaussian_mode(kFine, 3e-3, 0.0, 0.0, 0.01);
  Interferogram h = expected_interferogram(psi, ref, kTau,
                                           SignalStatistics::single_photon());
  FourierPlane plane = fourier_magnitude(h);
  const int n = 512;
  REQUIRE(plane.magnitude.rows() == n);
  REQUIRE(plane.magnitude.cols() == n);
  const int c = n / 2;
  const int shift = static_cast<int>(std::lround(kTau / plane.dt1_fs));
  const double base = plane.magnitude(c, c);
  const double side_plus = plane.magnitude(c - shift, c + shift);
  const double side_minus = plane.magnitude(c + shift, c - shift);
  CHECK(base > side_plus);
  CHECK(side_plus > 100.0 * plane.magnitude(c + n / 4, c + n / 4));
  CHECK(side_minus == doctest::Approx(side_plus).epsilon(1e-6));
}

TEST_CASE("reference removal inverts the known factors") {
  auto psi = test::gaussian_mode(kFine, 2e-3, 0.0, 5.0e4);
  auto ref = test::gaussian_mode(kFine, 3e-3, 0.0, 0.0, 0.01);
  const SpectralMode psi_unit = psi.normalized();
  Jsa gamma = gamma_truth(psi_unit, ref, kTau);
  ModeEstimate est = remove_reference(gamma, ref, kTau);
  CHECK(est.masked_fraction < 0.1);
  CHECK(est.hermiticity_residual < 1e-10);
  // phi = psi(w1) psi*(w2) on unmasked bins.
  double worst = 0.0;
  for (int i = 0; i < 512; i += 17)
    for (int j = 0; j < 512; j += 17) {
      if (!est.mask(i, j)) continue;
      const std::complex<double> expect =
          psi_unit.amp()(i) * std::conj(psi_unit.amp()(j));
      worst = std::max(worst, std::abs(est.phi(i, j) - expect));
    }
  CHECK(worst < 1e-9 * psi_unit.amp().abs().maxCoeff() *
                    psi_unit.amp().abs().maxCoeff());

  // Chirped mode: the recovered phase tracks the quadratic phase closely.
  const int k0 = kFine.bin_of(0.0);
  double rms = 0.0;
  int count = 0;
  for (int i = 0; i < 512; i += 5) {
    if (!est.mask(i, k0)) continue;
    const double expected_phase =
        std::arg(psi_unit.amp()(i) * std::conj(psi_unit.amp()(k0)));
    const double got = std::arg(est.phi(i, k0));
    const double d = std::remainder(got - expected_phase, units::kTwoPi);
    rms += d * d;
    ++count;
  }
  REQUIRE(count > 0);
  CHECK(std::sqrt(rms / count) < 0.05);
}

TEST_CASE("a reference far narrower than the signal is rejected") {
  // Interference data recorded with a broad reference, divided with a much
  // narrower one: most of the support falls below the division threshold.
  auto psi = test::gaussian_mode(kFine, 2e-3);
  auto broad = test::gaussian_mode(kFine, 3e-3, 0.0, 0.0, 0.01);
  auto narrow = test::gaussian_mode(kFine, 2e-4, 0.0, 0.0, 0.01);
  Jsa gamma = gamma_truth(psi.normalized(), broad, kTau);
  CHECK_THROWS_WITH_AS(remove_reference(gamma, narrow, kTau),
                       doctest::Contains("reference too narrow"),
                       NumericError);
}

TEST_CASE("mode extraction recovers rank and weights") {
  FrequencyGrid g(kCenter, 6e-3, 96);
  auto a = test::gaussian_mode(g, 1.2e-3);
  // First Hermite-Gauss partner: orthogonal to the Gaussian by symmetry.
  Eigen::ArrayXcd amp_b = a.amp() * g.detunings();
  SpectralMode b = SpectralMode(g, amp_b).normalized();

  SUBCASE("pure state") {
    ModeEstimate est;
    est.grid = g;
    est.phi = a.amp().matrix() * a.amp().matrix().adjoint();
    est.mask.setConstant(96, 96, true);
    ModeDecomposition dec = extract_modes(est, 4);
    CHECK(dec.purity == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(mode_overlap(dec.modes[0], a) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(dec.clipped_weight < 1e-12);
  }
  SUBCASE("two-mode mixture") {
    ModeEstimate est;
    est.grid = g;
    est.phi = 0.6 * (a.amp().matrix() * a.amp().matrix().adjoint()) +
              0.4 * (b.amp().matrix() * b.amp().matrix().adjoint());
    est.mask.setConstant(96, 96, true);
    ModeDecomposition dec = extract_modes(est, 4);
    CHECK(dec.weights(0) == doctest::Approx(0.6).epsilon(1e-6));
    CHECK(dec.weights(1) == doctest::Approx(0.4).epsilon(1e-6));
    CHECK(mode_overlap(dec.modes[0], a) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(mode_overlap(dec.modes[1], b) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(dec.weights.sum() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("stitching undoes independent row and column phases") {
  FrequencyGrid g(kCenter, 8e-3, 64);
  Jsa truth = build_jsa(separable_source(2.0e5), g, g);
  Rng rng(2718);
  Eigen::MatrixXcd cols = truth.f(), rows = truth.f();
  for (int j = 0; j < 64; ++j)
    cols.col(j) *= std::polar(1.0, units::kTwoPi * rng.uniform());
  for (int i = 0; i < 64; ++i)
    rows.row(i) *= std::polar(1.0, units::kTwoPi * rng.uniform());

  StitchResult sr = assemble_jsa(Jsa(g, g, cols), Jsa(g, g, rows));
  CHECK_FALSE(sr.underdetermined);
  CHECK(sr.n_components == 1);
  CHECK(sr.residual < 1e-8);
  // Rows and columns whose every bin is below the support cut keep their
  // arbitrary phases; their mass bounds the achievable overlap.
  CHECK(jsa_overlap(sr.jsa, truth) > 0.9995);

  SUBCASE("amplitude disagreement is reported but averaged away") {
    StitchResult sc =
        assemble_jsa(Jsa(g, g, (1.21 * cols).eval()), Jsa(g, g, rows));
    CHECK(sc.amplitude_discrepancy > 0.0);
    // A uniform scale is absorbed by the geometric mean and normalization.
    CHECK(jsa_overlap(sc.jsa, truth) > 0.9995);
  }
}

TEST_CASE("disconnected support is flagged as underdetermined") {
  FrequencyGrid g(kCenter, 8e-3, 32);
  Eigen::MatrixXcd f = Eigen::MatrixXcd::Zero(32, 32);
  auto blob = [&](int c, double phase) {
    for (int i = c - 4; i <= c + 4; ++i)
      for (int j = c - 4; j <= c + 4; ++j)
        f(i, j) = std::polar(std::exp(-0.1 * ((i - c) * (i - c) +
                                              (j - c) * (j - c))),
                             phase);
  };
  blob(8, 0.3);
  blob(24, 1.9);
  StitchResult sr = assemble_jsa(Jsa(g, g, f), Jsa(g, g, f));
  CHECK(sr.n_components == 2);
  CHECK(sr.underdetermined);
}

TEST_CASE("heralded reconstruction round-trips a chirped source") {
  FrequencyGrid g(kCenter, 95.0 * units::ghz_to_radfs(10.0), 96);
  Jsa truth = build_jsa(separable_source(2.0e5), g, g);
  auto ref_shape = test::gaussian_mode(g, 1.5 * 1.315218e-3);
  SpectralMode ref(g, ref_shape.amp() * std::sqrt(0.01));

  const double tau = 1.0e4;
  Interferogram hist_a = expected_heralded_histogram(truth, ref, tau, g);
  Jsa transposed(g, g, truth.f().transpose().eval());
  Interferogram hist_b = expected_heralded_histogram(transposed, ref, tau, g);

  ReconstructionSettings settings;
  settings.filter = FilterSpec::tukey_for_delay(tau, 4000.0, 3000.0);
  settings.tau_fs = tau;
  settings.threads = 2;
  ReconstructionReport report;
  StitchResult sr = reconstruct_heralded(hist_a, hist_b, ref, settings, &report);
  CHECK_FALSE(sr.underdetermined);
  CHECK(jsa_overlap(sr.jsa, truth) >= 0.999);
  CHECK(report.mean_purity > 0.99);
  CHECK(report.masked_fraction < 0.5);

  SUBCASE("thread count does not change the result") {
    ReconstructionSettings serial = settings;
    serial.threads = 1;
    StitchResult sr1 =
        reconstruct_heralded(hist_a, hist_b, ref, serial, nullptr);
    CHECK((sr1.jsa.f() - sr.jsa.f()).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("seeded reconstruction flags the missing row scan") {
  FrequencyGrid g(kCenter, 95.0 * units::ghz_to_radfs(10.0), 96);
  Jsa truth = build_jsa(separable_source(), g, g);
  auto ref_shape = test::gaussian_mode(g, 1.5 * 1.315218e-3);
  SpectralMode ref(g, ref_shape.amp() * std::sqrt(0.01));
  const double tau = 1.0e4;
  const double dw = g.spacing();

  std::vector<std::optional<Interferogram>> per_seed(96);
  for (int j = 20; j < 76; ++j) {
    const Eigen::ArrayXcd col = truth.f().col(j).array();
    const double weight = col.abs2().sum() * dw;
    if (weight < 1e-6) continue;
    SpectralMode cond(g, col);
    per_seed[j] = expected_interferogram(cond, ref, tau,
                                         SignalStatistics::coherent(weight));
  }

  ReconstructionSettings settings;
  settings.filter = FilterSpec::tukey_for_delay(tau, 4000.0, 3000.0);
  settings.tau_fs = tau;
  StitchResult sr = reconstruct_seeded(per_seed, g, ref, settings);
  CHECK(sr.underdetermined);
  // Column magnitudes survive even though cross-column phases are arbitrary.
  for (int j = 30; j < 66; j += 5) {
    SpectralMode got = sr.jsa.slice_signal(j);
    SpectralMode want = truth.slice_signal(j);
    CHECK(mode_overlap(got, want) > 0.999);
  }
  CHECK_THROWS_AS(
      reconstruct_seeded(std::vector<std::optional<Interferogram>>(96), g, ref,
                         settings),
      ConfigError);
}
