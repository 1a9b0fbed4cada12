#include "pipeline/runner.hpp"

#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "analysis/chirp_fit.hpp"
#include "analysis/metrics.hpp"
#include "analysis/schmidt.hpp"
#include "core/errors.hpp"
#include "core/io.hpp"
#include "core/units.hpp"
#include "ingest/coincidence.hpp"
#include "ingest/tag_stream.hpp"
#include "recon/stitch.hpp"
#include "sim/interference.hpp"
#include "sim/sampling.hpp"
#include "sim/source_model.hpp"

namespace spm {

namespace fs = std::filesystem;

namespace {

std::string join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

std::uint64_t effective_seed(const PipelineConfig& config,
                             const RunOptions& options) {
  return options.has_seed_override ? options.seed_override : config.seed;
}

/// Gaussian reference: `bandwidth_scale` times the signal's amplitude width,
/// carrying `reference.mean_photons` as its squared norm.
SpectralMode build_reference(const PipelineConfig& config, const Jsa& truth) {
  const FrequencyGrid& g = truth.grid1();
  const double dw2 = truth.grid2().spacing();
  const Eigen::ArrayXd w = g.detunings();
  Eigen::ArrayXd marginal(g.n_bins());
  for (int i = 0; i < g.n_bins(); ++i)
    marginal(i) = truth.f().row(i).squaredNorm() * dw2;
  const double total = marginal.sum();
  if (!(total > 0.0)) throw NumericError("reference: signal marginal is zero");
  const double mean = (w * marginal).sum() / total;
  const double var = ((w - mean).square() * marginal).sum() / total;
  // Intensity std -> amplitude std of the matching Gaussian.
  const double sigma_amp = std::sqrt(2.0 * var);
  const double sigma_ref = config.reference_bandwidth_scale * sigma_amp;

  Eigen::ArrayXcd amp =
      ((w - mean).square() / (-2.0 * sigma_ref * sigma_ref)).exp();
  SpectralMode ref = SpectralMode(g, amp).normalized();
  ref.amp() *= std::sqrt(config.reference_mean_photons);
  return ref;
}

Interferogram seeded_stack(const Jsa& jsa, const SpectralMode& reference,
                           double tau_fs, const FrequencyGrid& seed_grid,
                           double mean_photons) {
  const int n = jsa.grid1().n_bins();
  const int ns = seed_grid.n_bins();
  const double dw1 = jsa.grid1().spacing();
  Eigen::ArrayXd weight(ns);
  for (int j = 0; j < ns; ++j)
    weight(j) = jsa.f().col(j).squaredNorm() * dw1;
  const double w_max = weight.maxCoeff();
  if (!(w_max > 0.0)) throw NumericError("seeded_stack: zero JSA");

  std::vector<Eigen::ArrayXXd> planes(ns, Eigen::ArrayXXd::Zero(n, n));
  for (int j = 0; j < ns; ++j) {
    if (weight(j) < 1e-4 * w_max) continue;
    const SpectralMode psi =
        SpectralMode(jsa.grid1(), jsa.f().col(j).array()).normalized();
    const Interferogram g = expected_interferogram(
        psi, reference, tau_fs,
        SignalStatistics::coherent(mean_photons * weight(j) / w_max));
    planes[j] = g.counts();
  }
  return Interferogram(jsa.grid1(), jsa.grid1(), seed_grid, std::move(planes));
}

ModeMixture reduced_mixture(const Jsa& truth) {
  const SchmidtResult sr = schmidt(truth, 16);
  ModeMixture mixture;
  for (std::size_t k = 0; k < sr.modes1.size(); ++k) {
    const double p = sr.lambdas(static_cast<int>(k)) *
                     sr.lambdas(static_cast<int>(k));
    if (p > 1e-9) mixture.emplace_back(p, sr.modes1[k]);
  }
  return mixture;
}

void write_matrix_csv(const std::string& path, const Eigen::ArrayXXd& m,
                      const std::string& header) {
  std::ofstream os(path);
  if (!os) throw DataError(path + ": cannot open for writing");
  os << header;
  os.precision(12);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      os << (j ? "," : "") << m(i, j);
    os << "\n";
  }
  if (!os) throw DataError(path + ": write failed");
}

Interferogram read_histogram_checked(const std::string& path,
                                     const PipelineConfig& config,
                                     const RunOptions& options) {
  std::optional<std::uint64_t> hash;
  Interferogram h = io::read_histogram3(path, &hash);
  if (!options.force && hash && *hash != config.hash())
    throw ConfigError(path +
                      ": config hash mismatch (file was produced by another "
                      "configuration; pass --force to override)");
  return h;
}

struct DatasetPaths {
  std::string a, b;
  std::string kind;  // ingested | sampled | expected
};

DatasetPaths pick_histogram_pair(const std::string& dir) {
  for (const char* kind : {"ingested", "sampled", "expected"}) {
    const std::string a = join(dir, std::string(kind) + "_a.h3b");
    const std::string b = join(dir, std::string(kind) + "_b.h3b");
    if (fs::exists(a) && fs::exists(b)) return {a, b, kind};
  }
  throw DataError(dir +
                  ": no histogram pair found (expected ingested_/sampled_/"
                  "expected_{a,b}.h3b); run simulate or ingest first");
}

void append_manifest(const std::string& dir, const PipelineConfig& config,
                     const std::vector<std::string>& outputs,
                     const std::string& stage) {
  std::ofstream os(join(dir, "manifest.txt"), std::ios::app);
  os << "[" << stage << "] config_hash = " << config.hash() << "\n";
  for (const auto& o : outputs) os << o << "\n";
}

}  // namespace

void run_simulate(const PipelineConfig& config, const RunOptions& options) {
  config.validate();
  fs::create_directories(options.out_dir);
  const FrequencyGrid g = config.signal_grid();
  const FrequencyGrid gh = config.herald_grid();
  const SignalStatistics stats = config.signal_statistics();
  const bool heralded_shape = stats.kind != SignalKind::Thermal;
  if (heralded_shape && !(gh == g))
    throw ConfigError(
        "simulate: heralded and seeded runs need matching signal and herald "
        "grids (both measurements reuse the same spectrometer)");

  const Jsa truth = build_jsa(config.source_model(), g, gh);
  const SpectralMode ref = build_reference(config, truth);
  const DetectorModel det = config.detector_model();
  const double tau = config.tau_fs();
  const std::uint64_t hash = config.hash();
  const std::uint64_t seed = effective_seed(config, options);

  std::vector<std::string> outputs;
  io::write_jsa_binary(join(options.out_dir, "truth_jsa.jsab"), truth, hash);
  outputs.push_back("truth_jsa.jsab");
  io::write_mode_csv(join(options.out_dir, "reference_mode.csv"), ref, hash);
  outputs.push_back("reference_mode.csv");

  if (heralded_shape) {
    Interferogram hist_a =
        (stats.kind == SignalKind::SinglePhoton)
            ? expected_heralded_histogram(truth, ref, tau, gh)
            : seeded_stack(truth, ref, tau, gh, stats.mean_photons);
    const Jsa truth_t(gh, g, truth.f().transpose());
    Interferogram hist_b =
        (stats.kind == SignalKind::SinglePhoton)
            ? expected_heralded_histogram(truth_t, ref, tau, g)
            : seeded_stack(truth_t, ref, tau, g, stats.mean_photons);

    io::write_histogram3(join(options.out_dir, "expected_a.h3b"), hist_a, hash);
    io::write_histogram3(join(options.out_dir, "expected_b.h3b"), hist_b, hash);
    outputs.push_back("expected_a.h3b");
    outputs.push_back("expected_b.h3b");

    if (config.events > 0) {
      const Interferogram blur_a = apply_detector_blur(hist_a, det);
      const Interferogram blur_b = apply_detector_blur(hist_b, det);
      io::write_histogram3(join(options.out_dir, "sampled_a.h3b"),
                           sample_counts(blur_a, config.events, seed), hash);
      io::write_histogram3(join(options.out_dir, "sampled_b.h3b"),
                           sample_counts(blur_b, config.events, seed + 1), hash);
      outputs.push_back("sampled_a.h3b");
      outputs.push_back("sampled_b.h3b");
      if (config.emit_tags) {
        const double duration =
            static_cast<double>(config.events) / config.rate_per_s;
        const SynthesizedStream sa =
            synthesize_tag_stream(hist_a, det, duration, config.rate_per_s,
                                  seed + 2);
        const SynthesizedStream sb =
            synthesize_tag_stream(hist_b, det, duration, config.rate_per_s,
                                  seed + 3);
        write_stream(join(options.out_dir, "tags_a.ttg"), sa.stream);
        write_stream(join(options.out_dir, "tags_b.ttg"), sb.stream);
        outputs.push_back("tags_a.ttg");
        outputs.push_back("tags_b.ttg");
        for (const auto* s : {&sa, &sb})
          if (!s->warning.empty()) outputs.push_back("# warning: " + s->warning);
      }
    }
  } else {
    const ModeMixture mixture = reduced_mixture(truth);
    const Interferogram g2d =
        expected_interferogram(mixture, ref, tau, stats);
    io::write_interferogram_csv(join(options.out_dir, "expected_2d.csv"), g2d,
                                hash);
    outputs.push_back("expected_2d.csv");
    if (config.events > 0) {
      const Interferogram blurred = apply_detector_blur(g2d, det);
      io::write_interferogram_csv(
          join(options.out_dir, "sampled_2d.csv"),
          sample_counts(blurred, config.events, seed), hash);
      outputs.push_back("sampled_2d.csv");
    }
  }
  append_manifest(options.out_dir, config, outputs, "simulate");
}

void run_ingest(const PipelineConfig& config, const RunOptions& options) {
  config.validate();
  const FrequencyGrid g = config.signal_grid();
  const FrequencyGrid gh = config.herald_grid();
  const DetectorModel det = config.detector_model();
  const double lambda_c[3] = {config.center_wavelength_nm,
                              config.center_wavelength_nm,
                              config.center_wavelength_nm};
  std::ostringstream report;
  std::vector<std::string> outputs;
  bool found = false;
  for (const char* suffix : {"a", "b"}) {
    const std::string tag_path =
        join(options.out_dir, std::string("tags_") + suffix + ".ttg");
    if (!fs::exists(tag_path)) continue;
    found = true;
    const TimeTagStream stream = read_stream(tag_path);
    CoincidenceStats stats;
    const std::vector<CoincidenceEvent> events = find_coincidences(
        stream, config.coincidence_window_ps, 3, &stats);
    const HistogramResult hist =
        histogram_events(events, det, lambda_c, g, g, &gh);
    const std::string out_name = std::string("ingested_") + suffix + ".h3b";
    io::write_histogram3(join(options.out_dir, out_name), hist.histogram,
                         config.hash());
    outputs.push_back(out_name);
    report << "stream " << suffix << ": records = " << stream.records.size()
           << ", pulses_with_tags = " << stats.pulses_with_tags
           << ", coincidences = " << events.size()
           << ", binned = " << hist.binned << ", out_of_range = " << hist.dropped
           << ", multi_tag_dropped = " << stats.multi_tag_dropped
           << ", window_dropped = " << stats.window_dropped << "\n";
  }
  if (!found)
    throw DataError(options.out_dir +
                    ": no tag streams (tags_a.ttg / tags_b.ttg) to ingest");
  std::ofstream os(join(options.out_dir, "ingest_report.txt"));
  os << report.str();
  append_manifest(options.out_dir, config, outputs, "ingest");
}

void run_reconstruct(const PipelineConfig& config, const RunOptions& options) {
  config.validate();
  const SpectralMode ref =
      io::read_mode_csv(join(options.out_dir, "reference_mode.csv"));

  ReconstructionSettings settings;
  settings.filter = config.filter_spec();
  settings.tau_fs = config.tau_fs();
  settings.division_threshold = config.division_threshold;
  settings.threads = options.threads;

  std::ostringstream report;
  std::vector<std::string> outputs;

  if (config.statistics == "thermal") {
    std::string input = join(options.out_dir, "sampled_2d.csv");
    if (!fs::exists(input)) input = join(options.out_dir, "expected_2d.csv");
    if (!fs::exists(input))
      throw DataError(input + ": no thermal interferogram found; run simulate");
    const Interferogram g2d = io::read_interferogram_csv(input);
    const Jsa gamma = fourier_filter(g2d, settings.filter);
    const ModeEstimate est = remove_reference(
        gamma, ref.normalized(), settings.tau_fs, settings.division_threshold);
    const ModeDecomposition dec = extract_modes(est, 16);
    io::write_mode_csv(join(options.out_dir, "recovered_mode.csv"),
                       dec.modes[0], config.hash());
    outputs.push_back("recovered_mode.csv");
    {
      std::ofstream os(join(options.out_dir, "mode_weights.csv"));
      os << "# k,weight\n";
      for (int k = 0; k < dec.weights.size(); ++k)
        os << k << "," << dec.weights(k) << "\n";
    }
    outputs.push_back("mode_weights.csv");
    report << "input = " << fs::path(input).filename().string() << "\n"
           << "purity = " << dec.purity << "\n"
           << "clipped_weight = " << dec.clipped_weight << "\n"
           << "hermiticity_residual = " << est.hermiticity_residual << "\n"
           << "masked_fraction = " << est.masked_fraction << "\n";
  } else {
    const DatasetPaths paths = pick_histogram_pair(options.out_dir);
    const Interferogram hist_a =
        read_histogram_checked(paths.a, config, options);
    const Interferogram hist_b =
        read_histogram_checked(paths.b, config, options);

    ReconstructionReport rec;
    const StitchResult result = reconstruct_heralded(
        hist_a, hist_b, SpectralMode(ref.grid(), ref.amp()), settings, &rec);
    io::write_jsa_binary(join(options.out_dir, "jsa_reconstructed.jsab"),
                         result.jsa, config.hash());
    outputs.push_back("jsa_reconstructed.jsab");
    report << "inputs = " << paths.kind << "\n"
           << "hermiticity_residual = " << rec.hermiticity_residual << "\n"
           << "masked_fraction = " << rec.masked_fraction << "\n"
           << "clipped_weight = " << rec.clipped_weight << "\n"
           << "mean_purity = " << rec.mean_purity << "\n"
           << "stitch_residual = " << rec.stitch_residual << "\n"
           << "stitch_iterations = " << result.iterations << "\n"
           << "stitch_components = " << rec.stitch_components << "\n"
           << "amplitude_discrepancy = " << result.amplitude_discrepancy << "\n"
           << "underdetermined = " << (rec.underdetermined ? "yes" : "no")
           << "\n";
    if (rec.underdetermined) {
      std::ofstream os(join(options.out_dir, "reconstruction_report.txt"));
      os << report.str();
      throw NumericError(
          "reconstruct: phase stitching underdetermined (disconnected "
          "support); per-component result written");
    }
  }
  std::ofstream os(join(options.out_dir, "reconstruction_report.txt"));
  os << report.str();
  append_manifest(options.out_dir, config, outputs, "reconstruct");
}

void run_analyze(const PipelineConfig& config, const RunOptions& options,
                 const std::string& jsa_path) {
  config.validate();
  const std::string path =
      jsa_path.empty() ? join(options.out_dir, "jsa_reconstructed.jsab")
                       : jsa_path;
  std::optional<std::uint64_t> hash;
  const Jsa jsa = io::read_jsa_binary(path, &hash);
  if (!options.force && hash && *hash != config.hash())
    throw ConfigError(path +
                      ": config hash mismatch; pass --force to analyze anyway");

  const SchmidtResult complex_sr = schmidt(jsa);
  const Jsa amplitude_only(jsa.grid1(), jsa.grid2(),
                           jsa.f().cwiseAbs().cast<std::complex<double>>());
  const SchmidtResult amp_sr = schmidt(amplitude_only);

  std::ostringstream report;
  report << "jsa = " << fs::path(path).filename().string() << "\n"
         << "schmidt_number_complex = " << complex_sr.schmidt_number << "\n"
         << "schmidt_number_amplitude = " << amp_sr.schmidt_number << "\n"
         << "g2_predicted = " << g2_predicted(complex_sr.schmidt_number)
         << "\n";

  try {
    const ChirpFit fit = fit_chirp(jsa, config.amplitude_floor);
    report << "chirp_beta_fs2 = " << fit.beta_fs2 << "\n"
           << "chirp_beta_stderr_fs2 = " << fit.beta_stderr_fs2 << "\n"
           << "chirp_fit_rms_rad = " << fit.rms_residual_rad << "\n"
           << "chirp_fit_bins = " << fit.n_accepted << "\n";
  } catch (const NumericError& e) {
    report << "chirp_fit_error = " << e.what() << "\n";
  }

  // Visibility and the Fourier plane need an interferogram; use whichever
  // the run produced.
  std::optional<Interferogram> g2d;
  const std::string flat = join(options.out_dir, "expected_2d.csv");
  if (fs::exists(flat)) {
    g2d = io::read_interferogram_csv(flat);
  } else {
    const std::string h3 = join(options.out_dir, "expected_a.h3b");
    if (fs::exists(h3))
      g2d = read_histogram_checked(h3, config, options);
  }
  if (g2d) {
    try {
      report << "fringe_visibility = "
             << fringe_visibility(*g2d, config.smooth_radius) << "\n";
    } catch (const Error& e) {
      report << "fringe_visibility_error = " << e.what() << "\n";
    }
    const FourierPlane plane = fourier_magnitude(*g2d);
    write_matrix_csv(join(options.out_dir, "fourier_magnitude.csv"),
                     plane.magnitude,
                     "# |F{G}|, t = 0 at center bin; dt1_fs = " +
                         std::to_string(plane.dt1_fs) +
                         ", dt2_fs = " + std::to_string(plane.dt2_fs) + "\n");
  }

  {
    std::ofstream os(join(options.out_dir, "schmidt_weights.csv"));
    os << "# k,lambda\n";
    for (int k = 0; k < complex_sr.lambdas.size(); ++k)
      os << k << "," << complex_sr.lambdas(k) << "\n";
  }
  const std::string grid_header =
      "# grid1 center=" + std::to_string(jsa.grid1().center()) +
      " dw=" + std::to_string(jsa.grid1().spacing()) +
      " n=" + std::to_string(jsa.grid1().n_bins()) + "\n";
  write_matrix_csv(join(options.out_dir, "amplitude.csv"),
                   jsa.f().cwiseAbs().array(), grid_header);
  Eigen::ArrayXXd phase(jsa.f().rows(), jsa.f().cols());
  const double floor = config.amplitude_floor * jsa.f().cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < phase.rows(); ++i)
    for (Eigen::Index j = 0; j < phase.cols(); ++j)
      phase(i, j) =
          std::abs(jsa.f()(i, j)) >= floor ? std::arg(jsa.f()(i, j)) : 0.0;
  write_matrix_csv(join(options.out_dir, "phase.csv"), phase, grid_header);

  std::ofstream os(join(options.out_dir, "analysis_report.txt"));
  os << report.str();
  append_manifest(
      options.out_dir, config,
      {"analysis_report.txt", "schmidt_weights.csv", "amplitude.csv",
       "phase.csv"},
      "analyze");
}

void run_pipeline(const PipelineConfig& config, const RunOptions& options) {
  run_simulate(config, options);
  if (config.emit_tags && config.events > 0 && config.statistics != "thermal")
    run_ingest(config, options);
  run_reconstruct(config, options);
  if (config.statistics != "thermal") run_analyze(config, options);
}

}  // namespace spm
