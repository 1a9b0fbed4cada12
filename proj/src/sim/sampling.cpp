#include "sim/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "core/errors.hpp"
#include "core/rng.hpp"
#include "core/units.hpp"

namespace spm {

Interferogram sample_counts(const Interferogram& expected,
                            std::int64_t total_events, std::uint64_t seed) {
  if (total_events <= 0)
    throw ConfigError("sample_counts: total_events must be positive");
  const double total = expected.total();
  if (!(total > 0.0))
    throw ConfigError("sample_counts: expected counts are all zero");

  Rng rng(seed, /*stream=*/0x5a3);
  std::vector<Eigen::ArrayXXd> planes(expected.n_planes());
  std::int64_t remaining = total_events;
  double prob_remaining = 1.0;
  for (int k = 0; k < expected.n_planes(); ++k) {
    const auto& p = expected.plane(k);
    planes[k] = Eigen::ArrayXXd::Zero(p.rows(), p.cols());
    for (int j = 0; j < p.cols() && remaining > 0; ++j)
      for (int i = 0; i < p.rows() && remaining > 0; ++i) {
        const double q = p(i, j) / total;
        if (q <= 0.0) continue;
        double cond = q / prob_remaining;
        prob_remaining -= q;
        if (cond >= 1.0 || prob_remaining <= 0.0) {
          planes[k](i, j) = static_cast<double>(remaining);
          remaining = 0;
          break;
        }
        std::binomial_distribution<std::int64_t> bin(remaining, cond);
        const std::int64_t c = bin(rng);
        planes[k](i, j) = static_cast<double>(c);
        remaining -= c;
      }
  }
  // Any residue from probability roundoff lands in the most likely bin.
  if (remaining > 0) {
    int bk = 0;
    Eigen::Index bi = 0, bj = 0;
    double best = -1.0;
    for (int k = 0; k < expected.n_planes(); ++k) {
      Eigen::Index i, j;
      const double m = expected.plane(k).maxCoeff(&i, &j);
      if (m > best) {
        best = m;
        bk = k;
        bi = i;
        bj = j;
      }
    }
    planes[bk](bi, bj) += static_cast<double>(remaining);
  }

  if (expected.has_herald_axis())
    return Interferogram(expected.grid1(), expected.grid2(),
                         expected.herald_grid(), std::move(planes));
  return Interferogram(expected.grid1(), expected.grid2(), std::move(planes[0]));
}

SynthesizedStream synthesize_tag_stream(const Interferogram& expected3d,
                                        const DetectorModel& det,
                                        double duration_s, double rate_per_s,
                                        std::uint64_t seed) {
  det.validate();
  if (!expected3d.has_herald_axis())
    throw ConfigError("synthesize_tag_stream: 3D expected histogram required");
  if (!(duration_s > 0.0) || !(rate_per_s > 0.0))
    throw ConfigError("synthesize_tag_stream: duration and rate must be positive");
  const double total = expected3d.total();
  if (!(total > 0.0))
    throw ConfigError("synthesize_tag_stream: expected counts are all zero");

  SynthesizedStream out;
  out.stream.rep_period_ns = det.rep_period_ns;
  const double rep_ps = det.rep_period_ps();
  const double occupancy = rate_per_s * det.rep_period_ns * 1e-9;
  if (occupancy > 1.0)
    out.warning = "event rate exceeds one expected event per pulse per channel; "
                  "pile-up is not modeled";

  // Flattened cumulative distribution over (herald, w1, w2) bins.
  const int n1 = expected3d.grid1().n_bins();
  const int n2 = expected3d.grid2().n_bins();
  const int nh = expected3d.n_planes();
  std::vector<double> cdf;
  cdf.reserve(static_cast<std::size_t>(n1) * n2 * nh);
  double acc = 0.0;
  for (int k = 0; k < nh; ++k) {
    const auto& p = expected3d.plane(k);
    for (int i = 0; i < n1; ++i)
      for (int j = 0; j < n2; ++j) {
        acc += p(i, j) / total;
        cdf.push_back(acc);
      }
  }

  Rng rng(seed, /*stream=*/0x711);
  std::poisson_distribution<std::int64_t> n_events_dist(rate_per_s * duration_s);
  const std::int64_t n_events = n_events_dist(rng);
  out.n_generated = n_events;

  const auto n_pulses = static_cast<std::int64_t>(duration_s * 1e12 / rep_ps);
  if (n_pulses < 1)
    throw ConfigError("synthesize_tag_stream: duration shorter than one pulse");

  std::vector<std::int64_t> pulses(n_events);
  for (auto& p : pulses)
    p = 2 + static_cast<std::int64_t>(rng.uniform() * static_cast<double>(n_pulses));
  std::sort(pulses.begin(), pulses.end());

  const double lambda_c[3] = {
      units::radfs_to_wavelength_nm(expected3d.grid1().center()),
      units::radfs_to_wavelength_nm(expected3d.grid2().center()),
      units::radfs_to_wavelength_nm(expected3d.herald_grid().center())};
  const double jitter_sigma_ps = det.jitter_fwhm_ps * units::kFwhmToSigma;
  std::normal_distribution<double> jitter(0.0, 1.0);

  out.stream.records.reserve(static_cast<std::size_t>(3 * n_events));
  for (std::int64_t e = 0; e < n_events; ++e) {
    const double u = rng.uniform();
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    std::size_t flat = static_cast<std::size_t>(it - cdf.begin());
    if (flat >= cdf.size()) flat = cdf.size() - 1;
    const int k = static_cast<int>(flat / (static_cast<std::size_t>(n1) * n2));
    const int i = static_cast<int>((flat / n2) % n1);
    const int j = static_cast<int>(flat % n2);

    const double detunings[3] = {expected3d.grid1().detuning(i),
                                 expected3d.grid2().detuning(j),
                                 expected3d.herald_grid().detuning(k)};
    for (int ch = 0; ch < 3; ++ch) {
      if (det.efficiency < 1.0 && rng.uniform() >= det.efficiency) continue;
      double offset =
          detuning_to_offset_ps(detunings[ch], det, lambda_c[ch]);
      if (jitter_sigma_ps > 0.0) offset += jitter_sigma_ps * jitter(rng);
      const double t = static_cast<double>(pulses[e]) * rep_ps + offset;
      TimeTagRecord r;
      r.timestamp_ps = static_cast<std::uint64_t>(std::llround(std::max(t, 0.0)));
      r.channel = static_cast<std::uint8_t>(ch);
      out.stream.records.push_back(r);
    }
  }
  std::sort(out.stream.records.begin(), out.stream.records.end(),
            [](const TimeTagRecord& a, const TimeTagRecord& b) {
              return a.timestamp_ps < b.timestamp_ps;
            });
  return out;
}

}  // namespace spm
