#pragma once

#include <cstdint>
#include <string>

#include "core/interferogram.hpp"
#include "ingest/tag_stream.hpp"
#include "sim/detector.hpp"

namespace spm {

/// Multinomial draw of total_events over all bins, with probabilities
/// proportional to the expected counts. Deterministic for a fixed seed.
Interferogram sample_counts(const Interferogram& expected,
                            std::int64_t total_events, std::uint64_t seed);

struct SynthesizedStream {
  TimeTagStream stream;
  std::int64_t n_generated = 0;  // coincidence groups before thinning
  std::string warning;           // pile-up contract violations, if any
};

/// Emulated acquisition: Poisson-distributed coincidence groups drawn from a
/// 3D expected histogram, arrival times from the dispersion map plus Gaussian
/// jitter, detection efficiency as per-tag binomial thinning.
SynthesizedStream synthesize_tag_stream(const Interferogram& expected3d,
                                        const DetectorModel& det,
                                        double duration_s, double rate_per_s,
                                        std::uint64_t seed);

}  // namespace spm
