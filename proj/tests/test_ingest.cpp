#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <vector>

#include "core/errors.hpp"
#include "core/rng.hpp"
#include "core/units.hpp"
#include "ingest/coincidence.hpp"
#include "ingest/tag_stream.hpp"
#include "sim/interference.hpp"
#include "sim/sampling.hpp"
#include "sim/source_model.hpp"
#include "support/oracles.hpp"

using namespace spm;

namespace {

const double kCenter = units::wavelength_nm_to_radfs(1550.0);

TimeTagStream simple_stream(std::initializer_list<TimeTagRecord> records) {
  TimeTagStream s;
  s.rep_period_ns = 12.5;
  s.records = records;
  return s;
}

Interferogram toy_expected3d(const FrequencyGrid& g, const FrequencyGrid& gh) {
  SourceModel m;
  m.pump_bandwidth = 1.86e-3;
  m.phasematch_bandwidth = 1.86e-3 / std::sqrt(2.0);
  m.phasematch_angle_rad = std::numbers::pi / 4.0;
  Jsa jsa = build_jsa(m, g, gh);
  auto ref = test::gaussian_mode(g, 1.5e-3, 0.0, 0.0, 0.01);
  return expected_heralded_histogram(jsa, ref, 3000.0, gh);
}

}  // namespace

TEST_CASE("tag stream serialization round-trips bit-exactly") {
  TimeTagStream s = simple_stream({{1000, 0}, {1010, 1}, {12500, 2}, {25111, 0}});
  const auto bytes = serialize_stream(s);
  CHECK(bytes.size() == kTagHeaderSize + 4 * kTagRecordSize);
  TimeTagStream back = parse_stream(bytes);
  CHECK(back == s);
  const auto bytes2 = serialize_stream(back);
  CHECK(bytes2 == bytes);

  auto dir = std::filesystem::temp_directory_path() / "spm_ingest_test";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "round.ttg").string();
  write_stream(path, s);
  CHECK(read_stream(path) == s);
}

TEST_CASE("parser reports corruption with byte offsets") {
  TimeTagStream s = simple_stream({{1000, 0}, {2000, 1}, {3000, 2}});
  auto bytes = serialize_stream(s);

  SUBCASE("bad magic") {
    bytes[0] = 'X';
    CHECK_THROWS_WITH_AS(parse_stream(bytes), doctest::Contains("byte 0"),
                         DataError);
  }
  SUBCASE("unsupported version") {
    bytes[4] = 9;
    CHECK_THROWS_AS(parse_stream(bytes), DataError);
  }
  SUBCASE("truncated mid-record") {
    bytes.resize(bytes.size() - 7);
    CHECK_THROWS_WITH_AS(parse_stream(bytes), doctest::Contains("byte"),
                         DataError);
  }
  SUBCASE("record count mismatch") {
    bytes.resize(bytes.size() - kTagRecordSize);
    CHECK_THROWS_WITH_AS(parse_stream(bytes),
                         doctest::Contains("record_count"), DataError);
  }
  SUBCASE("invalid channel") {
    bytes[kTagHeaderSize + kTagRecordSize + 8] = 3;
    CHECK_THROWS_WITH_AS(
        parse_stream(bytes),
        doctest::Contains(("byte " + std::to_string(kTagHeaderSize +
                                                    kTagRecordSize))
                              .c_str()),
        DataError);
  }
  SUBCASE("short header") {
    bytes.resize(10);
    CHECK_THROWS_AS(parse_stream(bytes), DataError);
  }
}

TEST_CASE("mild reordering is absorbed, gross reordering is an error") {
  TimeTagStream s;
  s.rep_period_ns = 12.5;
  for (int i = 0; i < 2000; ++i)
    s.records.push_back({static_cast<std::uint64_t>(100 * i + 100), 0});
  TimeTagStream shuffled = s;
  // Swap neighbours: displacement of one record, far below the window.
  for (std::size_t i = 0; i + 1 < shuffled.records.size(); i += 2)
    std::swap(shuffled.records[i], shuffled.records[i + 1]);
  TimeTagStream parsed = parse_stream(serialize_stream(shuffled));
  CHECK(parsed == s);

  // A record older than data already drained from the reorder buffer.
  TimeTagStream bad = s;
  bad.records.push_back({50, 0});
  CHECK_THROWS_WITH_AS(parse_stream(serialize_stream(bad)),
                       doctest::Contains("reorder window"), DataError);
}

TEST_CASE("pulse assignment and offsets") {
  // rep period 12.5 ns: a tag at exactly 12500 ps belongs to pulse 1.
  CoincidenceFinder finder(12500.0, 6000.0, 2);
  finder.push({12500, 0});
  finder.push({12900, 1});
  finder.finish();
  REQUIRE(finder.events().size() == 1);
  const auto& ev = finder.events()[0];
  CHECK(ev.pulse_index == 1);
  CHECK(ev.offset_ps[0] == doctest::Approx(0.0));
  CHECK(ev.offset_ps[1] == doctest::Approx(400.0));
  CHECK(ev.fold == 2);
}

TEST_CASE("coincidence window and fold requirements") {
  SUBCASE("window wider than half the period is ambiguous") {
    CHECK_THROWS_AS(CoincidenceFinder(12500.0, 6300.0, 2), ConfigError);
    CHECK_THROWS_AS(CoincidenceFinder(12500.0, -1.0, 2), ConfigError);
    CHECK_THROWS_AS(CoincidenceFinder(12500.0, 100.0, 4), ConfigError);
  }
  SUBCASE("three-fold needs one tag on every channel") {
    CoincidenceFinder finder(12500.0, 6000.0, 3);
    finder.push({12400, 0});
    finder.push({12600, 1});  // no herald: not an event
    finder.push({24900, 0});
    finder.push({25000, 1});
    finder.push({25100, 2});  // complete
    finder.finish();
    REQUIRE(finder.events().size() == 1);
    CHECK(finder.events()[0].pulse_index == 2);
    CHECK(finder.events()[0].offset_ps[2] == doctest::Approx(100.0));
  }
  SUBCASE("double tags on a required channel drop the pulse") {
    CoincidenceFinder finder(12500.0, 6000.0, 2);
    finder.push({12400, 0});
    finder.push({12450, 0});
    finder.push({12600, 1});
    finder.finish();
    CHECK(finder.events().empty());
    CHECK(finder.stats().multi_tag_dropped == 1);
  }
  SUBCASE("two-fold mode ignores herald tags entirely") {
    CoincidenceFinder finder(12500.0, 6000.0, 2);
    finder.push({12400, 0});
    finder.push({12500, 2});
    finder.push({12520, 2});  // double herald must not veto
    finder.push({12600, 1});
    finder.finish();
    CHECK(finder.events().size() == 1);
  }
  SUBCASE("offsets outside the window are dropped") {
    CoincidenceFinder finder(12500.0, 500.0, 2);
    finder.push({12400, 0});
    finder.push({13100, 1});  // offset 600 > 500
    finder.finish();
    CHECK(finder.events().empty());
    CHECK(finder.stats().window_dropped == 1);
  }
  SUBCASE("adjacent pulses yield separate events") {
    CoincidenceFinder finder(12500.0, 6000.0, 2);
    finder.push({12400, 0});
    finder.push({12600, 1});
    finder.push({24900, 0});
    finder.push({25100, 1});
    finder.finish();
    REQUIRE(finder.events().size() == 2);
    CHECK(finder.events()[0].pulse_index == 1);
    CHECK(finder.events()[1].pulse_index == 2);
  }
}

TEST_CASE("results are invariant under input chunking") {
  FrequencyGrid g(kCenter, 4e-3, 16), gh(kCenter, 4e-3, 8);
  Interferogram h3 = toy_expected3d(g, gh);
  DetectorModel det;
  auto syn = synthesize_tag_stream(h3, det, 50.0, 100.0, 99);
  const auto& recs = syn.stream.records;
  REQUIRE(recs.size() > 100);

  std::vector<CoincidenceEvent> reference;
  for (int chunk : {1, 2, 7, 64}) {
    CoincidenceFinder finder(det.rep_period_ps(), 6000.0, 3);
    for (std::size_t at = 0; at < recs.size(); at += chunk) {
      const std::size_t len = std::min<std::size_t>(chunk, recs.size() - at);
      finder.push(std::span<const TimeTagRecord>(recs.data() + at, len));
    }
    finder.finish();
    if (reference.empty()) {
      reference = finder.take_events();
      CHECK(!reference.empty());
    } else {
      CHECK(finder.events() == reference);
    }
  }
}

TEST_CASE("a 40 ps early arrival reads as about minus five gigahertz") {
  DetectorModel det;
  CoincidenceEvent ev;
  ev.fold = 3;
  ev.offset_ps[0] = -39.88;
  ev.offset_ps[1] = 0.0;
  ev.offset_ps[2] = 0.0;
  const double lambda[3] = {1550.0, 1550.0, 1550.0};
  auto w = offsets_to_frequencies(ev, det, lambda);
  REQUIRE(w.has_value());
  CHECK(units::radfs_to_ghz((*w)[0]) == doctest::Approx(-5.0).epsilon(0.01));
  CHECK((*w)[1] == doctest::Approx(0.0));
}

TEST_CASE("histogramming bins, drops, and marginalizes consistently") {
  FrequencyGrid g(kCenter, 4e-3, 16), gh(kCenter, 4e-3, 8);
  Interferogram h3 = toy_expected3d(g, gh);
  DetectorModel det;
  det.jitter_fwhm_ps = 0.0;  // exact mapping back to source bins
  auto syn = synthesize_tag_stream(h3, det, 100.0, 100.0, 7);

  CoincidenceStats stats;
  auto events = find_coincidences(syn.stream, 6000.0, 3, &stats);
  CHECK(static_cast<std::int64_t>(events.size()) == syn.n_generated);
  CHECK(stats.multi_tag_dropped == 0);

  const double lambda[3] = {1550.0, 1550.0, 1550.0};
  auto r3 = histogram_events(events, det, lambda, g, g, &gh);
  CHECK(r3.dropped == 0);
  CHECK(r3.binned == events.size());
  CHECK(r3.histogram.total() == doctest::Approx(double(events.size())));

  auto r2 = histogram_events(events, det, lambda, g, g, nullptr);
  CHECK((r2.histogram.counts() - r3.histogram.counts()).abs().maxCoeff() ==
        0.0);

  // With no jitter the histogram is a faithful multinomial draw of the
  // expected distribution: coarse chi-squared sanity check.
  const double total_expected = h3.total();
  const double n = r3.histogram.total();
  double chi2 = 0.0;
  int dof = 0;
  for (int k = 0; k < h3.n_planes(); ++k)
    for (int i = 0; i < 16; ++i)
      for (int j = 0; j < 16; ++j) {
        const double mean = n * h3.plane(k)(i, j) / total_expected;
        if (mean < 10.0) continue;
        const double d = r3.histogram.plane(k)(i, j) - mean;
        chi2 += d * d / mean;
        ++dof;
      }
  REQUIRE(dof > 20);
  CHECK(chi2 / dof < 2.0);
  CHECK(chi2 / dof > 0.3);
}

TEST_CASE("jittered events land outside the span and are counted as dropped") {
  FrequencyGrid g(kCenter, 4e-3, 16), gh(kCenter, 4e-3, 8);
  Interferogram h3 = toy_expected3d(g, gh);
  DetectorModel det;
  det.jitter_fwhm_ps = 500.0;  // about 0.4 rad/fs grid spans of smear
  auto syn = synthesize_tag_stream(h3, det, 100.0, 100.0, 21);
  auto events = find_coincidences(syn.stream, 6000.0, 3);
  const double lambda[3] = {1550.0, 1550.0, 1550.0};
  auto r = histogram_events(events, det, lambda, g, g, &gh);
  CHECK(r.binned + r.dropped == events.size());
  CHECK(r.dropped > 0);
}

TEST_CASE("parsing and matching keep up with bulk data") {
  TimeTagStream s;
  s.rep_period_ns = 12.5;
  Rng rng(11);
  std::uint64_t t = 1000;
  for (int i = 0; i < 300000; ++i) {
    t += static_cast<std::uint64_t>(rng.uniform() * 25000.0);
    s.records.push_back({t, static_cast<std::uint8_t>(i % 3)});
  }
  const auto bytes = serialize_stream(s);
  const auto start = std::chrono::steady_clock::now();
  TimeTagStream parsed = parse_stream(bytes);
  auto events = find_coincidences(parsed, 6000.0, 3);
  const auto elapsed = std::chrono::duration<double>(
                           std::chrono::steady_clock::now() - start)
                           .count();
  CHECK(parsed.records.size() == 300000);
  // Loose floor: well over a hundred thousand records per second.
  CHECK(300000.0 / elapsed > 1e5);
}
