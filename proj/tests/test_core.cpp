#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <vector>

#include "core/errors.hpp"
#include "core/grid.hpp"
#include "core/interferogram.hpp"
#include "core/io.hpp"
#include "core/jsa.hpp"
#include "core/rng.hpp"
#include "core/spectral_mode.hpp"
#include "core/units.hpp"
#include "support/oracles.hpp"

using namespace spm;

namespace {

std::filesystem::path temp_dir() {
  auto dir = std::filesystem::temp_directory_path() / "spm_core_test";
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("grid endpoints, spacing, and bin lookup") {
  FrequencyGrid g(1.2, 1.0, 11);
  CHECK(g.spacing() == doctest::Approx(0.1));
  CHECK(g.detuning(0) == doctest::Approx(-0.5));
  CHECK(g.detuning(10) == doctest::Approx(0.5));
  CHECK(g.absolute(5) == doctest::Approx(1.2));
  CHECK(g.bin_of(0.0) == 5);
  CHECK(g.bin_of(0.04) == 5);
  CHECK(g.bin_of(0.06) == 6);
  CHECK(g.bin_of(-0.549) == 0);
  CHECK(g.bin_of(-0.551) == -1);
  CHECK(g.bin_of(0.551) == -1);
  const Eigen::ArrayXd d = g.detunings();
  REQUIRE(d.size() == 11);
  CHECK(d(3) == doctest::Approx(g.detuning(3)));
}

TEST_CASE("grid rejects degenerate parameters") {
  CHECK_THROWS_AS(FrequencyGrid(1.0, 1.0, 4), ConfigError);
  CHECK_THROWS_AS(FrequencyGrid(1.0, -1.0, 16), ConfigError);
  CHECK_THROWS_AS(FrequencyGrid(std::nan(""), 1.0, 16), ConfigError);
}

TEST_CASE("bins_for_span matches a 1.28 THz band at 10 GHz pitch") {
  const double span = units::thz_to_radfs(1.28);
  const double width = units::ghz_to_radfs(10.0);
  CHECK(bins_for_span(span, width) == 129);
}

TEST_CASE("unit conversions") {
  CHECK(units::wavelength_nm_to_radfs(1550.0) ==
        doctest::Approx(1.2152593).epsilon(1e-6));
  CHECK(units::radfs_to_wavelength_nm(units::wavelength_nm_to_radfs(1310.0)) ==
        doctest::Approx(1310.0));
  CHECK(units::ghz_to_radfs(10.0) == doctest::Approx(6.2831853e-5));
  CHECK(units::radfs_to_ghz(units::ghz_to_radfs(17.5)) ==
        doctest::Approx(17.5));
  CHECK(units::ps_to_fs(10.0) == doctest::Approx(1e4));
  CHECK(units::kFwhmToSigma * 2.0 * std::sqrt(2.0 * std::log(2.0)) ==
        doctest::Approx(1.0));
}

TEST_CASE("spectral mode norm carries the grid measure") {
  FrequencyGrid g(1.2, 1e-2, 101);
  auto m = test::gaussian_mode(g, 1e-3);
  CHECK(m.norm_sq() == doctest::Approx(1.0).epsilon(1e-12));
  // Refining the grid keeps the norm.
  FrequencyGrid g2(1.2, 1e-2, 401);
  auto m2 = test::gaussian_mode(g2, 1e-3);
  CHECK(m2.norm_sq() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("inner product properties and overlap bounds") {
  FrequencyGrid g(1.2, 1e-2, 64);
  auto a = test::gaussian_mode(g, 1e-3, 0.0, 5e4);
  auto b = test::gaussian_mode(g, 1.5e-3, 2e-4);
  const auto ab = inner_product(a, b);
  const auto ba = inner_product(b, a);
  CHECK(std::abs(ab - std::conj(ba)) < 1e-14);
  CHECK(mode_overlap(a, a) == doctest::Approx(1.0).epsilon(1e-12));
  const double o = mode_overlap(a, b);
  CHECK(o >= 0.0);
  CHECK(o <= 1.0);
  // Global phase invariance.
  SpectralMode c = a;
  c.amp() *= std::polar(1.0, 1.234);
  CHECK(mode_overlap(a, c) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("jsa overlap and canonical phase") {
  FrequencyGrid g(1.2, 1e-2, 32);
  Eigen::MatrixXcd f = Eigen::MatrixXcd::Random(32, 32);
  Jsa a(g, g, f);
  Jsa b(g, g, f * std::polar(1.0, 0.77));
  CHECK(jsa_overlap(a, b) == doctest::Approx(1.0).epsilon(1e-12));
  Jsa c = b.with_canonical_phase();
  const int k0 = g.bin_of(0.0);
  CHECK(std::arg(c.f()(k0, k0)) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(jsa_overlap(b, c) == doctest::Approx(1.0).epsilon(1e-12));
  // Norm preserved by canonicalization.
  CHECK(c.norm_sq() == doctest::Approx(b.norm_sq()).epsilon(1e-12));
}

TEST_CASE("jsa slices agree with matrix entries") {
  FrequencyGrid g1(1.2, 1e-2, 16), g2(1.3, 2e-2, 24);
  Eigen::MatrixXcd f = Eigen::MatrixXcd::Random(16, 24);
  Jsa jsa(g1, g2, f);
  auto col = jsa.slice_signal(5);
  REQUIRE(col.amp().size() == 16);
  CHECK(std::abs(col.amp()(3) - f(3, 5)) < 1e-15);
  auto row = jsa.slice_herald(7);
  REQUIRE(row.amp().size() == 24);
  CHECK(std::abs(row.amp()(9) - f(7, 9)) < 1e-15);
}

TEST_CASE("interferogram herald planes sum to the 2D counts") {
  FrequencyGrid g1(1.2, 1e-2, 8), g2(1.2, 1e-2, 8), gh(1.3, 1e-2, 10);
  std::vector<Eigen::ArrayXXd> planes;
  double expect_total = 0.0;
  for (int j = 0; j < 10; ++j) {
    Eigen::ArrayXXd p = Eigen::ArrayXXd::Constant(8, 8, j + 1.0);
    expect_total += p.sum();
    planes.push_back(p);
  }
  Interferogram h(g1, g2, gh, planes);
  CHECK(h.has_herald_axis());
  CHECK(h.n_planes() == 10);
  CHECK(h.total() == doctest::Approx(expect_total));
  CHECK(h.counts()(0, 0) == doctest::Approx(55.0));
  auto slice = h.herald_slice(4);
  CHECK_FALSE(slice.has_herald_axis());
  CHECK(slice.total() == doctest::Approx(5.0 * 64));
  CHECK_THROWS_AS(
      Interferogram(g1, g2, Eigen::ArrayXXd::Constant(8, 8, -1.0)),
      ConfigError);
}

TEST_CASE("fnv1a64 reference values") {
  CHECK(io::fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(io::fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(io::fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("jsa binary round trip with and without hash trailer") {
  auto dir = temp_dir();
  FrequencyGrid g1(1.2, 1e-2, 12), g2(1.21, 1.5e-2, 9);
  Eigen::MatrixXcd f = Eigen::MatrixXcd::Random(12, 9);
  Jsa jsa(g1, g2, f);

  const auto path = (dir / "round.jsab").string();
  io::write_jsa_binary(path, jsa, 0xdeadbeefULL);
  std::optional<std::uint64_t> hash;
  Jsa back = io::read_jsa_binary(path, &hash);
  REQUIRE(hash.has_value());
  CHECK(*hash == 0xdeadbeefULL);
  CHECK(back.grid1() == g1);
  CHECK(back.grid2() == g2);
  CHECK((back.f() - f).cwiseAbs().maxCoeff() == 0.0);

  const auto path2 = (dir / "nohash.jsab").string();
  io::write_jsa_binary(path2, jsa);
  hash.reset();
  Jsa back2 = io::read_jsa_binary(path2, &hash);
  CHECK_FALSE(hash.has_value());
  CHECK((back2.f() - f).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("corrupt jsa binary is a data error") {
  auto dir = temp_dir();
  FrequencyGrid g(1.2, 1e-2, 8);
  Jsa jsa(g, g, Eigen::MatrixXcd::Random(8, 8));
  const auto path = (dir / "corrupt.jsab").string();
  io::write_jsa_binary(path, jsa);

  SUBCASE("bad magic") {
    std::fstream fs(path, std::ios::in | std::ios::out | std::ios::binary);
    fs.seekp(0);
    fs.write("NOPE", 4);
    fs.close();
    CHECK_THROWS_AS(io::read_jsa_binary(path), DataError);
  }
  SUBCASE("truncated payload") {
    auto size = std::filesystem::file_size(path);
    std::filesystem::resize_file(path, size - 37);
    CHECK_THROWS_AS(io::read_jsa_binary(path), DataError);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(io::read_jsa_binary((dir / "absent.jsab").string()),
                    DataError);
  }
}

TEST_CASE("histogram3 round trip") {
  auto dir = temp_dir();
  FrequencyGrid g1(1.2, 1e-2, 9), g2(1.2, 1e-2, 11), gh(1.3, 2e-2, 8);
  std::vector<Eigen::ArrayXXd> planes;
  Rng rng(7);
  for (int j = 0; j < 8; ++j) {
    Eigen::ArrayXXd p(9, 11);
    for (int i = 0; i < p.size(); ++i) p.data()[i] = rng.uniform();
    planes.push_back(p);
  }
  Interferogram h(g1, g2, gh, planes);
  const auto path = (dir / "round.h3b").string();
  io::write_histogram3(path, h, 42);
  std::optional<std::uint64_t> hash;
  Interferogram back = io::read_histogram3(path, &hash);
  REQUIRE(hash.has_value());
  CHECK(*hash == 42);
  REQUIRE(back.n_planes() == 8);
  CHECK(back.herald_grid() == gh);
  for (int j = 0; j < 8; ++j)
    CHECK((back.plane(j) - h.plane(j)).abs().maxCoeff() == 0.0);
  // Truncation detected.
  std::filesystem::resize_file(path, std::filesystem::file_size(path) / 2);
  CHECK_THROWS_AS(io::read_histogram3(path), DataError);
}

TEST_CASE("interferogram csv round trip") {
  auto dir = temp_dir();
  FrequencyGrid g1(1.2, 1e-2, 9), g2(1.25, 2e-2, 8);
  Eigen::ArrayXXd counts(9, 8);
  for (int i = 0; i < counts.size(); ++i) counts.data()[i] = 0.25 * i;
  Interferogram h(g1, g2, counts);
  const auto path = (dir / "round.csv").string();
  io::write_interferogram_csv(path, h);
  Interferogram back = io::read_interferogram_csv(path);
  CHECK(back.grid1() == g1);
  CHECK(back.grid2() == g2);
  CHECK((back.counts() - counts).abs().maxCoeff() < 1e-12);
}

TEST_CASE("mode csv round trip") {
  auto dir = temp_dir();
  FrequencyGrid g(1.2, 1e-2, 33);
  auto m = test::gaussian_mode(g, 2e-3, 1e-4, 3e4);
  const auto path = (dir / "mode.csv").string();
  io::write_mode_csv(path, m);
  SpectralMode back = io::read_mode_csv(path);
  CHECK(back.grid().n_bins() == 33);
  CHECK(back.grid().spacing() == doctest::Approx(g.spacing()).epsilon(1e-12));
  CHECK((back.amp() - m.amp()).abs().maxCoeff() < 1e-12);
}

TEST_CASE("rng determinism and stream independence") {
  Rng a(123, 0), b(123, 0), c(123, 1);
  for (int i = 0; i < 100; ++i) CHECK(a() == b());
  // Different streams produce different sequences.
  Rng a2(123, 0);
  int diff = 0;
  for (int i = 0; i < 100; ++i) diff += (a2() != c());
  CHECK(diff > 90);
  // uniform() stays in [0,1) and has a sane mean.
  Rng u(9, 2);
  double sum = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double x = u.uniform();
    REQUIRE(x >= 0.0);
    REQUIRE(x < 1.0);
    sum += x;
  }
  CHECK(sum / 10000 == doctest::Approx(0.5).epsilon(0.02));
}
