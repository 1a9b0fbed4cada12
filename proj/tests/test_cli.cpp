#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace {

namespace fs = std::filesystem;

fs::path work_root() {
  auto dir = fs::temp_directory_path() / "spm_cli_test";
  fs::create_directories(dir);
  return dir;
}

int run(const std::string& args, const fs::path& log) {
  const std::string cmd =
      std::string(CLI_PATH) + " " + args + " >" + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream os(p, std::ios::binary);
  os << text;
}

const char* kSmallConfig =
    "[grid]\n"
    "n_bins = 48\n"
    "bin_width_ghz = 10\n"
    "[source]\n"
    "pump_bandwidth_radfs = 1.86e-3\n"
    "phasematch_bandwidth_radfs = 1.315218e-3\n"
    "[reference]\n"
    "mean_photons = 0.01\n"
    "delay_ps = 10.0\n"
    "[sampling]\n"
    "events = 20000\n"
    "emit_tags = true\n"
    "seed = 321\n";

}  // namespace

TEST_CASE("print-defaults emits a parseable configuration") {
  const auto root = work_root();
  const auto log = root / "defaults.out";
  CHECK(run("config print-defaults", log) == 0);
  const std::string text = slurp(log);
  CHECK(text.find("[grid]") != std::string::npos);
  CHECK(text.find("n_bins = 128") != std::string::npos);
  CHECK(text.find("[detector]") != std::string::npos);

  // The dump round-trips through --config.
  const auto cfg = root / "roundtrip.cfg";
  write_file(cfg, text);
  CHECK(run("--config " + cfg.string() + " config print-defaults", log) == 0);
}

TEST_CASE("configuration mistakes exit with code 1 and name the key") {
  const auto root = work_root();
  const auto cfg = root / "bad.cfg";
  write_file(cfg, "[grid]\nn_bins = 48\nmisspelled_option = 7\n");
  const auto log = root / "bad.out";
  CHECK(run("--config " + cfg.string() + " simulate", log) == 1);
  CHECK(slurp(log).find("misspelled_option") != std::string::npos);

  CHECK(run("--config " + (root / "missing.cfg").string() + " simulate",
            log) != 0);
}

TEST_CASE("corrupt tag data exits with code 2") {
  const auto root = work_root();
  const auto out = root / "corrupt";
  fs::remove_all(out);
  fs::create_directories(out);
  const auto cfg = root / "ingest.cfg";
  write_file(cfg, kSmallConfig);
  write_file(out / "tags_a.ttg", "this is not a tag stream");
  write_file(out / "tags_b.ttg", "this is not a tag stream");
  const auto log = root / "corrupt.out";
  CHECK(run("--config " + cfg.string() + " --out " + out.string() + " ingest",
            log) == 2);
  CHECK(slurp(log).find("tags_a.ttg") != std::string::npos);
}

TEST_CASE("pipeline equals the composed stages byte for byte") {
  const auto root = work_root();
  const auto cfg = root / "pipe.cfg";
  write_file(cfg, kSmallConfig);

  const auto one = root / "one_shot";
  const auto steps = root / "stepwise";
  fs::remove_all(one);
  fs::remove_all(steps);
  fs::create_directories(one);
  fs::create_directories(steps);
  const auto log = root / "pipe.out";

  const std::string base = "--config " + cfg.string() + " --out ";
  REQUIRE(run(base + one.string() + " pipeline", log) == 0);
  REQUIRE(run(base + steps.string() + " simulate", log) == 0);
  REQUIRE(run(base + steps.string() + " ingest", log) == 0);
  REQUIRE(run(base + steps.string() + " reconstruct", log) == 0);
  REQUIRE(run(base + steps.string() + " analyze", log) == 0);

  for (const char* name :
       {"truth_jsa.jsab", "tags_a.ttg", "ingested_a.h3b",
        "jsa_reconstructed.jsab", "analysis_report.txt"}) {
    CAPTURE(name);
    REQUIRE(fs::exists(one / name));
    REQUIRE(fs::exists(steps / name));
    CHECK(slurp(one / name) == slurp(steps / name));
  }
}

TEST_CASE("seed override changes sampled outputs only") {
  const auto root = work_root();
  const auto cfg = root / "seeded.cfg";
  write_file(cfg, kSmallConfig);
  const auto a = root / "seed_a";
  const auto b = root / "seed_b";
  fs::remove_all(a);
  fs::remove_all(b);
  fs::create_directories(a);
  fs::create_directories(b);
  const auto log = root / "seed.out";
  const std::string base = "--config " + cfg.string();
  REQUIRE(run(base + " --out " + a.string() + " --seed 1001 simulate", log) ==
          0);
  REQUIRE(run(base + " --out " + b.string() + " --seed 1002 simulate", log) ==
          0);
  CHECK(slurp(a / "truth_jsa.jsab") == slurp(b / "truth_jsa.jsab"));
  CHECK(slurp(a / "sampled_a.h3b") != slurp(b / "sampled_a.h3b"));
}

TEST_CASE("unknown subcommands and flags are rejected") {
  const auto root = work_root();
  const auto log = root / "usage.out";
  CHECK(run("frobnicate", log) != 0);
  CHECK(run("--no-such-flag simulate", log) != 0);
}
