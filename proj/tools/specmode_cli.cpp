#include <cstdint>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "specmode.h"

namespace {

struct ConfigDeleter {
  void operator()(spm_config* c) const { spm_config_free(c); }
};
using ConfigPtr = std::unique_ptr<spm_config, ConfigDeleter>;

int fail(spm_status status) {
  std::fprintf(stderr, "error: %s\n", spm_last_error());
  return static_cast<int>(status);
}

ConfigPtr load(const std::string& config_path, spm_status& status) {
  spm_config* raw = nullptr;
  status = config_path.empty() ? spm_config_default(&raw)
                               : spm_config_load(config_path.c_str(), &raw);
  return ConfigPtr(raw);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "specmode: simulate and reconstruct joint spectral amplitudes from "
      "spectrally resolved intensity interferograms"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".", jsa_path;
  std::uint64_t seed = 0;
  bool has_seed = false, force = false;
  int threads = 1;
  app.add_option("--config", config_path, "configuration file");
  app.add_option("--out", out_dir, "output directory")
      ->capture_default_str();
  app.add_option("--seed", seed, "override the config seed")
      ->each([&](const std::string&) { has_seed = true; });
  app.add_option("--threads", threads, "worker thread cap")
      ->capture_default_str();
  app.add_flag("--force", force, "skip config-hash checks on inputs");

  auto* simulate = app.add_subcommand("simulate", "run the forward model");
  auto* ingest = app.add_subcommand("ingest", "parse tag streams into histograms");
  auto* reconstruct =
      app.add_subcommand("reconstruct", "recover the complex JSA");
  auto* analyze = app.add_subcommand(
      "analyze", "Schmidt, chirp and visibility analysis of a JSA");
  analyze->add_option("jsa", jsa_path, "JSA file (default: out dir result)");
  auto* pipeline =
      app.add_subcommand("pipeline", "simulate, ingest, reconstruct, analyze");
  auto* config_cmd = app.add_subcommand("config", "configuration utilities");
  auto* print_defaults =
      config_cmd->add_subcommand("print-defaults", "dump the default config");
  config_cmd->require_subcommand(1);

  CLI11_PARSE(app, argc, argv);

  spm_status status = SPM_OK;
  const ConfigPtr config = load(config_path, status);
  if (status != SPM_OK) return fail(status);

  if (print_defaults->parsed()) {
    size_t needed = 0;
    spm_config_dump(config.get(), nullptr, 0, &needed);
    std::vector<char> buffer(needed);
    status = spm_config_dump(config.get(), buffer.data(), buffer.size(), nullptr);
    if (status != SPM_OK) return fail(status);
    std::fputs(buffer.data(), stdout);
    return 0;
  }

  spm_run_options options{};
  options.out_dir = out_dir.c_str();
  options.has_seed = has_seed ? 1 : 0;
  options.seed = seed;
  options.threads = threads;
  options.force = force ? 1 : 0;

  if (simulate->parsed()) status = spm_run_simulate(config.get(), &options);
  else if (ingest->parsed()) status = spm_run_ingest(config.get(), &options);
  else if (reconstruct->parsed())
    status = spm_run_reconstruct(config.get(), &options);
  else if (analyze->parsed())
    status = spm_run_analyze(config.get(), &options,
                             jsa_path.empty() ? nullptr : jsa_path.c_str());
  else if (pipeline->parsed()) status = spm_run_pipeline(config.get(), &options);

  return status == SPM_OK ? 0 : fail(status);
}
