#include "pipeline/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>

#include "core/errors.hpp"
#include "core/io.hpp"
#include "core/units.hpp"

namespace spm {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& v, int line) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size() || !std::isfinite(x)) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config line " + std::to_string(line) +
                      ": expected a number, got '" + v + "'");
  }
}

std::int64_t to_int(const std::string& v, int line) {
  std::int64_t x = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size())
    throw ConfigError("config line " + std::to_string(line) +
                      ": expected an integer, got '" + v + "'");
  return x;
}

bool to_bool(const std::string& v, int line) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("config line " + std::to_string(line) +
                    ": expected a boolean, got '" + v + "'");
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

void PipelineConfig::validate() const {
  if (n_bins < 8) throw ConfigError("grid.n_bins must be at least 8");
  if (!(bin_width_ghz > 0.0)) throw ConfigError("grid.bin_width_ghz must be positive");
  if (herald_n_bins != 0 && herald_n_bins < 8)
    throw ConfigError("grid.herald_n_bins must be 0 or at least 8");
  if (!(center_wavelength_nm > 0.0))
    throw ConfigError("grid.center_wavelength_nm must be positive");
  if (statistics != "single_photon" && statistics != "coherent" &&
      statistics != "thermal")
    throw ConfigError("signal.statistics must be single_photon, coherent or thermal");
  if (!(signal_mean_photons > 0.0))
    throw ConfigError("signal.mean_photons must be positive");
  if (!(reference_mean_photons > 0.0))
    throw ConfigError("reference.mean_photons must be positive");
  if (!(reference_bandwidth_scale > 0.0))
    throw ConfigError("reference.bandwidth_scale must be positive");
  if (filter_shape != "gaussian" && filter_shape != "tukey")
    throw ConfigError("filter.shape must be gaussian or tukey");
  if (!(division_threshold > 0.0) || division_threshold >= 1.0)
    throw ConfigError("reconstruction.division_threshold must be in (0,1)");
  if (!(amplitude_floor > 0.0) || amplitude_floor >= 1.0)
    throw ConfigError("analysis.amplitude_floor must be in (0,1)");
  if (smooth_radius < 0) throw ConfigError("analysis.smooth_radius must be >= 0");
  if (events < 0) throw ConfigError("sampling.events must be >= 0");
  if (!(rate_per_s > 0.0)) throw ConfigError("sampling.rate_per_s must be positive");
  if (!(coincidence_window_ps > 0.0))
    throw ConfigError("sampling.coincidence_window_ps must be positive");
  source_model().validate();
  detector_model().validate();
}

FrequencyGrid PipelineConfig::signal_grid() const {
  const double dw = units::ghz_to_radfs(bin_width_ghz);
  return FrequencyGrid(units::wavelength_nm_to_radfs(center_wavelength_nm),
                       dw * (n_bins - 1), n_bins);
}

FrequencyGrid PipelineConfig::herald_grid() const {
  const int n = herald_n_bins > 0 ? herald_n_bins : n_bins;
  const double width =
      herald_bin_width_ghz > 0.0 ? herald_bin_width_ghz : bin_width_ghz;
  const double dw = units::ghz_to_radfs(width);
  return FrequencyGrid(units::wavelength_nm_to_radfs(center_wavelength_nm),
                       dw * (n - 1), n);
}

SourceModel PipelineConfig::source_model() const {
  SourceModel m;
  m.pump_bandwidth = pump_bandwidth_radfs;
  m.pump_gdd_fs2 = pump_gdd_fs2;
  m.phasematch_bandwidth = phasematch_bandwidth_radfs;
  m.phasematch_angle_rad = phasematch_angle_deg * std::numbers::pi / 180.0;
  m.sinc_phasematch = sinc_phasematch;
  m.signal_wavelength_nm = center_wavelength_nm;
  m.herald_wavelength_nm = center_wavelength_nm;
  return m;
}

DetectorModel PipelineConfig::detector_model() const {
  DetectorModel d;
  d.dispersion_ps_per_nm = dispersion_ps_per_nm;
  d.jitter_fwhm_ps = jitter_fwhm_ps;
  d.efficiency = efficiency;
  d.rep_period_ns = rep_period_ns;
  return d;
}

SignalStatistics PipelineConfig::signal_statistics() const {
  if (statistics == "coherent")
    return SignalStatistics::coherent(signal_mean_photons);
  if (statistics == "thermal")
    return SignalStatistics::thermal(signal_mean_photons);
  return SignalStatistics::single_photon();
}

FilterSpec PipelineConfig::filter_spec() const {
  const double tau = tau_fs();
  if (filter_shape == "gaussian")
    return FilterSpec::gaussian_for_delay(tau,
                                          units::ps_to_fs(filter_sigma_t_ps));
  return FilterSpec::tukey_for_delay(tau, units::ps_to_fs(filter_flat_half_ps),
                                     units::ps_to_fs(filter_taper_ps));
}

double PipelineConfig::tau_fs() const { return units::ps_to_fs(delay_ps); }

std::string PipelineConfig::dump() const {
  std::ostringstream os;
  os << "[grid]\n"
     << "center_wavelength_nm = " << fmt(center_wavelength_nm) << "\n"
     << "bin_width_ghz = " << fmt(bin_width_ghz) << "\n"
     << "n_bins = " << n_bins << "\n"
     << "herald_bin_width_ghz = " << fmt(herald_bin_width_ghz) << "\n"
     << "herald_n_bins = " << herald_n_bins << "\n"
     << "\n[source]\n"
     << "pump_bandwidth_radfs = " << fmt(pump_bandwidth_radfs) << "\n"
     << "pump_gdd_fs2 = " << fmt(pump_gdd_fs2) << "\n"
     << "phasematch_bandwidth_radfs = " << fmt(phasematch_bandwidth_radfs) << "\n"
     << "phasematch_angle_deg = " << fmt(phasematch_angle_deg) << "\n"
     << "sinc_phasematch = " << (sinc_phasematch ? "true" : "false") << "\n"
     << "\n[signal]\n"
     << "statistics = " << statistics << "\n"
     << "mean_photons = " << fmt(signal_mean_photons) << "\n"
     << "\n[reference]\n"
     << "bandwidth_scale = " << fmt(reference_bandwidth_scale) << "\n"
     << "mean_photons = " << fmt(reference_mean_photons) << "\n"
     << "delay_ps = " << fmt(delay_ps) << "\n"
     << "\n[detector]\n"
     << "dispersion_ps_per_nm = " << fmt(dispersion_ps_per_nm) << "\n"
     << "jitter_fwhm_ps = " << fmt(jitter_fwhm_ps) << "\n"
     << "efficiency = " << fmt(efficiency) << "\n"
     << "rep_period_ns = " << fmt(rep_period_ns) << "\n"
     << "\n[sampling]\n"
     << "events = " << events << "\n"
     << "rate_per_s = " << fmt(rate_per_s) << "\n"
     << "emit_tags = " << (emit_tags ? "true" : "false") << "\n"
     << "coincidence_window_ps = " << fmt(coincidence_window_ps) << "\n"
     << "seed = " << seed << "\n"
     << "\n[filter]\n"
     << "shape = " << filter_shape << "\n"
     << "sigma_t_ps = " << fmt(filter_sigma_t_ps) << "\n"
     << "flat_half_ps = " << fmt(filter_flat_half_ps) << "\n"
     << "taper_ps = " << fmt(filter_taper_ps) << "\n"
     << "\n[reconstruction]\n"
     << "division_threshold = " << fmt(division_threshold) << "\n"
     << "\n[analysis]\n"
     << "amplitude_floor = " << fmt(amplitude_floor) << "\n"
     << "smooth_radius = " << smooth_radius << "\n";
  return os.str();
}

std::uint64_t PipelineConfig::hash() const { return io::fnv1a64(dump()); }

PipelineConfig parse_config(const std::string& text) {
  PipelineConfig cfg;
  using Setter = std::function<void(PipelineConfig&, const std::string&, int)>;
  static const std::map<std::string, Setter> schema = {
      {"grid.center_wavelength_nm",
       [](auto& c, const auto& v, int l) { c.center_wavelength_nm = to_double(v, l); }},
      {"grid.bin_width_ghz",
       [](auto& c, const auto& v, int l) { c.bin_width_ghz = to_double(v, l); }},
      {"grid.n_bins",
       [](auto& c, const auto& v, int l) { c.n_bins = static_cast<int>(to_int(v, l)); }},
      {"grid.herald_bin_width_ghz",
       [](auto& c, const auto& v, int l) { c.herald_bin_width_ghz = to_double(v, l); }},
      {"grid.herald_n_bins",
       [](auto& c, const auto& v, int l) { c.herald_n_bins = static_cast<int>(to_int(v, l)); }},
      {"source.pump_bandwidth_radfs",
       [](auto& c, const auto& v, int l) { c.pump_bandwidth_radfs = to_double(v, l); }},
      {"source.pump_gdd_fs2",
       [](auto& c, const auto& v, int l) { c.pump_gdd_fs2 = to_double(v, l); }},
      {"source.phasematch_bandwidth_radfs",
       [](auto& c, const auto& v, int l) { c.phasematch_bandwidth_radfs = to_double(v, l); }},
      {"source.phasematch_angle_deg",
       [](auto& c, const auto& v, int l) { c.phasematch_angle_deg = to_double(v, l); }},
      {"source.sinc_phasematch",
       [](auto& c, const auto& v, int l) { c.sinc_phasematch = to_bool(v, l); }},
      {"signal.statistics",
       [](auto& c, const auto& v, int) { c.statistics = v; }},
      {"signal.mean_photons",
       [](auto& c, const auto& v, int l) { c.signal_mean_photons = to_double(v, l); }},
      {"reference.bandwidth_scale",
       [](auto& c, const auto& v, int l) { c.reference_bandwidth_scale = to_double(v, l); }},
      {"reference.mean_photons",
       [](auto& c, const auto& v, int l) { c.reference_mean_photons = to_double(v, l); }},
      {"reference.delay_ps",
       [](auto& c, const auto& v, int l) { c.delay_ps = to_double(v, l); }},
      {"detector.dispersion_ps_per_nm",
       [](auto& c, const auto& v, int l) { c.dispersion_ps_per_nm = to_double(v, l); }},
      {"detector.jitter_fwhm_ps",
       [](auto& c, const auto& v, int l) { c.jitter_fwhm_ps = to_double(v, l); }},
      {"detector.efficiency",
       [](auto& c, const auto& v, int l) { c.efficiency = to_double(v, l); }},
      {"detector.rep_period_ns",
       [](auto& c, const auto& v, int l) { c.rep_period_ns = to_double(v, l); }},
      {"sampling.events",
       [](auto& c, const auto& v, int l) { c.events = to_int(v, l); }},
      {"sampling.rate_per_s",
       [](auto& c, const auto& v, int l) { c.rate_per_s = to_double(v, l); }},
      {"sampling.emit_tags",
       [](auto& c, const auto& v, int l) { c.emit_tags = to_bool(v, l); }},
      {"sampling.coincidence_window_ps",
       [](auto& c, const auto& v, int l) { c.coincidence_window_ps = to_double(v, l); }},
      {"sampling.seed",
       [](auto& c, const auto& v, int l) { c.seed = static_cast<std::uint64_t>(to_int(v, l)); }},
      {"filter.shape", [](auto& c, const auto& v, int) { c.filter_shape = v; }},
      {"filter.sigma_t_ps",
       [](auto& c, const auto& v, int l) { c.filter_sigma_t_ps = to_double(v, l); }},
      {"filter.flat_half_ps",
       [](auto& c, const auto& v, int l) { c.filter_flat_half_ps = to_double(v, l); }},
      {"filter.taper_ps",
       [](auto& c, const auto& v, int l) { c.filter_taper_ps = to_double(v, l); }},
      {"reconstruction.division_threshold",
       [](auto& c, const auto& v, int l) { c.division_threshold = to_double(v, l); }},
      {"analysis.amplitude_floor",
       [](auto& c, const auto& v, int l) { c.amplitude_floor = to_double(v, l); }},
      {"analysis.smooth_radius",
       [](auto& c, const auto& v, int l) { c.smooth_radius = static_cast<int>(to_int(v, l)); }},
  };

  std::istringstream is(text);
  std::string line, section;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto hash_pos = line.find('#');
    if (hash_pos != std::string::npos) line.erase(hash_pos);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config line " + std::to_string(line_no) +
                          ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      bool known = false;
      for (const auto& [key, _] : schema)
        if (key.rfind(section + ".", 0) == 0) known = true;
      if (!known)
        throw ConfigError("config line " + std::to_string(line_no) +
                          ": unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty())
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": key '" + key + "' outside any section");
    const auto it = schema.find(section + "." + key);
    if (it == schema.end())
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": unknown key '" + key + "' in section [" + section + "]");
    it->second(cfg, value, line_no);
  }
  cfg.validate();
  return cfg;
}

PipelineConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError(path + ": cannot open config file");
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

}  // namespace spm
