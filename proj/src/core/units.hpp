#pragma once

#include <cmath>
#include <numbers>

// Unit conventions used throughout:
//   angular frequency  rad/fs
//   time               fs
//   group delay dispersion  fs^2
// Helpers below convert from the lab units quoted in configs (nm, GHz, ps).

namespace spm::units {

inline constexpr double kSpeedOfLightNmPerFs = 299.792458;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Absolute angular frequency of a vacuum wavelength.
inline double wavelength_nm_to_radfs(double lambda_nm) {
  return kTwoPi * kSpeedOfLightNmPerFs / lambda_nm;
}

inline double radfs_to_wavelength_nm(double omega_radfs) {
  return kTwoPi * kSpeedOfLightNmPerFs / omega_radfs;
}

// Ordinary frequency in GHz -> angular frequency in rad/fs.
inline double ghz_to_radfs(double f_ghz) { return kTwoPi * f_ghz * 1e-6; }

inline double radfs_to_ghz(double w_radfs) { return w_radfs / (kTwoPi * 1e-6); }

inline double thz_to_radfs(double f_thz) { return kTwoPi * f_thz * 1e-3; }

inline double ps_to_fs(double t_ps) { return t_ps * 1e3; }
inline double fs_to_ps(double t_fs) { return t_fs * 1e-3; }
inline double ns_to_fs(double t_ns) { return t_ns * 1e6; }

inline constexpr double kFwhmToSigma = 0.42466090014400953;  // 1/(2 sqrt(2 ln 2))

}  // namespace spm::units
