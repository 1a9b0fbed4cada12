#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "core/interferogram.hpp"
#include "core/jsa.hpp"
#include "core/spectral_mode.hpp"

namespace spm::io {

std::uint64_t fnv1a64(std::string_view data);

// Little-endian binary complex-matrix format:
//   magic "JSAB", u32 version=1, u32 n1, u32 n2,
//   f64 center1, f64 dw1, f64 center2, f64 dw2,
//   n1*n2 pairs of f64 (re, im), row-major.
// An optional trailer "META" + u64 carries the producing config hash;
// readers ignore a missing trailer.
void write_jsa_binary(const std::string& path, const Jsa& jsa,
                      std::optional<std::uint64_t> config_hash = {});
Jsa read_jsa_binary(const std::string& path,
                    std::optional<std::uint64_t>* config_hash = nullptr);

// Human-readable CSV with '#' header lines carrying grid metadata; data rows
// are row-major with alternating re,im columns.
void write_jsa_csv(const std::string& path, const Jsa& jsa,
                   std::optional<std::uint64_t> config_hash = {});
Jsa read_jsa_csv(const std::string& path);

// 2D interferogram CSV: one row per grid1 bin, one column per grid2 bin.
void write_interferogram_csv(const std::string& path, const Interferogram& h,
                             std::optional<std::uint64_t> config_hash = {});
Interferogram read_interferogram_csv(const std::string& path);

// 3D histogram binary: magic "HS3B", u32 version=1, u32 n1, n2, nh,
// f64 (center, dw) per axis, then nh planes of n1*n2 f64 row-major,
// optional "META" + u64 trailer.
void write_histogram3(const std::string& path, const Interferogram& h,
                      std::optional<std::uint64_t> config_hash = {});
Interferogram read_histogram3(const std::string& path,
                              std::optional<std::uint64_t>* config_hash = nullptr);

// Spectral mode CSV rows: detuning,re,im.
void write_mode_csv(const std::string& path, const SpectralMode& m,
                    std::optional<std::uint64_t> config_hash = {});
SpectralMode read_mode_csv(const std::string& path);

}  // namespace spm::io
