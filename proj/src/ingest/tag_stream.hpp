#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace spm {

enum TagChannel : std::uint8_t {
  kChannelOutC = 0,
  kChannelOutD = 1,
  kChannelHerald = 2,
};

struct TimeTagRecord {
  std::uint64_t timestamp_ps = 0;
  std::uint8_t channel = 0;

  bool operator==(const TimeTagRecord&) const = default;
};

struct TimeTagStream {
  double rep_period_ns = 12.5;
  std::vector<TimeTagRecord> records;  // non-decreasing timestamps

  bool operator==(const TimeTagStream&) const = default;
};

// "TTG1" wire format, little-endian:
//   header: magic "TTG1", u32 version=1, u64 record_count, f64 rep_period_ns
//   record (16 bytes): u64 timestamp_ps, u8 channel, u8 flags=0, 6 reserved=0
//
// The parser tolerates out-of-order records up to a reorder window of 1024
// records; a timestamp that is still decreasing after buffering is a hard
// error reported with its byte offset. Real taggers emit near-sorted data;
// silent full re-sorting would hide hardware faults.
inline constexpr std::size_t kTagRecordSize = 16;
inline constexpr std::size_t kTagHeaderSize = 24;
inline constexpr std::size_t kReorderWindow = 1024;

std::vector<std::uint8_t> serialize_stream(const TimeTagStream& stream);
void write_stream(const std::string& path, const TimeTagStream& stream);

TimeTagStream parse_stream(const std::uint8_t* data, std::size_t size);
TimeTagStream parse_stream(const std::vector<std::uint8_t>& bytes);
TimeTagStream read_stream(const std::string& path);

}  // namespace spm
