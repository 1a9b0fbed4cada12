#include "ingest/tag_stream.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <queue>

#include "core/errors.hpp"

namespace spm {

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::uint32_t(p[i]) << (8 * i);
  return v;
}

std::uint64_t get_u64(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t(p[i]) << (8 * i);
  return v;
}

}  // namespace

std::vector<std::uint8_t> serialize_stream(const TimeTagStream& stream) {
  std::vector<std::uint8_t> out;
  out.reserve(kTagHeaderSize + stream.records.size() * kTagRecordSize);
  out.insert(out.end(), {'T', 'T', 'G', '1'});
  put_u32(out, 1);
  put_u64(out, stream.records.size());
  std::uint64_t rep_bits;
  std::memcpy(&rep_bits, &stream.rep_period_ns, 8);
  put_u64(out, rep_bits);
  for (const auto& r : stream.records) {
    put_u64(out, r.timestamp_ps);
    out.push_back(r.channel);
    out.push_back(0);  // flags
    for (int i = 0; i < 6; ++i) out.push_back(0);
  }
  return out;
}

void write_stream(const std::string& path, const TimeTagStream& stream) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError(path + ": cannot open for writing");
  const auto bytes = serialize_stream(stream);
  os.write(reinterpret_cast<const char*>(bytes.data()),
           static_cast<std::streamsize>(bytes.size()));
  if (!os) throw DataError(path + ": write failed");
}

TimeTagStream parse_stream(const std::uint8_t* data, std::size_t size) {
  if (size < kTagHeaderSize)
    throw DataError("tag stream: truncated header at byte 0");
  if (std::memcmp(data, "TTG1", 4) != 0)
    throw DataError("tag stream: bad magic at byte 0");
  const std::uint32_t version = get_u32(data + 4);
  if (version != 1)
    throw DataError("tag stream: unsupported version " + std::to_string(version));
  const std::uint64_t count = get_u64(data + 8);
  std::uint64_t rep_bits = get_u64(data + 16);
  TimeTagStream stream;
  std::memcpy(&stream.rep_period_ns, &rep_bits, 8);
  if (!(stream.rep_period_ns > 0.0))
    throw DataError("tag stream: invalid rep period in header");

  const std::size_t body = size - kTagHeaderSize;
  if (body % kTagRecordSize != 0)
    throw DataError("tag stream: truncated record at byte " +
                    std::to_string(kTagHeaderSize + (body / kTagRecordSize) * kTagRecordSize));
  const std::uint64_t n = body / kTagRecordSize;
  if (n != count)
    throw DataError("tag stream: header record_count " + std::to_string(count) +
                    " does not match body (" + std::to_string(n) + " records)");

  stream.records.reserve(n);
  // Bounded reorder buffer: min-heap on timestamp, input order for ties so
  // an already-sorted stream round-trips byte for byte.
  using Entry = std::pair<TimeTagRecord, std::uint64_t>;
  auto cmp = [](const Entry& a, const Entry& b) {
    if (a.first.timestamp_ps != b.first.timestamp_ps)
      return a.first.timestamp_ps > b.first.timestamp_ps;
    return a.second > b.second;
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(cmp)> window(cmp);
  bool have_last = false;
  std::uint64_t last_ts = 0;

  for (std::uint64_t i = 0; i < n; ++i) {
    const std::uint8_t* p = data + kTagHeaderSize + i * kTagRecordSize;
    TimeTagRecord r;
    r.timestamp_ps = get_u64(p);
    r.channel = p[8];
    if (r.channel > 2)
      throw DataError("tag stream: invalid channel " + std::to_string(r.channel) +
                      " at byte " + std::to_string(kTagHeaderSize + i * kTagRecordSize));
    if (have_last && r.timestamp_ps < last_ts)
      throw DataError("tag stream: decreasing timestamp beyond reorder window at byte " +
                      std::to_string(kTagHeaderSize + i * kTagRecordSize));
    window.push({r, i});
    if (window.size() > kReorderWindow) {
      stream.records.push_back(window.top().first);
      last_ts = window.top().first.timestamp_ps;
      have_last = true;
      window.pop();
    }
  }
  while (!window.empty()) {
    stream.records.push_back(window.top().first);
    window.pop();
  }
  return stream;
}

TimeTagStream parse_stream(const std::vector<std::uint8_t>& bytes) {
  return parse_stream(bytes.data(), bytes.size());
}

TimeTagStream read_stream(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError(path + ": cannot open for reading");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(is)),
                                  std::istreambuf_iterator<char>());
  try {
    return parse_stream(bytes);
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

}  // namespace spm
