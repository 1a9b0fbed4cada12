#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "core/grid.hpp"
#include "core/interferogram.hpp"
#include "ingest/tag_stream.hpp"
#include "sim/detector.hpp"

namespace spm {

struct CoincidenceEvent {
  std::int64_t pulse_index = 0;
  // Arrival offsets from the pulse epoch, ps; indexed by channel.
  double offset_ps[3] = {0.0, 0.0, 0.0};
  int fold = 0;

  bool operator==(const CoincidenceEvent&) const = default;
};

struct CoincidenceStats {
  std::uint64_t pulses_with_tags = 0;
  std::uint64_t multi_tag_dropped = 0;  // >1 tag on a required channel
  std::uint64_t window_dropped = 0;     // offset outside acceptance window
};

/// Streaming coincidence search grouped by nearest pulse epoch. Feed records
/// in timestamp order (any chunking); results are identical for any split.
class CoincidenceFinder {
 public:
  /// fold 3 requires channels {out_c, out_d, herald}; fold 2 only the two
  /// beam splitter outputs (herald tags are ignored).
  CoincidenceFinder(double rep_period_ps, double window_ps, int fold);

  void push(const TimeTagRecord& r);
  void push(std::span<const TimeTagRecord> records);
  /// Flush the trailing pulse group.
  void finish();

  const std::vector<CoincidenceEvent>& events() const { return events_; }
  std::vector<CoincidenceEvent> take_events() { return std::move(events_); }
  const CoincidenceStats& stats() const { return stats_; }

 private:
  void flush_group();

  double rep_ps_;
  double window_ps_;
  int fold_;
  std::int64_t current_pulse_ = 0;
  bool group_open_ = false;
  int tag_count_[3] = {0, 0, 0};
  double tag_offset_[3] = {0.0, 0.0, 0.0};
  std::vector<CoincidenceEvent> events_;
  CoincidenceStats stats_;
};

std::vector<CoincidenceEvent> find_coincidences(const TimeTagStream& stream,
                                                double window_ps, int fold,
                                                CoincidenceStats* stats = nullptr);

/// (w1, w2, wh) detunings for an event, or nullopt when any coordinate maps
/// outside its grid span. lambda_center_nm is indexed by channel.
std::optional<std::array<double, 3>> offsets_to_frequencies(
    const CoincidenceEvent& ev, const DetectorModel& det,
    const double lambda_center_nm[3]);

struct HistogramResult {
  Interferogram histogram;
  std::uint64_t binned = 0;
  std::uint64_t dropped = 0;  // outside grid span
};

/// 3-fold events -> 3D histogram; 2-fold events -> 2D histogram.
HistogramResult histogram_events(const std::vector<CoincidenceEvent>& events,
                                 const DetectorModel& det,
                                 const double lambda_center_nm[3],
                                 const FrequencyGrid& grid1,
                                 const FrequencyGrid& grid2,
                                 const FrequencyGrid* herald_grid);

}  // namespace spm
