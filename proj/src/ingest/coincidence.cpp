#include "ingest/coincidence.hpp"

#include <array>
#include <cmath>

#include "core/errors.hpp"
#include "core/units.hpp"

namespace spm {

CoincidenceFinder::CoincidenceFinder(double rep_period_ps, double window_ps,
                                     int fold)
    : rep_ps_(rep_period_ps), window_ps_(window_ps), fold_(fold) {
  if (!(rep_period_ps > 0.0))
    throw ConfigError("coincidence: rep period must be positive");
  if (fold != 2 && fold != 3) throw ConfigError("coincidence: fold must be 2 or 3");
  if (!(window_ps > 0.0) || window_ps > rep_period_ps / 2.0)
    throw ConfigError(
        "coincidence: window must be positive and at most rep_period/2 "
        "(pulse assignment would be ambiguous)");
}

void CoincidenceFinder::push(const TimeTagRecord& r) {
  const auto pulse = static_cast<std::int64_t>(
      std::llround(static_cast<double>(r.timestamp_ps) / rep_ps_));
  if (group_open_ && pulse != current_pulse_) flush_group();
  if (!group_open_) {
    group_open_ = true;
    current_pulse_ = pulse;
    tag_count_[0] = tag_count_[1] = tag_count_[2] = 0;
  }
  const int ch = r.channel;
  if (fold_ == 2 && ch == kChannelHerald) return;  // herald ignored in 2-fold mode
  ++tag_count_[ch];
  tag_offset_[ch] =
      static_cast<double>(r.timestamp_ps) - static_cast<double>(current_pulse_) * rep_ps_;
}

void CoincidenceFinder::push(std::span<const TimeTagRecord> records) {
  for (const auto& r : records) push(r);
}

void CoincidenceFinder::finish() {
  if (group_open_) flush_group();
  group_open_ = false;
}

void CoincidenceFinder::flush_group() {
  group_open_ = false;
  const int need = fold_;
  if (tag_count_[0] + tag_count_[1] + tag_count_[2] > 0) ++stats_.pulses_with_tags;
  for (int c = 0; c < need; ++c) {
    if (tag_count_[c] == 0) return;  // not a coincidence; singles are normal
    if (tag_count_[c] > 1) {
      ++stats_.multi_tag_dropped;
      return;
    }
  }
  for (int c = 0; c < need; ++c) {
    if (std::abs(tag_offset_[c]) > window_ps_) {
      ++stats_.window_dropped;
      return;
    }
  }
  CoincidenceEvent ev;
  ev.pulse_index = current_pulse_;
  ev.fold = fold_;
  for (int c = 0; c < need; ++c) ev.offset_ps[c] = tag_offset_[c];
  events_.push_back(ev);
}

std::vector<CoincidenceEvent> find_coincidences(const TimeTagStream& stream,
                                                double window_ps, int fold,
                                                CoincidenceStats* stats) {
  CoincidenceFinder finder(stream.rep_period_ns * 1e3, window_ps, fold);
  finder.push(stream.records);
  finder.finish();
  if (stats) *stats = finder.stats();
  return finder.take_events();
}

std::optional<std::array<double, 3>> offsets_to_frequencies(
    const CoincidenceEvent& ev, const DetectorModel& det,
    const double lambda_center_nm[3]) {
  det.validate();
  std::array<double, 3> w{0.0, 0.0, 0.0};
  for (int c = 0; c < ev.fold; ++c) {
    w[c] = offset_ps_to_detuning(ev.offset_ps[c], det, lambda_center_nm[c]);
    if (!std::isfinite(w[c])) return std::nullopt;
  }
  return w;
}

HistogramResult histogram_events(const std::vector<CoincidenceEvent>& events,
                                 const DetectorModel& det,
                                 const double lambda_center_nm[3],
                                 const FrequencyGrid& grid1,
                                 const FrequencyGrid& grid2,
                                 const FrequencyGrid* herald_grid) {
  const int n1 = grid1.n_bins(), n2 = grid2.n_bins();
  const int nh = herald_grid ? herald_grid->n_bins() : 1;
  std::vector<Eigen::ArrayXXd> planes(nh, Eigen::ArrayXXd::Zero(n1, n2));
  std::uint64_t binned = 0, dropped = 0;

  for (const auto& ev : events) {
    const auto w = offsets_to_frequencies(ev, det, lambda_center_nm);
    if (!w) {
      ++dropped;
      continue;
    }
    const int i = grid1.bin_of((*w)[0]);
    const int j = grid2.bin_of((*w)[1]);
    int k = 0;
    if (herald_grid) {
      if (ev.fold != 3) {
        ++dropped;
        continue;
      }
      k = herald_grid->bin_of((*w)[2]);
    }
    if (i < 0 || j < 0 || k < 0) {
      ++dropped;
      continue;
    }
    planes[k](i, j) += 1.0;
    ++binned;
  }

  Interferogram h =
      herald_grid
          ? Interferogram(grid1, grid2, *herald_grid, std::move(planes))
          : Interferogram(grid1, grid2, std::move(planes[0]));
  return HistogramResult{std::move(h), binned, dropped};
}

}  // namespace spm
