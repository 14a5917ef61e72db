#pragma once

#include <string>
#include <vector>

#include "footfall/time_series.hpp"

namespace footfall {

// Short-time-energy detector parameters. The trigger statistic is
// (frame energy - rolling mean) / rolling std over the trailing baseline
// window, so detection is invariant to overall amplitude scaling.
struct DetectorConfig {
  double frame_s = 0.025;
  double hop_s = 0.010;
  double k_sigma = 3.0;           // opening threshold in baseline sigmas
  double baseline_window_s = 2.0;
  int hangover_frames = 3;        // below-boundary frames needed to close
};

void validate(const DetectorConfig& cfg);

// Half-open sample window [start_index, end_index) into the source signal.
struct EventWindow {
  Eigen::Index start_index = 0;
  Eigen::Index end_index = 0;
  double onset_time_s = 0.0;

  Eigen::Index length() const { return end_index - start_index; }
};

enum class RejectReason { TooNarrow, TooWide };

const char* to_string(RejectReason reason);

struct RejectedWindow {
  EventWindow window;
  RejectReason reason;
};

struct ExtractionResult {
  std::vector<EventWindow> events;      // width-gated, sorted, non-overlapping
  std::vector<RejectedWindow> rejected; // excursions outside [0.144, 0.437] s
};

// Event width bounds: narrower excursions are impulsive noise, wider ones
// are fused consecutive footfalls; both are rejected (but reported).
constexpr double kMinEventWidthS = 0.144;
constexpr double kMaxEventWidthS = 0.437;

// Detects footfall-shaped energy excursions. Throws InvalidArgument when the
// signal is shorter than the baseline window.
ExtractionResult extract_events(const TimeSeries& signal,
                                const DetectorConfig& cfg = {});

// Returns the sub-signal covered by the window, same sample rate.
TimeSeries slice_event(const TimeSeries& signal, const EventWindow& window);

}  // namespace footfall
