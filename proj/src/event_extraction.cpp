#include "footfall/event_extraction.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace footfall {

void validate(const DetectorConfig& cfg) {
  if (!(cfg.frame_s > cfg.hop_s) || !(cfg.hop_s > 0.0))
    throw InvalidArgument("detector: need frame_s > hop_s > 0");
  if (!(cfg.k_sigma > 0.0)) throw InvalidArgument("detector: k_sigma must be > 0");
  if (!(cfg.baseline_window_s > 0.0))
    throw InvalidArgument("detector: baseline window must be > 0");
  if (cfg.hangover_frames < 1)
    throw InvalidArgument("detector: hangover_frames must be >= 1");
}

const char* to_string(RejectReason reason) {
  switch (reason) {
    case RejectReason::TooNarrow: return "too-narrow";
    case RejectReason::TooWide: return "too-wide";
  }
  return "unknown";
}

namespace {

// Trailing baseline statistics over non-event frames only, so an ongoing
// event does not inflate its own threshold.
class RollingBaseline {
 public:
  explicit RollingBaseline(std::size_t capacity) : capacity_(capacity) {}

  void push(double e) {
    values_.push_back(e);
    sum_ += e;
    sum_sq_ += e * e;
    if (values_.size() > capacity_) {
      const double old = values_.front();
      values_.pop_front();
      sum_ -= old;
      sum_sq_ -= old * old;
    }
  }

  std::size_t count() const { return values_.size(); }

  double mean() const {
    return values_.empty() ? 0.0 : sum_ / static_cast<double>(values_.size());
  }

  double stddev() const {
    if (values_.size() < 2) return 0.0;
    const double m = mean();
    const double var = std::max(0.0, sum_sq_ / static_cast<double>(values_.size()) - m * m);
    return std::sqrt(var);
  }

 private:
  std::size_t capacity_;
  std::deque<double> values_;
  double sum_ = 0.0;
  double sum_sq_ = 0.0;
};

struct FrameSpan {
  Eigen::Index first_frame;
  Eigen::Index last_frame;  // inclusive
  double open_mean;
  double open_sigma;
};

// The triggering frame starts up to one frame before the footfall because
// frames overlap the onset. Refine at sample level: first short window whose
// mean-square energy clears the open-time threshold. Thresholds stay
// homogeneous in amplitude^2, so scaling the signal cannot move the onset.
Eigen::Index refine_onset(const Eigen::VectorXd& x, Eigen::Index from, Eigen::Index to,
                          Eigen::Index window, double open_mean, double open_sigma) {
  const double threshold = 4.0 * open_mean + 3.0 * open_sigma;
  if (from + window > to) return from;
  double acc = x.segment(from, window).squaredNorm();
  const double w = static_cast<double>(window);
  for (Eigen::Index i = from; i + window <= to; ++i) {
    if (acc / w > threshold) return i;
    acc -= x[i] * x[i];
    if (i + window < x.size()) acc += x[i + window] * x[i + window];
  }
  return from;
}

// Symmetric end refinement: last short window above the threshold, scanned
// backward, so an isolated noise blip after the footfall cannot stretch the
// event.
Eigen::Index refine_end(const Eigen::VectorXd& x, Eigen::Index from, Eigen::Index to,
                        Eigen::Index window, double open_mean, double open_sigma) {
  const double threshold = 4.0 * open_mean + 3.0 * open_sigma;
  if (from + window > to) return to;
  const double w = static_cast<double>(window);
  double acc = x.segment(to - window, window).squaredNorm();
  for (Eigen::Index i = to - window; i >= from; --i) {
    if (acc / w > threshold) return i + window;
    if (i > from) {
      acc -= x[i + window - 1] * x[i + window - 1];
      acc += x[i - 1] * x[i - 1];
    }
  }
  return to;
}

// Snaps a boundary outward to the nearest zero crossing of the raw signal,
// searching at most `limit` samples. Keeps onsets from being clipped
// mid-oscillation.
Eigen::Index snap_left(const Eigen::VectorXd& x, Eigen::Index start, Eigen::Index limit,
                       Eigen::Index floor_index) {
  const Eigen::Index lo = std::max(floor_index, start - limit);
  for (Eigen::Index i = start; i > lo; --i) {
    if (x[i - 1] == 0.0 || (x[i - 1] < 0.0) != (x[i] < 0.0)) return i;
  }
  return start;
}

Eigen::Index snap_right(const Eigen::VectorXd& x, Eigen::Index end, Eigen::Index limit,
                        Eigen::Index ceil_index) {
  const Eigen::Index hi = std::min(ceil_index, end + limit);
  for (Eigen::Index i = end; i < hi; ++i) {
    if (x[i] == 0.0 || (x[i - 1] < 0.0) != (x[i] < 0.0)) return i;
  }
  return end;
}

}  // namespace

ExtractionResult extract_events(const TimeSeries& signal, const DetectorConfig& cfg) {
  validate(signal);
  validate(cfg);
  const double rate = signal.sample_rate_hz;
  const auto frame_len = static_cast<Eigen::Index>(std::llround(cfg.frame_s * rate));
  const auto hop = static_cast<Eigen::Index>(std::llround(cfg.hop_s * rate));
  if (frame_len < 2 || hop < 1)
    throw InvalidArgument("extract_events: frame too short for this sample rate");
  if (signal.duration_s() < cfg.baseline_window_s)
    throw InvalidArgument("extract_events: signal shorter than baseline window");

  const Eigen::Index n = signal.size();
  const Eigen::Index n_frames = n < frame_len ? 0 : 1 + (n - frame_len) / hop;

  Eigen::VectorXd energy(n_frames);
  for (Eigen::Index m = 0; m < n_frames; ++m) {
    energy[m] = signal.samples.segment(m * hop, frame_len).squaredNorm() /
                static_cast<double>(frame_len);
  }

  const auto baseline_frames =
      static_cast<std::size_t>(std::max(8.0, std::round(cfg.baseline_window_s / cfg.hop_s)));
  constexpr std::size_t kWarmupFrames = 8;

  RollingBaseline baseline(baseline_frames);
  std::vector<FrameSpan> spans;

  bool in_event = false;
  Eigen::Index event_first = 0;
  Eigen::Index last_above = 0;
  int below_run = 0;
  double open_mean = 0.0, open_sigma = 0.0;

  for (Eigen::Index m = 0; m < n_frames; ++m) {
    const double e = energy[m];
    if (!in_event) {
      const double mean = baseline.mean();
      const double sigma = baseline.stddev();
      const bool warm = baseline.count() >= kWarmupFrames;
      if (warm && e > mean + cfg.k_sigma * sigma) {
        in_event = true;
        open_mean = mean;
        open_sigma = sigma;
        // Backtrack to where energy first rose above the boundary level.
        const double boundary = open_mean + std::max(1.0, 2.0 * cfg.k_sigma / 3.0) * open_sigma;
        Eigen::Index start = m;
        while (start > 0 && energy[start - 1] > boundary && m - start < 50) --start;
        event_first = start;
        last_above = m;
        below_run = 0;
      } else {
        baseline.push(e);
      }
    } else {
      const double boundary = open_mean + std::max(1.0, 2.0 * cfg.k_sigma / 3.0) * open_sigma;
      if (e > boundary) {
        last_above = m;
        below_run = 0;
      } else {
        if (++below_run >= cfg.hangover_frames) {
          spans.push_back({event_first, last_above, open_mean, open_sigma});
          in_event = false;
          baseline.push(e);
        }
      }
    }
  }
  if (in_event) spans.push_back({event_first, last_above, open_mean, open_sigma});

  // Touching or overlapping spans are one physical excursion: merge before
  // width gating.
  std::vector<FrameSpan> merged;
  for (const FrameSpan& s : spans) {
    if (!merged.empty() && s.first_frame <= merged.back().last_frame + 1) {
      merged.back().last_frame = std::max(merged.back().last_frame, s.last_frame);
    } else {
      merged.push_back(s);
    }
  }

  ExtractionResult result;
  Eigen::Index prev_end = 0;
  const Eigen::Index onset_window = std::max<Eigen::Index>(8, frame_len / 8);
  for (const FrameSpan& s : merged) {
    Eigen::Index end = std::min<Eigen::Index>(n, s.last_frame * hop + frame_len);
    Eigen::Index start = refine_onset(signal.samples, s.first_frame * hop, end,
                                      onset_window, s.open_mean, s.open_sigma);
    end = refine_end(signal.samples, start, end, onset_window, s.open_mean, s.open_sigma);
    start = snap_left(signal.samples, start, onset_window, prev_end);
    end = snap_right(signal.samples, end, onset_window, n);

    EventWindow w{start, end, static_cast<double>(start) / rate};
    const double width = static_cast<double>(w.length()) / rate;
    if (width < kMinEventWidthS) {
      result.rejected.push_back({w, RejectReason::TooNarrow});
    } else if (width > kMaxEventWidthS) {
      result.rejected.push_back({w, RejectReason::TooWide});
    } else {
      result.events.push_back(w);
      prev_end = end;
    }
  }
  return result;
}

TimeSeries slice_event(const TimeSeries& signal, const EventWindow& window) {
  validate(signal);
  if (window.start_index < 0 || window.end_index > signal.size() ||
      window.end_index <= window.start_index)
    throw InvalidArgument("slice_event: window out of range");
  TimeSeries out;
  out.sample_rate_hz = signal.sample_rate_hz;
  out.samples = signal.samples.segment(window.start_index, window.length());
  return out;
}

}  // namespace footfall
