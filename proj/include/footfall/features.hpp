#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "footfall/time_series.hpp"

namespace footfall {

inline constexpr int kBandCount = 125;        // 2-Hz bands covering 0-250 Hz
inline constexpr double kBandWidthHz = 2.0;

// Per-footstep feature set: time-domain moments, analytic-envelope moments,
// relative band energies, cadence, and duration. 3 + 4 + 125 + 1 + 1
// enumerated features; cadence is absent for the first footstep of a walk.
struct FeatureVector {
  Eigen::Vector3d time_stats;     // std, skewness, kurtosis
  Eigen::Vector4d hilbert_stats;  // mean, std, skewness, kurtosis of envelope
  Eigen::VectorXd band_energies;  // kBandCount entries summing to 1
  std::optional<double> cadence_s;
  int duration_samples = 0;
};

// Element-wise mean over F consecutive footsteps; the unit used for
// classification. For F = 1 the cadence feature is dropped entirely, so the
// flattened vector is one entry shorter.
struct AggregatedSample {
  Eigen::VectorXd features;
  int f_count = 1;
  std::optional<int> label;
};

// Moments are bias-uncorrected (skewness m3/m2^1.5, kurtosis m4/m2^2). The
// envelope is the magnitude of the analytic signal computed by a
// frequency-domain Hilbert transform on the event zero-padded to the next
// power of two, truncated back to the event length. Band energies come from
// the unpadded spectrum: each bin's energy is spread uniformly over its
// [m, m+1) * (rate/n) Hz interval and split across band edges
// proportionally; bins above min(250, 0.45 * rate) Hz are excluded and the
// vector is normalized by the in-range total. Constant events throw
// DegenerateEvent.
FeatureVector extract_features(const TimeSeries& event,
                               std::optional<double> prev_onset_s, double onset_s);

// Mean of F footstep features. Cadence averages over the entries that carry
// one (all but possibly the first); with F = 1 the cadence column is absent.
AggregatedSample aggregate_sample(const std::vector<FeatureVector>& footsteps,
                                  int f_count);

// Flattened layout: time(3), hilbert(4), bands(125), [cadence], duration.
Eigen::VectorXd flatten(const FeatureVector& fv, bool with_cadence);
std::vector<std::string> feature_column_names(bool with_cadence);
int feature_dimension(bool with_cadence);

// Hash of the column-name sequence; persisted with trained models so a
// stale model cannot silently consume re-ordered features.
std::uint64_t feature_order_hash(bool with_cadence);

}  // namespace footfall
