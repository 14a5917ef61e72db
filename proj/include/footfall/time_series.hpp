#pragma once

#include <Eigen/Core>

#include "footfall/errors.hpp"

namespace footfall {

// Uniformly sampled real-valued signal. Amplitudes are dimensionless
// sensor units; double precision throughout, quantization happens only at
// file I/O.
struct TimeSeries {
  Eigen::VectorXd samples;
  double sample_rate_hz = 0.0;

  Eigen::Index size() const { return samples.size(); }
  bool empty() const { return samples.size() == 0; }
  double duration_s() const {
    return static_cast<double>(samples.size()) / sample_rate_hz;
  }
};

inline void validate(const TimeSeries& ts, const char* what = "signal") {
  if (ts.empty()) throw InvalidArgument(std::string(what) + ": empty signal");
  if (!(ts.sample_rate_hz > 0.0))
    throw InvalidArgument(std::string(what) + ": sample rate must be positive");
}

template <typename Derived>
double rms(const Eigen::MatrixBase<Derived>& v) {
  if (v.size() == 0) return 0.0;
  return std::sqrt(v.squaredNorm() / static_cast<double>(v.size()));
}

// ||a - b|| / ||b||; zero reference with zero error reports 0.
template <typename DerivedA, typename DerivedB>
double relative_l2_error(const Eigen::MatrixBase<DerivedA>& a,
                         const Eigen::MatrixBase<DerivedB>& b) {
  const double ref = b.norm();
  const double err = (a - b).norm();
  if (ref == 0.0) return err == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return err / ref;
}

}  // namespace footfall
