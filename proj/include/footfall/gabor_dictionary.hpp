#pragma once

#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace footfall {

// Over-complete Gabor dictionary for events of length L. Columns live on the
// normalized time grid t = tau = {0, 1/(L-1), ..., 1} and are ordered per
// tau block: the pure Gaussian envelope exp(-(t-tau)^2/sigma^2) first, then
// alternating cosine/sine atoms env*cos(w t), env*sin(w t) for
// w = 5, 10, ..., 250. Column count is (1 + 2*50)*L = 101*L.
//
// The dictionary is stored factored (envelope L x L, trig table 101 x L);
// products against it never materialize the full L x 101L matrix unless
// atoms() is called. Immutable after construction and shareable.
class GaborDictionary {
 public:
  static constexpr double kSigma = 0.5;
  static constexpr double kOmegaStep = 5.0;
  static constexpr double kOmegaMax = 250.0;
  static constexpr int kOmegaCount = 50;      // 5..250 step 5
  static constexpr int kBlockSize = 1 + 2 * kOmegaCount;  // 101 columns per tau

  explicit GaborDictionary(int length_l);

  int length_l() const { return length_l_; }
  Eigen::Index atom_count() const { return static_cast<Eigen::Index>(kBlockSize) * length_l_; }
  const Eigen::VectorXd& omegas() const { return omegas_; }
  const Eigen::VectorXd& column_norms() const { return column_norms_; }
  const Eigen::MatrixXd& envelope() const { return envelope_; }
  const Eigen::MatrixXd& trig() const { return trig_; }  // L x 101, column per block slot

  // Writes raw atom j (0-based, j = tau_index*101 + block offset) into out.
  void column(Eigen::Index j, Eigen::Ref<Eigen::VectorXd> out) const;

  // D^T v for the raw (unnormalized) atoms; length 101*L.
  Eigen::VectorXd correlations(const Eigen::VectorXd& v) const;

  // Full atom matrix (L x 101L), materialized on first use and cached.
  const Eigen::MatrixXd& atoms() const;

 private:
  int length_l_;
  Eigen::VectorXd grid_;       // t = tau grid
  Eigen::VectorXd omegas_;
  Eigen::MatrixXd envelope_;   // envelope_(i, k) = exp(-((t_i - tau_k)/sigma)^2)
  Eigen::MatrixXd trig_;       // columns: [1, cos(w1 t), sin(w1 t), ..., sin(w50 t)]
  Eigen::VectorXd column_norms_;

  mutable std::once_flag atoms_once_;
  mutable std::unique_ptr<Eigen::MatrixXd> atoms_;
};

// Throws InvalidArgument for length_l < 2.
GaborDictionary generate_dictionary(int length_l);

// Process-wide LRU cache so repeated compressions of equal-length events
// share one immutable dictionary. At most one generation per L.
std::shared_ptr<const GaborDictionary> shared_dictionary(int length_l);

// Sub-matrix D(:, indices) with columns in the given order. Out-of-range or
// duplicate indices throw InvalidArgument.
Eigen::MatrixXd select_columns(const GaborDictionary& dictionary,
                               std::span<const int> indices);

}  // namespace footfall
