#pragma once

#include <map>
#include <vector>

#include <Eigen/Core>

#include "footfall/gabor_dictionary.hpp"
#include "footfall/time_series.hpp"

namespace footfall {

struct LassoConfig {
  double lambda_rel = 0.05;  // lambda as a fraction of max |D~^T s|, in (0, 1]
  int max_iters = 2000;      // coordinate-descent sweep budget
  double tol = 5e-4;         // converged when duality gap <= tol * 0.5*||s||^2
                             // or when the largest coefficient change in a
                             // sweep falls below tol
  bool trace_objective = false;  // record the objective after every sweep
};

void validate(const LassoConfig& cfg);

// Solution of min_x 0.5*||Dx - s||^2 + lambda*||x||_1 in the raw-atom
// convention (the solver works on unit-normalized columns internally and
// rescales back). Only nonzero coefficients are stored.
struct SparseCode {
  std::map<int, double> coefficients;
  double residual_l2 = 0.0;
  double lambda = 0.0;       // on the normalized-column problem
  bool converged = false;
  int sweeps = 0;
  double duality_gap = 0.0;  // at termination, normalized-column problem
  std::vector<double> objective_trace;  // filled when cfg.trace_objective
};

// Column access used by the solver, so the same algorithm runs against the
// factored Gabor dictionary or any plain matrix (tests use an identity).
class AtomSource {
 public:
  virtual ~AtomSource() = default;
  virtual Eigen::Index atom_count() const = 0;
  virtual Eigen::Index length() const = 0;
  virtual void column(Eigen::Index j, Eigen::Ref<Eigen::VectorXd> out) const = 0;
  virtual Eigen::VectorXd correlations(const Eigen::VectorXd& v) const = 0;
  virtual const Eigen::VectorXd& column_norms() const = 0;
};

class DenseAtomSource final : public AtomSource {
 public:
  explicit DenseAtomSource(Eigen::MatrixXd atoms);
  Eigen::Index atom_count() const override { return atoms_.cols(); }
  Eigen::Index length() const override { return atoms_.rows(); }
  void column(Eigen::Index j, Eigen::Ref<Eigen::VectorXd> out) const override;
  Eigen::VectorXd correlations(const Eigen::VectorXd& v) const override;
  const Eigen::VectorXd& column_norms() const override { return norms_; }

 private:
  Eigen::MatrixXd atoms_;
  Eigen::VectorXd norms_;
};

class GaborAtomSource final : public AtomSource {
 public:
  explicit GaborAtomSource(const GaborDictionary& dict) : dict_(dict) {}
  Eigen::Index atom_count() const override { return dict_.atom_count(); }
  Eigen::Index length() const override { return dict_.length_l(); }
  void column(Eigen::Index j, Eigen::Ref<Eigen::VectorXd> out) const override {
    dict_.column(j, out);
  }
  Eigen::VectorXd correlations(const Eigen::VectorXd& v) const override {
    return dict_.correlations(v);
  }
  const Eigen::VectorXd& column_norms() const override { return dict_.column_norms(); }

 private:
  const GaborDictionary& dict_;
};

// Cyclic coordinate descent with a working set: coordinates whose
// correlation exceeds lambda enter the set, sweeps run until stable, and a
// full optimality pass re-admits any violators. Dimension mismatch throws
// InvalidArgument; hitting the sweep budget returns converged = false.
SparseCode solve_lasso(const AtomSource& atoms, const Eigen::VectorXd& target,
                       const LassoConfig& cfg = {});
SparseCode solve_lasso(const GaborDictionary& dict, const TimeSeries& target,
                       const LassoConfig& cfg = {});
SparseCode solve_lasso(const Eigen::MatrixXd& atoms, const Eigen::VectorXd& target,
                       const LassoConfig& cfg = {});

// Sorts coefficients by decreasing squared magnitude (ties to the lower atom
// index), truncates to at most length_l - 1 entries, and returns the
// shortest prefix reaching energy_fraction of the total squared-coefficient
// mass. When column norms are supplied, each squared coefficient is weighted
// by its atom's squared norm so the ranking reflects actual signal energy;
// without norms the raw coefficients are compared directly. Throws EmptyCode
// for a code with no coefficients.
std::vector<int> select_atoms_by_energy(const SparseCode& code, int length_l,
                                        double energy_fraction,
                                        const Eigen::VectorXd& column_norms = {});

struct ProjectionResult {
  Eigen::VectorXd coefficients;
  double residual_l2 = 0.0;
  bool rank_deficient = false;  // condition > 1e10: rank-truncated solve used
};

// Least-squares coefficients for target on the given atom columns (SVD
// pseudoinverse). Requires columns <= rows.
ProjectionResult project_least_squares(const Eigen::MatrixXd& selected_atoms,
                                       const Eigen::VectorXd& target);

}  // namespace footfall
