#include "footfall/sparse_coder.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>

#include "footfall/errors.hpp"

namespace footfall {

void validate(const LassoConfig& cfg) {
  // lambda_rel == 1 pins lambda at max|D~^T s|, where the exact solution is
  // x = 0; useful as the null-solution boundary case.
  if (!(cfg.lambda_rel > 0.0) || cfg.lambda_rel > 1.0)
    throw InvalidArgument("lasso: lambda_rel must be in (0, 1]");
  if (cfg.max_iters < 1) throw InvalidArgument("lasso: max_iters must be >= 1");
  if (!(cfg.tol > 0.0)) throw InvalidArgument("lasso: tol must be > 0");
}

DenseAtomSource::DenseAtomSource(Eigen::MatrixXd atoms) : atoms_(std::move(atoms)) {
  if (atoms_.cols() == 0 || atoms_.rows() == 0)
    throw InvalidArgument("atom source: empty matrix");
  norms_ = atoms_.colwise().norm();
}

void DenseAtomSource::column(Eigen::Index j, Eigen::Ref<Eigen::VectorXd> out) const {
  out = atoms_.col(j);
}

Eigen::VectorXd DenseAtomSource::correlations(const Eigen::VectorXd& v) const {
  return atoms_.transpose() * v;
}

namespace {

double soft_threshold(double u, double lambda) {
  if (u > lambda) return u - lambda;
  if (u < -lambda) return u + lambda;
  return 0.0;
}

}  // namespace

SparseCode solve_lasso(const AtomSource& atoms, const Eigen::VectorXd& target,
                       const LassoConfig& cfg) {
  validate(cfg);
  const Eigen::Index n = atoms.length();
  const Eigen::Index cols = atoms.atom_count();
  if (target.size() != n)
    throw InvalidArgument("solve_lasso: target length does not match atoms");

  const Eigen::VectorXd& norms = atoms.column_norms();
  for (Eigen::Index j = 0; j < cols; ++j) {
    if (!(norms[j] > 0.0)) throw InvalidArgument("solve_lasso: zero-norm atom");
  }

  SparseCode code;
  const double half_ss = 0.5 * target.squaredNorm();

  // Correlations of the unit-normalized columns fix lambda.
  Eigen::VectorXd corr = atoms.correlations(target).cwiseQuotient(norms);
  const double lambda_max = corr.cwiseAbs().maxCoeff();
  const double lambda = cfg.lambda_rel * lambda_max;
  code.lambda = lambda;
  if (lambda_max == 0.0) {  // all-zero target
    code.converged = true;
    code.residual_l2 = target.norm();
    return code;
  }

  Eigen::VectorXd x = Eigen::VectorXd::Zero(cols);
  Eigen::VectorXd r = target;
  Eigen::VectorXd col_buf(n);

  // Screening: coordinates violating optimality at x = 0. Highly coherent
  // dictionaries can put tens of thousands of columns over the threshold;
  // cap the initial set at the strongest correlations and let the
  // optimality passes re-admit anything that still matters.
  constexpr std::size_t kInitialCap = 2048;
  std::vector<Eigen::Index> working;
  working.reserve(1024);
  for (Eigen::Index j = 0; j < cols; ++j) {
    if (std::abs(corr[j]) > lambda) working.push_back(j);
  }
  if (working.size() > kInitialCap) {
    std::partial_sort(working.begin(), working.begin() + kInitialCap, working.end(),
                      [&](Eigen::Index a, Eigen::Index b) {
                        const double ca = std::abs(corr[a]), cb = std::abs(corr[b]);
                        if (ca != cb) return ca > cb;
                        return a < b;
                      });
    working.resize(kInitialCap);
  }

  // Sweep order matters in a frame this coherent: visiting the strongest
  // overlap first lets one atom absorb its energy before its near
  // duplicates are updated, instead of smearing mass along whole runs of
  // adjacent shifts. The key is the raw-column correlation |d_j^T r|
  // (normalized correlations would rank clipped edge atoms first purely
  // because of their small norms). Deterministic: index tie-break.
  const auto order_working = [&](const Eigen::VectorXd& key) {
    std::sort(working.begin(), working.end(), [&](Eigen::Index a, Eigen::Index b) {
      const double ka = std::abs(key[a]), kb = std::abs(key[b]);
      if (ka != kb) return ka > kb;
      return a < b;
    });
  };
  order_working(corr.cwiseProduct(norms));

  const auto objective = [&] { return 0.5 * r.squaredNorm() + lambda * x.lpNorm<1>(); };

  int sweeps = 0;
  bool converged = false;
  double gap = half_ss;

  // Normalized columns of a small working set are cached densely; sweeps on
  // the cache touch contiguous memory only. Large (early) sets run off the
  // factored representation directly.
  constexpr std::size_t kCacheCap = 1024;
  Eigen::MatrixXd cache;

  // The inner loop stabilizes the working set well past the user tolerance;
  // otherwise loose tolerances degenerate into one-sweep phases dominated by
  // the full optimality pass.
  const double inner_tol = std::min(cfg.tol, 2e-4);

  while (sweeps < cfg.max_iters) {
    const bool use_cache = working.size() <= kCacheCap && !working.empty();
    if (use_cache) {
      cache.resize(n, static_cast<Eigen::Index>(working.size()));
      for (std::size_t i = 0; i < working.size(); ++i) {
        atoms.column(working[i], cache.col(static_cast<Eigen::Index>(i)));
        cache.col(static_cast<Eigen::Index>(i)) /= norms[working[i]];
      }
    }

    // Inner cyclic sweeps over the working set until coefficients settle.
    // After the first sweeps of a phase, zero coordinates are skipped; the
    // outer optimality pass re-admits any that still matter.
    double dmax = 0.0;
    for (int inner = 0; inner < 50 && sweeps < cfg.max_iters; ++inner) {
      ++sweeps;
      dmax = 0.0;
      if (use_cache) {
        const bool shrink = inner >= 3;
        for (std::size_t i = 0; i < working.size(); ++i) {
          const Eigen::Index j = working[i];
          if (shrink && x[j] == 0.0) continue;
          const auto col = cache.col(static_cast<Eigen::Index>(i));
          const double u = x[j] + col.dot(r);
          const double next = soft_threshold(u, lambda);
          if (next != x[j]) {
            const double delta = next - x[j];
            r -= delta * col;
            x[j] = next;
            dmax = std::max(dmax, std::abs(delta));
          }
        }
      } else {
        for (const Eigen::Index j : working) {
          atoms.column(j, col_buf);
          const double inv_norm = 1.0 / norms[j];
          const double u = x[j] + col_buf.dot(r) * inv_norm;
          const double next = soft_threshold(u, lambda);
          if (next != x[j]) {
            const double delta = next - x[j];
            r -= (delta * inv_norm) * col_buf;
            x[j] = next;
            dmax = std::max(dmax, std::abs(delta));
          }
        }
        // Early pruning keeps the big screening set from dominating.
        std::erase_if(working, [&](Eigen::Index j) { return x[j] == 0.0; });
      }
      if (cfg.trace_objective) code.objective_trace.push_back(objective());
      if (dmax < inner_tol) break;
    }
    std::erase_if(working, [&](Eigen::Index j) { return x[j] == 0.0; });

    // Optimality pass over every column: re-admit violators, measure the
    // duality gap with the scaled-residual dual point.
    const Eigen::VectorXd grad = atoms.correlations(r).cwiseQuotient(norms);
    const double gmax = grad.cwiseAbs().maxCoeff();
    const double primal = objective();
    const double scale = gmax > lambda ? lambda / gmax : 1.0;
    const Eigen::VectorXd theta = scale * r;
    gap = primal - (half_ss - 0.5 * (target - theta).squaredNorm());

    std::vector<Eigen::Index> violators;
    for (Eigen::Index j = 0; j < cols; ++j) {
      if (x[j] == 0.0 && std::abs(grad[j]) > lambda * (1.0 + 1e-12)) {
        violators.push_back(j);
      }
    }

    if (violators.empty() && (gap <= cfg.tol * half_ss || dmax < cfg.tol)) {
      converged = true;
      break;
    }
    if (violators.empty() && sweeps >= cfg.max_iters) break;
    if (!violators.empty()) {
      working.insert(working.end(), violators.begin(), violators.end());
      std::sort(working.begin(), working.end());
      working.erase(std::unique(working.begin(), working.end()), working.end());
      order_working((x.cwiseAbs() + grad.cwiseAbs()).cwiseProduct(norms));
    }
  }

  code.converged = converged;
  code.sweeps = sweeps;
  code.duality_gap = gap;
  code.residual_l2 = r.norm();
  for (Eigen::Index j = 0; j < cols; ++j) {
    if (x[j] != 0.0) {
      // Back to the raw-atom convention: D * x_raw = D~ * x.
      code.coefficients.emplace(static_cast<int>(j), x[j] / norms[j]);
    }
  }
  return code;
}

SparseCode solve_lasso(const GaborDictionary& dict, const TimeSeries& target,
                       const LassoConfig& cfg) {
  if (target.size() != dict.length_l())
    throw InvalidArgument("solve_lasso: target length must equal dictionary length");
  return solve_lasso(GaborAtomSource(dict), target.samples, cfg);
}

SparseCode solve_lasso(const Eigen::MatrixXd& atoms, const Eigen::VectorXd& target,
                       const LassoConfig& cfg) {
  return solve_lasso(DenseAtomSource(atoms), target, cfg);
}

std::vector<int> select_atoms_by_energy(const SparseCode& code, int length_l,
                                        double energy_fraction,
                                        const Eigen::VectorXd& column_norms) {
  if (!(energy_fraction > 0.0) || energy_fraction > 1.0)
    throw InvalidArgument("select_atoms_by_energy: fraction must be in (0, 1]");
  if (length_l < 2) throw InvalidArgument("select_atoms_by_energy: bad length");
  if (code.coefficients.empty())
    throw EmptyCode("select_atoms_by_energy: code has no coefficients");

  // entry = (atom index, squared energy contribution)
  std::vector<std::pair<int, double>> entries;
  entries.reserve(code.coefficients.size());
  for (const auto& [idx, c] : code.coefficients) {
    double e = c * c;
    if (column_norms.size() > 0) {
      if (idx >= column_norms.size())
        throw InvalidArgument("select_atoms_by_energy: norms shorter than atom index");
      e *= column_norms[idx] * column_norms[idx];
    }
    entries.emplace_back(idx, e);
  }
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;  // deterministic tie-break
  });

  double total = 0.0;
  for (const auto& [idx, e] : entries) total += e;

  const std::size_t cap = std::min<std::size_t>(entries.size(),
                                                static_cast<std::size_t>(length_l - 1));
  std::vector<int> selected;
  selected.reserve(cap);
  double cumulative = 0.0;
  for (std::size_t i = 0; i < cap; ++i) {
    selected.push_back(entries[i].first);
    cumulative += entries[i].second;
    if (cumulative >= energy_fraction * total) break;
  }
  return selected;
}

ProjectionResult project_least_squares(const Eigen::MatrixXd& selected_atoms,
                                       const Eigen::VectorXd& target) {
  if (selected_atoms.rows() != target.size())
    throw InvalidArgument("project_least_squares: dimension mismatch");
  if (selected_atoms.cols() > selected_atoms.rows())
    throw InvalidArgument("project_least_squares: more atoms than samples");

  ProjectionResult result;
  if (selected_atoms.cols() == 0) {
    result.residual_l2 = target.norm();
    return result;
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(selected_atoms,
                                        Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double smax = sv[0];
  constexpr double kMaxCondition = 1e10;
  const double cutoff = smax / kMaxCondition;
  result.rank_deficient = sv[sv.size() - 1] <= cutoff;

  // Rank-truncated pseudoinverse: small singular directions dropped, which
  // yields the minimum-norm solution on the numerical range.
  Eigen::VectorXd inv_sv = Eigen::VectorXd::Zero(sv.size());
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv[i] > cutoff) inv_sv[i] = 1.0 / sv[i];
  }
  result.coefficients =
      svd.matrixV() * inv_sv.asDiagonal() * (svd.matrixU().transpose() * target);
  result.residual_l2 = (selected_atoms * result.coefficients - target).norm();
  return result;
}

}  // namespace footfall
