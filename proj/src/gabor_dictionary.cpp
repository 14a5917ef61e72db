#include "footfall/gabor_dictionary.hpp"

#include <list>
#include <unordered_map>
#include <unordered_set>

#include "footfall/errors.hpp"

namespace footfall {

GaborDictionary::GaborDictionary(int length_l) : length_l_(length_l) {
  if (length_l < 2)
    throw InvalidArgument("generate_dictionary: length must be >= 2");

  const int L = length_l;
  grid_ = Eigen::VectorXd::LinSpaced(L, 0.0, 1.0);

  omegas_.resize(kOmegaCount);
  for (int m = 0; m < kOmegaCount; ++m) omegas_[m] = kOmegaStep * (m + 1);

  // The printed atom formula has a growing exponent; implemented with the
  // decaying sign, which is the Gaussian window that makes the atoms usable.
  envelope_.resize(L, L);
  const double inv_sigma_sq = 1.0 / (kSigma * kSigma);
  for (int k = 0; k < L; ++k) {
    envelope_.col(k) =
        (-(grid_.array() - grid_[k]).square() * inv_sigma_sq).exp().matrix();
  }

  // Stored with one column per block slot so that atom assembly reads two
  // contiguous length-L vectors.
  trig_.resize(L, kBlockSize);
  trig_.col(0).setOnes();
  for (int m = 0; m < kOmegaCount; ++m) {
    trig_.col(1 + 2 * m) = (omegas_[m] * grid_.array()).cos().matrix();
    trig_.col(2 + 2 * m) = (omegas_[m] * grid_.array()).sin().matrix();
  }

  // ||col(k, q)||^2 = sum_i env(i,k)^2 trig(i,q)^2, computed as one product.
  const Eigen::MatrixXd norms_sq = envelope_.array().square().matrix().transpose() *
                                   trig_.array().square().matrix();  // L x 101
  column_norms_.resize(atom_count());
  for (int k = 0; k < L; ++k) {
    column_norms_.segment(static_cast<Eigen::Index>(k) * kBlockSize, kBlockSize) =
        norms_sq.row(k).array().sqrt().matrix().transpose();
  }
}

void GaborDictionary::column(Eigen::Index j, Eigen::Ref<Eigen::VectorXd> out) const {
  const Eigen::Index k = j / kBlockSize;
  const Eigen::Index q = j % kBlockSize;
  out = envelope_.col(k).cwiseProduct(trig_.col(q));
}

Eigen::VectorXd GaborDictionary::correlations(const Eigen::VectorXd& v) const {
  const int L = length_l_;
  // B(k, q) = sum_i v_i env(i,k) trig(i,q): one dgemm covers every atom.
  const Eigen::MatrixXd scaled = v.asDiagonal() * envelope_;       // L x L
  const Eigen::MatrixXd per_block = scaled.transpose() * trig_;    // L x 101
  Eigen::VectorXd out(atom_count());
  for (int k = 0; k < L; ++k) {
    out.segment(static_cast<Eigen::Index>(k) * kBlockSize, kBlockSize) =
        per_block.row(k).transpose();
  }
  return out;
}

const Eigen::MatrixXd& GaborDictionary::atoms() const {
  std::call_once(atoms_once_, [this] {
    auto full = std::make_unique<Eigen::MatrixXd>(length_l_, atom_count());
    for (int k = 0; k < length_l_; ++k) {
      full->middleCols(static_cast<Eigen::Index>(k) * kBlockSize, kBlockSize) =
          envelope_.col(k).asDiagonal() * trig_;
    }
    atoms_ = std::move(full);
  });
  return *atoms_;
}

GaborDictionary generate_dictionary(int length_l) { return GaborDictionary(length_l); }

namespace {

// Small LRU keyed by L. The factored form is O(L^2) memory, so a handful of
// cached lengths stays well under 100 MB.
class DictionaryCache {
 public:
  std::shared_ptr<const GaborDictionary> get(int length_l) {
    std::lock_guard<std::mutex> lock(mutex_);
    if (auto it = map_.find(length_l); it != map_.end()) {
      order_.splice(order_.begin(), order_, it->second.second);
      return it->second.first;
    }
    auto dict = std::make_shared<const GaborDictionary>(length_l);
    order_.push_front(length_l);
    map_.emplace(length_l, std::make_pair(dict, order_.begin()));
    if (map_.size() > kCapacity) {
      map_.erase(order_.back());
      order_.pop_back();
    }
    return dict;
  }

 private:
  static constexpr std::size_t kCapacity = 16;
  std::mutex mutex_;
  std::list<int> order_;
  std::unordered_map<int, std::pair<std::shared_ptr<const GaborDictionary>,
                                    std::list<int>::iterator>>
      map_;
};

}  // namespace

std::shared_ptr<const GaborDictionary> shared_dictionary(int length_l) {
  static DictionaryCache cache;
  return cache.get(length_l);
}

Eigen::MatrixXd select_columns(const GaborDictionary& dictionary,
                               std::span<const int> indices) {
  const Eigen::Index total = dictionary.atom_count();
  std::unordered_set<int> seen;
  seen.reserve(indices.size());
  for (const int j : indices) {
    if (j < 0 || j >= total)
      throw InvalidArgument("select_columns: atom index out of range");
    if (!seen.insert(j).second)
      throw InvalidArgument("select_columns: duplicate atom index");
  }
  Eigen::MatrixXd out(dictionary.length_l(), static_cast<Eigen::Index>(indices.size()));
  for (std::size_t c = 0; c < indices.size(); ++c) {
    dictionary.column(indices[c], out.col(static_cast<Eigen::Index>(c)));
  }
  return out;
}

}  // namespace footfall
