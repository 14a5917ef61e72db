#include "footfall/classify.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "footfall/errors.hpp"
#include "footfall/rng.hpp"

namespace footfall {

const char* to_string(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::Logistic: return "logistic";
    case ClassifierKind::LinearSvm: return "linear-svm";
    case ClassifierKind::RbfApprox: return "rbf-approx";
  }
  return "unknown";
}

ClassifierKind classifier_kind_from_string(const std::string& name) {
  if (name == "logistic") return ClassifierKind::Logistic;
  if (name == "linear-svm") return ClassifierKind::LinearSvm;
  if (name == "rbf-approx") return ClassifierKind::RbfApprox;
  throw InvalidArgument("unknown classifier kind: " + name);
}

Hyperparams Hyperparams::defaults(ClassifierKind kind) {
  Hyperparams hp;
  if (kind == ClassifierKind::RbfApprox) hp.c = 100.0;
  return hp;
}

Eigen::VectorXd Normalizer::apply(const Eigen::VectorXd& x) const {
  if (x.size() != input_dim)
    throw InvalidArgument("normalizer: feature dimension mismatch");
  Eigen::VectorXd out(static_cast<Eigen::Index>(kept.size()));
  for (std::size_t i = 0; i < kept.size(); ++i) {
    out[static_cast<Eigen::Index>(i)] = (x[kept[i]] - mean[static_cast<Eigen::Index>(i)]) /
                                        stddev[static_cast<Eigen::Index>(i)];
  }
  return out;
}

Eigen::MatrixXd Normalizer::apply_rows(const Eigen::MatrixXd& x) const {
  if (x.cols() != input_dim)
    throw InvalidArgument("normalizer: feature dimension mismatch");
  Eigen::MatrixXd out(x.rows(), static_cast<Eigen::Index>(kept.size()));
  for (std::size_t i = 0; i < kept.size(); ++i) {
    const auto col = static_cast<Eigen::Index>(i);
    out.col(col) = (x.col(kept[i]).array() - mean[col]) / stddev[col];
  }
  return out;
}

Normalizer fit_normalizer(const Eigen::MatrixXd& rows) {
  if (rows.rows() < 2) throw InvalidArgument("normalizer: need at least two rows");
  Normalizer norm;
  norm.input_dim = static_cast<int>(rows.cols());
  const Eigen::RowVectorXd mean = rows.colwise().mean();
  std::vector<double> means, stds;
  for (Eigen::Index j = 0; j < rows.cols(); ++j) {
    const double var = (rows.col(j).array() - mean[j]).square().mean();
    const double sd = std::sqrt(var);
    if (sd > 1e-12) {
      norm.kept.push_back(static_cast<int>(j));
      means.push_back(mean[j]);
      stds.push_back(sd);
    }
  }
  if (norm.kept.empty()) throw DegenerateTraining("normalizer: all features constant");
  norm.mean = Eigen::Map<Eigen::VectorXd>(means.data(), static_cast<Eigen::Index>(means.size()));
  norm.stddev = Eigen::Map<Eigen::VectorXd>(stds.data(), static_cast<Eigen::Index>(stds.size()));
  return norm;
}

RandomFeatureMap make_random_feature_map(int input_dim, int rff_dim, double gamma,
                                         std::uint64_t seed) {
  if (input_dim < 1 || rff_dim < 1)
    throw InvalidArgument("random feature map: bad dimensions");
  if (!(gamma > 0.0)) throw InvalidArgument("random feature map: gamma must be > 0");
  RandomFeatureMap map;
  Rng rng(seed);
  // k(a, b) = exp(-gamma ||a-b||^2) = E[cos(w^T (a-b))] with w ~ N(0, 2*gamma*I).
  const double scale = std::sqrt(2.0 * gamma);
  map.projection.resize(input_dim, rff_dim);
  for (Eigen::Index i = 0; i < map.projection.rows(); ++i) {
    for (Eigen::Index j = 0; j < map.projection.cols(); ++j) {
      map.projection(i, j) = scale * rng.normal();
    }
  }
  map.phase.resize(rff_dim);
  for (Eigen::Index j = 0; j < rff_dim; ++j) {
    map.phase[j] = rng.uniform(0.0, 2.0 * std::numbers::pi);
  }
  return map;
}

Eigen::MatrixXd RandomFeatureMap::apply_rows(const Eigen::MatrixXd& x) const {
  if (x.cols() != projection.rows())
    throw InvalidArgument("random feature map: dimension mismatch");
  Eigen::MatrixXd z = x * projection;
  z.rowwise() += phase;
  const double amp = std::sqrt(2.0 / static_cast<double>(projection.cols()));
  return (z.array().cos() * amp).matrix();
}

namespace {

struct Dataset {
  Eigen::MatrixXd x;           // n x d raw features
  std::vector<int> y;          // class index per row (into labels)
  std::vector<int> labels;     // sorted distinct labels
};

Dataset to_dataset(const std::vector<AggregatedSample>& samples) {
  if (samples.empty()) throw InvalidArgument("classify: empty sample set");
  const Eigen::Index d = samples.front().features.size();
  std::set<int> label_set;
  for (const AggregatedSample& s : samples) {
    if (!s.label) throw InvalidArgument("classify: sample without label");
    if (s.features.size() != d)
      throw InvalidArgument("classify: inconsistent feature dimensions");
    if (!s.features.allFinite())
      throw InvalidArgument("classify: non-finite feature value");
    label_set.insert(*s.label);
  }
  Dataset ds;
  ds.labels.assign(label_set.begin(), label_set.end());
  ds.x.resize(static_cast<Eigen::Index>(samples.size()), d);
  ds.y.resize(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    ds.x.row(static_cast<Eigen::Index>(i)) = samples[i].features.transpose();
    ds.y[i] = static_cast<int>(std::distance(
        ds.labels.begin(), std::lower_bound(ds.labels.begin(), ds.labels.end(),
                                            *samples[i].label)));
  }
  return ds;
}

// Full-batch gradient descent on one-vs-rest L2-regularized cross-entropy.
void train_logistic(const Eigen::MatrixXd& x, const Eigen::MatrixXd& targets,
                    const Hyperparams& hp, Eigen::MatrixXd& w,
                    Eigen::RowVectorXd& b) {
  const double n = static_cast<double>(x.rows());
  for (int epoch = 0; epoch < hp.epochs; ++epoch) {
    Eigen::MatrixXd scores = (x * w).rowwise() + b;
    const Eigen::MatrixXd p = 1.0 / (1.0 + (-scores.array()).exp());
    const Eigen::MatrixXd diff = p - targets;            // n x K
    const Eigen::MatrixXd grad_w = x.transpose() * diff / n + hp.l2 * w;
    const Eigen::RowVectorXd grad_b = diff.colwise().sum() / n;
    w -= hp.learning_rate * grad_w;
    b -= hp.learning_rate * grad_b;
  }
}

// Deterministic full-batch subgradient descent on
//   0.5/(C*n) ||w||^2 + mean_i hinge(y_i s_i),
// with a 1/(1 + t/20) step decay. Reaches zero hinge on separable data.
void train_linear_svm(const Eigen::MatrixXd& x, const Eigen::MatrixXd& ysign,
                      const Hyperparams& hp, Eigen::MatrixXd& w,
                      Eigen::RowVectorXd& b) {
  const double n = static_cast<double>(x.rows());
  const double reg = 1.0 / (hp.c * n);
  for (int epoch = 0; epoch < hp.epochs; ++epoch) {
    const double step = hp.learning_rate / (1.0 + epoch / 20.0);
    Eigen::MatrixXd scores = (x * w).rowwise() + b;
    const Eigen::MatrixXd margin = ysign.array() * scores.array();
    const Eigen::MatrixXd active = (margin.array() < 1.0).cast<double>();
    const Eigen::MatrixXd push = active.array() * ysign.array();  // n x K
    const Eigen::MatrixXd grad_w = reg * w - x.transpose() * push / n;
    const Eigen::RowVectorXd grad_b = -push.colwise().sum() / n;
    w -= step * grad_w;
    b -= step * grad_b;
  }
}

Eigen::RowVectorXd softmax(const Eigen::RowVectorXd& scores) {
  const double shift = scores.maxCoeff();
  Eigen::RowVectorXd e = (scores.array() - shift).exp();
  return e / e.sum();
}

}  // namespace

ClassifierModel train(const std::vector<AggregatedSample>& samples,
                      ClassifierKind kind, const Hyperparams& hp,
                      std::uint64_t rng_seed) {
  Dataset ds = to_dataset(samples);
  const int k = static_cast<int>(ds.labels.size());
  if (k < 2) throw DegenerateTraining("train: need at least two classes");
  std::map<int, int> counts;
  for (const int yi : ds.y) ++counts[yi];
  for (const auto& [cls, count] : counts) {
    if (count < 2) throw DegenerateTraining("train: need at least two samples per class");
  }
  if (hp.epochs < 1 || !(hp.learning_rate > 0.0) || !(hp.c > 0.0))
    throw InvalidArgument("train: bad hyperparameters");

  ClassifierModel model;
  model.kind = kind;
  model.labels = ds.labels;
  model.hyperparams = hp;
  model.rng_seed = rng_seed;
  model.feature_dim = static_cast<int>(ds.x.cols());
  if (model.feature_dim == feature_dimension(true)) {
    model.feature_hash = feature_order_hash(true);
  } else if (model.feature_dim == feature_dimension(false)) {
    model.feature_hash = feature_order_hash(false);
  }

  model.normalizer = fit_normalizer(ds.x);
  Eigen::MatrixXd xn = model.normalizer.apply_rows(ds.x);

  if (kind == ClassifierKind::RbfApprox) {
    const RandomFeatureMap map = make_random_feature_map(
        static_cast<int>(xn.cols()), hp.rff_dim, hp.gamma, rng_seed);
    xn = map.apply_rows(xn);
  }

  const Eigen::Index n = xn.rows();
  const Eigen::Index d = xn.cols();
  Eigen::MatrixXd targets = Eigen::MatrixXd::Zero(n, k);   // 0/1 per class
  Eigen::MatrixXd ysign = Eigen::MatrixXd::Constant(n, k, -1.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    targets(i, ds.y[static_cast<std::size_t>(i)]) = 1.0;
    ysign(i, ds.y[static_cast<std::size_t>(i)]) = 1.0;
  }

  model.weights = Eigen::MatrixXd::Zero(d, k);
  model.bias = Eigen::RowVectorXd::Zero(k);
  if (kind == ClassifierKind::Logistic) {
    train_logistic(xn, targets, hp, model.weights, model.bias);
  } else {
    train_linear_svm(xn, ysign, hp, model.weights, model.bias);
  }
  return model;
}

Eigen::RowVectorXd ClassifierModel::scores(const Eigen::VectorXd& raw_features) const {
  Eigen::VectorXd xn = normalizer.apply(raw_features);
  if (kind == ClassifierKind::RbfApprox) {
    const RandomFeatureMap map = make_random_feature_map(
        static_cast<int>(xn.size()), hyperparams.rff_dim, hyperparams.gamma, rng_seed);
    xn = map.apply_rows(xn.transpose()).row(0).transpose();
  }
  return (xn.transpose() * weights) + bias;
}

Prediction predict(const ClassifierModel& model, const AggregatedSample& sample) {
  if (sample.features.size() != model.feature_dim)
    throw InvalidArgument("predict: feature dimension mismatch");
  if (!sample.features.allFinite())
    throw InvalidArgument("predict: non-finite feature value");
  const Eigen::RowVectorXd s = model.scores(sample.features);
  Eigen::Index best = 0;
  s.maxCoeff(&best);
  const Eigen::RowVectorXd p = softmax(s);
  return {model.labels[static_cast<std::size_t>(best)], p[best]};
}

Metrics evaluate(const ClassifierModel& model,
                 const std::vector<AggregatedSample>& samples) {
  if (samples.empty()) throw InvalidArgument("evaluate: empty sample set");
  const int k = static_cast<int>(model.labels.size());
  Metrics m;
  m.confusion = Eigen::MatrixXd::Zero(k, k);

  int correct = 0;
  for (const AggregatedSample& s : samples) {
    if (!s.label) throw InvalidArgument("evaluate: sample without label");
    const auto it = std::lower_bound(model.labels.begin(), model.labels.end(), *s.label);
    if (it == model.labels.end() || *it != *s.label)
      throw InvalidArgument("evaluate: label unseen at training time");
    const int actual = static_cast<int>(std::distance(model.labels.begin(), it));
    const Prediction pred = predict(model, s);
    const int predicted = static_cast<int>(std::distance(
        model.labels.begin(),
        std::lower_bound(model.labels.begin(), model.labels.end(), pred.label)));
    m.confusion(predicted, actual) += 1.0;
    if (predicted == actual) ++correct;
  }
  m.accuracy = static_cast<double>(correct) / static_cast<double>(samples.size());

  m.precision.resize(k);
  m.recall.resize(k);
  m.f1.resize(k);
  for (int c = 0; c < k; ++c) {
    const double tp = m.confusion(c, c);
    const double pred_total = m.confusion.row(c).sum();
    const double actual_total = m.confusion.col(c).sum();
    m.precision[c] = pred_total > 0.0 ? tp / pred_total : 0.0;
    m.recall[c] = actual_total > 0.0 ? tp / actual_total : 0.0;
    const double pr = m.precision[c] + m.recall[c];
    m.f1[c] = pr > 0.0 ? 2.0 * m.precision[c] * m.recall[c] / pr : 0.0;
  }
  m.macro_precision = m.precision.mean();
  m.macro_recall = m.recall.mean();
  m.macro_f1 = m.f1.mean();
  return m;
}

namespace {

CvStats stats_of(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  double mean = 0.0;
  for (const double x : v) mean += x;
  mean /= n;
  double var = 0.0;
  for (const double x : v) var += (x - mean) * (x - mean);
  return {mean, std::sqrt(var / n)};
}

}  // namespace

CvResult cross_validate(const std::vector<AggregatedSample>& samples,
                        ClassifierKind kind, const Hyperparams& hp, int folds,
                        std::uint64_t seed) {
  if (folds < 2) throw InvalidArgument("cross_validate: folds must be >= 2");
  if (static_cast<int>(samples.size()) < folds)
    throw InvalidArgument("cross_validate: fewer samples than folds");

  // Stratified assignment: shuffle each class, deal round-robin to folds.
  // Falls back to an unstratified deal when a class is smaller than folds.
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!samples[i].label) throw InvalidArgument("cross_validate: unlabeled sample");
    by_class[*samples[i].label].push_back(i);
  }
  bool stratified = true;
  for (const auto& [label, idx] : by_class) {
    if (static_cast<int>(idx.size()) < folds) stratified = false;
  }

  Rng rng(seed);
  const auto shuffle = [&rng](std::vector<std::size_t>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i) - 1));
      std::swap(v[i - 1], v[j]);
    }
  };

  std::vector<int> fold_of(samples.size(), 0);
  if (stratified) {
    for (auto& [label, idx] : by_class) {
      shuffle(idx);
      for (std::size_t i = 0; i < idx.size(); ++i)
        fold_of[idx[i]] = static_cast<int>(i % static_cast<std::size_t>(folds));
    }
  } else {
    std::vector<std::size_t> all(samples.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    shuffle(all);
    for (std::size_t i = 0; i < all.size(); ++i)
      fold_of[all[i]] = static_cast<int>(i % static_cast<std::size_t>(folds));
  }

  CvResult result;
  std::vector<double> acc, prec, rec, f1;
  for (int f = 0; f < folds; ++f) {
    std::vector<AggregatedSample> train_set, test_set;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      (fold_of[i] == f ? test_set : train_set).push_back(samples[i]);
    }
    if (test_set.empty() || train_set.empty())
      throw InvalidArgument("cross_validate: empty fold");
    const ClassifierModel model = train(train_set, kind, hp, derive_seed(seed, "fold"));
    const Metrics m = evaluate(model, test_set);
    acc.push_back(m.accuracy);
    prec.push_back(m.macro_precision);
    rec.push_back(m.macro_recall);
    f1.push_back(m.macro_f1);
    result.folds.push_back(std::move(m));
  }
  result.accuracy = stats_of(acc);
  result.precision = stats_of(prec);
  result.recall = stats_of(rec);
  result.f1 = stats_of(f1);
  return result;
}

std::vector<LearningCurvePoint> learning_curve(
    const std::vector<AggregatedSample>& samples, ClassifierKind kind,
    const Hyperparams& hp, std::vector<int> train_sizes, std::uint64_t seed) {
  std::sort(train_sizes.begin(), train_sizes.end());
  train_sizes.erase(std::unique(train_sizes.begin(), train_sizes.end()),
                    train_sizes.end());
  if (train_sizes.empty()) throw InvalidArgument("learning_curve: no sizes");
  if (train_sizes.front() < 2)
    throw InvalidArgument("learning_curve: sizes must be >= 2");

  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!samples[i].label) throw InvalidArgument("learning_curve: unlabeled sample");
    by_class[*samples[i].label].push_back(i);
  }

  Rng rng(seed);
  const auto shuffle = [&rng](std::vector<std::size_t>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i) - 1));
      std::swap(v[i - 1], v[j]);
    }
  };

  // Fixed held-out set: one quarter per class (at least one sample).
  std::vector<AggregatedSample> held_out;
  std::map<int, std::vector<std::size_t>> pool;
  std::size_t min_pool = std::numeric_limits<std::size_t>::max();
  for (auto& [label, idx] : by_class) {
    if (idx.size() < 3)
      throw InvalidArgument("learning_curve: need at least 3 samples per class");
    shuffle(idx);
    const std::size_t held = std::max<std::size_t>(1, idx.size() / 4);
    for (std::size_t i = 0; i < held; ++i) held_out.push_back(samples[idx[i]]);
    pool[label].assign(idx.begin() + static_cast<std::ptrdiff_t>(held), idx.end());
    min_pool = std::min(min_pool, pool[label].size());
  }
  if (static_cast<std::size_t>(train_sizes.back()) > min_pool)
    throw InvalidArgument("learning_curve: size exceeds available training pool");

  std::vector<LearningCurvePoint> curve;
  for (const int size : train_sizes) {
    std::vector<AggregatedSample> train_set;
    for (const auto& [label, idx] : pool) {
      for (int i = 0; i < size; ++i) train_set.push_back(samples[idx[static_cast<std::size_t>(i)]]);
    }
    const ClassifierModel model = train(train_set, kind, hp, derive_seed(seed, "curve"));
    curve.push_back({size, evaluate(model, held_out).accuracy});
  }
  return curve;
}

namespace {

constexpr const char* kModelMagic = "footfall-model";
constexpr int kModelVersion = 1;

void write_vector(std::ostream& out, const char* tag, const Eigen::VectorXd& v) {
  out << tag << ' ' << v.size();
  for (Eigen::Index i = 0; i < v.size(); ++i) out << ' ' << v[i];
  out << '\n';
}

Eigen::VectorXd read_vector(std::istream& in, const std::string& expect_tag) {
  std::string tag;
  Eigen::Index n = 0;
  if (!(in >> tag >> n) || tag != expect_tag)
    throw IoError("load_model: expected '" + expect_tag + "' section");
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(in >> v[i])) throw IoError("load_model: truncated " + expect_tag);
  }
  return v;
}

}  // namespace

void save_model(const ClassifierModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("save_model: cannot open " + path);
  out.precision(17);
  out << kModelMagic << " v" << kModelVersion << '\n';
  out << "kind " << to_string(model.kind) << '\n';
  out << "labels " << model.labels.size();
  for (const int l : model.labels) out << ' ' << l;
  out << '\n';
  out << "feature_dim " << model.feature_dim << '\n';
  out << "feature_hash " << model.feature_hash << '\n';
  const Hyperparams& hp = model.hyperparams;
  out << "hyperparams " << hp.learning_rate << ' ' << hp.epochs << ' ' << hp.c << ' '
      << hp.l2 << ' ' << hp.gamma << ' ' << hp.rff_dim << '\n';
  out << "rng_seed " << model.rng_seed << '\n';
  out << "kept " << model.normalizer.kept.size();
  for (const int k : model.normalizer.kept) out << ' ' << k;
  out << '\n';
  write_vector(out, "mean", model.normalizer.mean);
  write_vector(out, "stddev", model.normalizer.stddev);
  out << "weights " << model.weights.rows() << ' ' << model.weights.cols();
  for (Eigen::Index i = 0; i < model.weights.rows(); ++i) {
    for (Eigen::Index j = 0; j < model.weights.cols(); ++j) out << ' ' << model.weights(i, j);
  }
  out << '\n';
  write_vector(out, "bias", model.bias.transpose());
  if (!out) throw IoError("save_model: write failed for " + path);
}

ClassifierModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("load_model: cannot open " + path);
  std::string magic, version;
  in >> magic >> version;
  if (magic != kModelMagic || version != "v1")
    throw IoError("load_model: unsupported model format");

  ClassifierModel model;
  std::string tag, kind_name;
  in >> tag >> kind_name;
  if (tag != "kind") throw IoError("load_model: missing kind");
  model.kind = classifier_kind_from_string(kind_name);

  std::size_t count = 0;
  in >> tag >> count;
  if (tag != "labels") throw IoError("load_model: missing labels");
  model.labels.resize(count);
  for (auto& l : model.labels) in >> l;

  in >> tag >> model.feature_dim;
  if (tag != "feature_dim") throw IoError("load_model: missing feature_dim");
  in >> tag >> model.feature_hash;
  if (tag != "feature_hash") throw IoError("load_model: missing feature_hash");

  Hyperparams hp;
  in >> tag >> hp.learning_rate >> hp.epochs >> hp.c >> hp.l2 >> hp.gamma >> hp.rff_dim;
  if (tag != "hyperparams") throw IoError("load_model: missing hyperparams");
  model.hyperparams = hp;
  in >> tag >> model.rng_seed;
  if (tag != "rng_seed") throw IoError("load_model: missing rng_seed");

  in >> tag >> count;
  if (tag != "kept") throw IoError("load_model: missing normalizer");
  model.normalizer.kept.resize(count);
  for (auto& k : model.normalizer.kept) in >> k;
  model.normalizer.input_dim = model.feature_dim;
  model.normalizer.mean = read_vector(in, "mean");
  model.normalizer.stddev = read_vector(in, "stddev");

  Eigen::Index rows = 0, cols = 0;
  in >> tag >> rows >> cols;
  if (tag != "weights") throw IoError("load_model: missing weights");
  model.weights.resize(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      if (!(in >> model.weights(i, j))) throw IoError("load_model: truncated weights");
    }
  }
  model.bias = read_vector(in, "bias").transpose();
  if (!in) throw IoError("load_model: truncated file");

  // A model trained on the canonical footfall layout must match the current
  // column order exactly.
  if (model.feature_dim == feature_dimension(true) &&
      model.feature_hash != 0 && model.feature_hash != feature_order_hash(true))
    throw IoError("load_model: feature column order hash mismatch");
  if (model.feature_dim == feature_dimension(false) &&
      model.feature_hash != 0 && model.feature_hash != feature_order_hash(false))
    throw IoError("load_model: feature column order hash mismatch");
  return model;
}

}  // namespace footfall
