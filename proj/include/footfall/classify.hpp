#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "footfall/features.hpp"

namespace footfall {

enum class ClassifierKind { Logistic, LinearSvm, RbfApprox };

const char* to_string(ClassifierKind kind);
ClassifierKind classifier_kind_from_string(const std::string& name);

struct Hyperparams {
  double learning_rate = 0.5;  // logistic gradient step
  int epochs = 400;
  double c = 1.0;              // SVM slack weight
  double l2 = 1e-4;            // logistic weight decay
  double gamma = 0.001;        // Gaussian kernel exp(-gamma ||a-b||^2)
  int rff_dim = 512;           // random cosine features for the kernel map

  // Grid-searched values: C = 1 for the linear SVM, C = 100 with
  // gamma = 0.001 for the kernel approximation.
  static Hyperparams defaults(ClassifierKind kind);
};

// Per-feature standardization fit on training data only. Zero-variance
// features are dropped and their indices recorded.
struct Normalizer {
  Eigen::VectorXd mean;       // over kept features
  Eigen::VectorXd stddev;     // over kept features, all > 0
  std::vector<int> kept;      // indices into the raw feature vector
  int input_dim = 0;

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd apply_rows(const Eigen::MatrixXd& x) const;
};

Normalizer fit_normalizer(const Eigen::MatrixXd& rows);

struct ClassifierModel {
  ClassifierKind kind = ClassifierKind::Logistic;
  std::vector<int> labels;     // sorted class labels
  Normalizer normalizer;
  Eigen::MatrixXd weights;     // d x K, one-vs-rest
  Eigen::RowVectorXd bias;     // 1 x K
  Hyperparams hyperparams;
  std::uint64_t rng_seed = 0;  // regenerates the random feature map
  int feature_dim = 0;         // raw input dimensionality
  std::uint64_t feature_hash = 0;  // column-order hash, 0 for free-form data

  // Raw per-class scores (logits / margins) for a normalized input.
  Eigen::RowVectorXd scores(const Eigen::VectorXd& raw_features) const;
};

struct Prediction {
  int label = 0;
  double confidence = 0.0;  // softmax of the per-class scores
};

struct Metrics {
  double accuracy = 0.0;
  Eigen::VectorXd precision, recall, f1;  // per class, model label order
  double macro_precision = 0.0, macro_recall = 0.0, macro_f1 = 0.0;
  Eigen::MatrixXd confusion;  // rows = predicted, columns = actual
};

struct CvStats {
  double mean = 0.0;
  double stddev = 0.0;
};

struct CvResult {
  CvStats accuracy, precision, recall, f1;
  std::vector<Metrics> folds;
};

// One-vs-rest training. Logistic regression uses full-batch gradient descent
// on L2-regularized cross-entropy; the linear SVM uses deterministic
// full-batch subgradient descent on the hinge loss; the kernel approximation
// maps inputs through a seeded random cosine expansion of the Gaussian
// kernel and trains the linear SVM on top. Deterministic given the seed.
ClassifierModel train(const std::vector<AggregatedSample>& samples,
                      ClassifierKind kind, const Hyperparams& hp,
                      std::uint64_t rng_seed);

Prediction predict(const ClassifierModel& model, const AggregatedSample& sample);

Metrics evaluate(const ClassifierModel& model,
                 const std::vector<AggregatedSample>& samples);

// Stratified k-fold cross validation with fold-local normalizers. Falls back
// to a plain round-robin split when some class has fewer samples than folds.
CvResult cross_validate(const std::vector<AggregatedSample>& samples,
                        ClassifierKind kind, const Hyperparams& hp, int folds,
                        std::uint64_t seed);

struct LearningCurvePoint {
  int train_size_per_class = 0;
  double accuracy = 0.0;
};

// Accuracy on a fixed held-out split as the per-class training pool grows.
std::vector<LearningCurvePoint> learning_curve(
    const std::vector<AggregatedSample>& samples, ClassifierKind kind,
    const Hyperparams& hp, std::vector<int> train_sizes, std::uint64_t seed);

// Self-describing text persistence. Loading validates the format version
// and the feature column-order hash.
void save_model(const ClassifierModel& model, const std::string& path);
ClassifierModel load_model(const std::string& path);

// The random cosine feature map used by RbfApprox, exposed for tests.
struct RandomFeatureMap {
  Eigen::MatrixXd projection;  // d x rff_dim
  Eigen::RowVectorXd phase;    // 1 x rff_dim
  Eigen::MatrixXd apply_rows(const Eigen::MatrixXd& x) const;
};

RandomFeatureMap make_random_feature_map(int input_dim, int rff_dim, double gamma,
                                         std::uint64_t seed);

}  // namespace footfall
