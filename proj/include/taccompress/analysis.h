#pragma once
// Downstream tasks on tactile images: fixed-length features, stratified
// splits, four classifiers, k-means, exact t-SNE and the adjusted Rand
// index.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "taccompress/image.h"

namespace taccompress {

inline constexpr std::size_t kDefaultFeatureHeight = 64;

// Row indices picked by nearest-neighbour resampling of `height` rows to
// `target`. Equals floor((i + 0.5) * height / target) except on exact
// ties between two source rows, which go to the lower row (so 128 -> 64
// keeps rows 0, 2, 4, ...).
std::vector<std::size_t> resample_rows(std::size_t height, std::size_t target);

// Resampled rows, flattened row-major and divided by 255. Length is
// width * target_height * 3. Throws DataError for target_height == 0.
std::vector<float> featurize(const TactileImage& image,
                             std::size_t target_height = kDefaultFeatureHeight);

// Dense row-major feature rows with integer labels indexing class_names.
struct FeatureMatrix {
  std::size_t dim = 0;
  std::vector<float> values;
  std::vector<int> labels;
  std::vector<std::string> class_names;
  std::vector<std::string> provenance;  // "raw" or "<codec>@<quality>"

  std::size_t rows() const { return labels.size(); }
  std::span<const float> row(std::size_t i) const {
    return std::span<const float>(values).subspan(i * dim, dim);
  }
  // Throws DataError on a dimension mismatch or an unknown label.
  void append(std::span<const float> features, int label,
              std::string source = "raw");
  // Rows at `indices`, same classes.
  FeatureMatrix subset(std::span<const std::size_t> indices) const;
};

struct Split {
  FeatureMatrix train;
  FeatureMatrix test;
};

// Per class, floor(fraction * n) rows (clamped to [1, n - 1]) go to train
// after a seeded shuffle; the rest go to test. Row order within each part
// follows the original order. Throws DataError unless 0 < fraction < 1 or
// when a present class has fewer than 2 rows.
Split stratified_split(const FeatureMatrix& features, double train_fraction,
                       std::uint64_t seed);

enum class ClassifierKind { kSvm, kRandomForest, kKnn, kSoftmax };

inline constexpr ClassifierKind kAllClassifiers[] = {
    ClassifierKind::kSvm, ClassifierKind::kRandomForest, ClassifierKind::kKnn,
    ClassifierKind::kSoftmax};

// "svm", "rf", "knn", "lr".
std::string classifier_name(ClassifierKind kind);
ClassifierKind parse_classifier(const std::string& name);

struct ClassifierParams {
  std::uint64_t seed = 0;
  std::size_t jobs = 0;

  int knn_k = 5;

  // Linear SVM: one-vs-rest hinge loss, stochastic subgradient steps of
  // size 1 / (lambda * t) over svm_epochs shuffled passes.
  double svm_lambda = 1e-3;
  int svm_epochs = 40;

  // Softmax regression: full-batch gradient descent with L2 penalty. The
  // step is 1 / L for the smoothness bound L of the objective.
  double softmax_l2 = 1e-3;
  int softmax_iterations = 300;

  // Random forest: gini splits, bootstrap rows, sqrt(dim) candidate
  // features per node. max_depth 0 grows until leaves are pure.
  int rf_trees = 100;
  int rf_max_depth = 0;
  int rf_min_samples_split = 2;
};

class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual ClassifierKind kind() const = 0;
  virtual std::size_t dim() const = 0;
  // Throws DataError when features.dim differs from dim().
  virtual std::vector<int> predict(const FeatureMatrix& features) const = 0;
};

// Throws DataError on an empty training set or invalid params.
std::unique_ptr<Classifier> train_classifier(ClassifierKind kind,
                                             const FeatureMatrix& train,
                                             const ClassifierParams& params = {});

// Fraction of equal entries. Throws DataError on length mismatch or empty
// input.
double accuracy(std::span<const int> predicted, std::span<const int> truth);

struct KMeansResult {
  std::vector<int> assignment;
  std::vector<double> centroids;  // k * dim, row-major
  double inertia = 0.0;
  int iterations = 0;
};

struct KMeansOptions {
  int max_iterations = 300;
  double tolerance = 1e-6;  // relative inertia change
  int restarts = 10;        // best inertia over independent seedings
};

// k-means++ seeding then Lloyd iterations on row-major `points`. Throws
// DataError when k is zero or exceeds the row count.
KMeansResult kmeans(std::span<const double> points, std::size_t dim,
                    std::size_t k, std::uint64_t seed,
                    const KMeansOptions& options = {});
KMeansResult kmeans(const FeatureMatrix& features, std::size_t k,
                    std::uint64_t seed, const KMeansOptions& options = {});

struct TsneOptions {
  double perplexity = 30.0;
  int iterations = 1000;
  double early_exaggeration = 12.0;
  int exaggeration_iterations = 250;
  // 0 picks max(rows / early_exaggeration / 4, 50).
  double learning_rate = 0.0;
};

// Exact t-SNE to two dimensions; returns rows * 2 coordinates. Throws
// DataError when perplexity >= rows / 3 or when some row cannot reach the
// requested perplexity (too many identical neighbours).
std::vector<double> tsne_2d(const FeatureMatrix& features, std::uint64_t seed,
                            const TsneOptions& options = {});
// Same, from a precomputed symmetric matrix of squared distances.
std::vector<double> tsne_2d_from_distances(std::span<const double> squared,
                                           std::size_t rows,
                                           std::uint64_t seed,
                                           const TsneOptions& options = {});

// Pairwise squared Euclidean distances, rows * rows.
std::vector<double> squared_distances(const FeatureMatrix& features);

double adjusted_rand_index(std::span<const int> a, std::span<const int> b);

}  // namespace taccompress
