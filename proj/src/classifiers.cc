#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "internal/dense.h"
#include "taccompress/analysis.h"
#include "taccompress/error.h"
#include "taccompress/parallel.h"
#include "taccompress/simulator.h"

namespace taccompress {
namespace {

using detail::RowMatrixF;

void check_dim(const FeatureMatrix& f, std::size_t dim) {
  if (f.dim != dim && f.rows() > 0) {
    throw DataError("feature dimension " + std::to_string(f.dim) +
                    " does not match the trained dimension " + std::to_string(dim));
  }
}

int class_count(const FeatureMatrix& f) { return static_cast<int>(f.class_names.size()); }

std::vector<int> argmax_rows(const Eigen::MatrixXd& scores) {
  std::vector<int> out(static_cast<std::size_t>(scores.rows()));
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    Eigen::Index best = 0;
    scores.row(i).maxCoeff(&best);
    out[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return out;
}

// ---------------------------------------------------------------- KNN

class Knn final : public Classifier {
 public:
  Knn(const FeatureMatrix& train, int k)
      : k_(k), classes_(class_count(train)), labels_(train.labels) {
    mean_ = detail::column_mean(train);
    x_ = detail::centered(train, mean_);
    norms_ = x_.cast<double>().rowwise().squaredNorm();
  }

  ClassifierKind kind() const override { return ClassifierKind::kKnn; }
  std::size_t dim() const override { return static_cast<std::size_t>(mean_.size()); }

  std::vector<int> predict(const FeatureMatrix& f) const override {
    check_dim(f, dim());
    if (f.rows() == 0) return {};
    const RowMatrixF q = detail::centered(f, mean_);
    const Eigen::MatrixXd cross = (q * x_.transpose()).cast<double>();
    const Eigen::VectorXd qn = q.cast<double>().rowwise().squaredNorm();
    const std::size_t n = labels_.size();
    const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(k_), n);
    std::vector<int> out(f.rows());
    std::vector<std::pair<double, std::size_t>> d(n);
    for (std::size_t i = 0; i < f.rows(); ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const auto ii = static_cast<Eigen::Index>(i), jj = static_cast<Eigen::Index>(j);
        d[j] = {std::max(0.0, qn[ii] + norms_[jj] - 2.0 * cross(ii, jj)), j};
      }
      std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k), d.end());
      // Majority vote; a tie goes to the class seen first among the
      // nearest neighbours.
      std::vector<int> votes(static_cast<std::size_t>(classes_), 0);
      for (std::size_t r = 0; r < k; ++r) ++votes[static_cast<std::size_t>(labels_[d[r].second])];
      int best = labels_[d[0].second];
      for (std::size_t r = 0; r < k; ++r) {
        const int c = labels_[d[r].second];
        if (votes[static_cast<std::size_t>(c)] > votes[static_cast<std::size_t>(best)]) best = c;
      }
      out[i] = best;
    }
    return out;
  }

 private:
  int k_;
  int classes_;
  std::vector<int> labels_;
  Eigen::VectorXf mean_;
  RowMatrixF x_;
  Eigen::VectorXd norms_;
};

// ------------------------------------------------------- linear models

// Scores are (x - mean) . w_c + b_c with one weight row per class.
class LinearModel final : public Classifier {
 public:
  LinearModel(ClassifierKind kind, Eigen::VectorXf mean, Eigen::MatrixXf weights,
              Eigen::VectorXd bias)
      : kind_(kind), mean_(std::move(mean)), w_(std::move(weights)), b_(std::move(bias)) {}

  ClassifierKind kind() const override { return kind_; }
  std::size_t dim() const override { return static_cast<std::size_t>(mean_.size()); }

  std::vector<int> predict(const FeatureMatrix& f) const override {
    check_dim(f, dim());
    if (f.rows() == 0) return {};
    const RowMatrixF q = detail::centered(f, mean_);
    Eigen::MatrixXd scores = (q * w_.transpose()).cast<double>();
    scores.rowwise() += b_.transpose();
    return argmax_rows(scores);
  }

 private:
  ClassifierKind kind_;
  Eigen::VectorXf mean_;
  Eigen::MatrixXf w_;  // classes x dim
  Eigen::VectorXd b_;
};

// Both linear models keep w_c in the span of the centred training rows,
// w_c = sum_j beta(j, c) x_j, which is exactly where gradient steps from
// zero stay. Training then needs only the Gram matrix.
Eigen::MatrixXf expand_weights(const RowMatrixF& x, const Eigen::MatrixXd& beta) {
  return (beta.cast<float>().transpose() * x);
}

std::unique_ptr<Classifier> train_svm(const FeatureMatrix& train, const ClassifierParams& p) {
  if (!(p.svm_lambda > 0.0) || p.svm_epochs < 1) throw DataError("invalid SVM parameters");
  const Eigen::VectorXf mean = detail::column_mean(train);
  const RowMatrixF x = detail::centered(train, mean);
  // A constant unit feature carries the bias.
  const Eigen::MatrixXd kernel = detail::gram(x).array() + 1.0;
  const auto n = static_cast<std::size_t>(kernel.rows());
  const int classes = class_count(train);
  Eigen::MatrixXd beta = Eigen::MatrixXd::Zero(kernel.rows(), classes);
  const double steps = static_cast<double>(p.svm_epochs) * static_cast<double>(n);

  parallel_for(static_cast<std::size_t>(classes), p.jobs, [&](std::size_t c) {
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = train.labels[i] == static_cast<int>(c) ? 1.0 : -1.0;
    // Pegasos: w_t = (1 / (lambda (t-1))) sum_j alpha_j y_j x_j, and
    // s = K (alpha * y) tracks every margin at once.
    std::vector<double> alpha(n, 0.0), s(n, 0.0);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(mix_seed(p.seed, c));
    std::size_t t = 0;
    for (int epoch = 0; epoch < p.svm_epochs; ++epoch) {
      for (std::size_t i = n - 1; i > 0; --i) {
        std::swap(order[i], order[static_cast<std::size_t>(rng() % (i + 1))]);
      }
      for (std::size_t i : order) {
        ++t;
        const double margin =
            t == 1 ? 0.0 : y[i] * s[i] / (p.svm_lambda * static_cast<double>(t - 1));
        if (margin < 1.0) {
          alpha[i] += 1.0;
          const auto col = kernel.col(static_cast<Eigen::Index>(i));
          for (std::size_t j = 0; j < n; ++j) s[j] += y[i] * col[static_cast<Eigen::Index>(j)];
        }
      }
    }
    for (std::size_t j = 0; j < n; ++j) {
      beta(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(c)) =
          alpha[j] * y[j] / (p.svm_lambda * steps);
    }
  });
  Eigen::VectorXd bias = beta.colwise().sum().transpose();
  return std::make_unique<LinearModel>(ClassifierKind::kSvm, mean, expand_weights(x, beta),
                                       std::move(bias));
}

std::unique_ptr<Classifier> train_softmax(const FeatureMatrix& train,
                                          const ClassifierParams& p) {
  if (!(p.softmax_l2 >= 0.0) || p.softmax_iterations < 1) {
    throw DataError("invalid softmax parameters");
  }
  const Eigen::VectorXf mean = detail::column_mean(train);
  const RowMatrixF x = detail::centered(train, mean);
  const Eigen::MatrixXd g = detail::gram(x);
  const Eigen::Index n = g.rows();
  const int classes = class_count(train);
  const double inv_n = 1.0 / static_cast<double>(n);

  // The softmax Hessian is bounded by 1/2 of the data second moment,
  // bias column included.
  const Eigen::MatrixXd augmented = g.array() + 1.0;
  const double top = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(
                         augmented, Eigen::EigenvaluesOnly)
                         .eigenvalues()
                         .maxCoeff();
  const double step = 1.0 / (0.5 * top * inv_n + p.softmax_l2);

  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(n, classes);
  for (Eigen::Index i = 0; i < n; ++i) y(i, train.labels[static_cast<std::size_t>(i)]) = 1.0;
  Eigen::MatrixXd beta = Eigen::MatrixXd::Zero(n, classes);
  Eigen::RowVectorXd bias = Eigen::RowVectorXd::Zero(classes);
  for (int it = 0; it < p.softmax_iterations; ++it) {
    Eigen::MatrixXd z = g * beta;
    z.rowwise() += bias;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double m = z.row(i).maxCoeff();
      z.row(i) = (z.row(i).array() - m).exp();
      z.row(i) /= z.row(i).sum();
    }
    const Eigen::MatrixXd residual = (z - y) * inv_n;
    // dW = X^T residual + l2 W = X^T (residual + l2 beta).
    beta -= step * (residual + p.softmax_l2 * beta);
    bias -= step * residual.colwise().sum();
  }
  return std::make_unique<LinearModel>(ClassifierKind::kSoftmax, mean, expand_weights(x, beta),
                                       bias.transpose());
}

// ------------------------------------------------------- random forest

struct TreeNode {
  std::int32_t feature = -1;  // -1 marks a leaf
  float threshold = 0.0f;
  std::int32_t left = -1;
  std::int32_t right = -1;
  std::int32_t leaf = -1;  // offset into Tree::leaf_probs
};

struct Tree {
  std::vector<TreeNode> nodes;
  std::vector<float> leaf_probs;
};

struct ForestData {
  std::size_t rows = 0;
  std::size_t dim = 0;
  std::vector<float> columns;  // dim x rows, one contiguous column per feature
  std::vector<int> labels;
  int classes = 0;
};

class TreeBuilder {
 public:
  TreeBuilder(const ForestData& data, const ClassifierParams& p, std::uint64_t seed)
      : data_(data), params_(p), rng_(seed), perm_(data.dim) {
    std::iota(perm_.begin(), perm_.end(), 0u);
    max_features_ = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::sqrt(static_cast<double>(data.dim))));
    counts_.resize(static_cast<std::size_t>(data.classes));
    left_counts_.resize(counts_.size());
  }

  Tree build() {
    std::vector<std::uint32_t> sample(data_.rows);
    for (auto& s : sample) s = static_cast<std::uint32_t>(rng_() % data_.rows);
    Tree tree;
    tree.nodes.emplace_back();
    struct Pending {
      std::int32_t node;
      std::size_t begin, end;
      int depth;
    };
    std::vector<Pending> stack{{0, 0, sample.size(), 0}};
    while (!stack.empty()) {
      const Pending job = stack.back();
      stack.pop_back();
      const std::span<std::uint32_t> members(sample.data() + job.begin, job.end - job.begin);
      std::fill(counts_.begin(), counts_.end(), 0);
      for (auto s : members) ++counts_[static_cast<std::size_t>(data_.labels[s])];
      const bool pure =
          std::count_if(counts_.begin(), counts_.end(), [](std::size_t c) { return c > 0; }) <= 1;
      const bool too_deep = params_.rf_max_depth > 0 && job.depth >= params_.rf_max_depth;
      const bool too_small = members.size() < static_cast<std::size_t>(params_.rf_min_samples_split);
      Split best;
      if (!pure && !too_deep && !too_small) best = find_split(members);
      if (best.feature < 0) {
        make_leaf(tree, job.node, members.size());
        continue;
      }
      const float* col = data_.columns.data() + static_cast<std::size_t>(best.feature) * data_.rows;
      auto mid = std::partition(members.begin(), members.end(),
                                [&](std::uint32_t s) { return col[s] <= best.threshold; });
      const std::size_t split_at = job.begin + static_cast<std::size_t>(mid - members.begin());
      const auto left = static_cast<std::int32_t>(tree.nodes.size());
      tree.nodes.emplace_back();
      tree.nodes.emplace_back();
      TreeNode& node = tree.nodes[static_cast<std::size_t>(job.node)];
      node.feature = best.feature;
      node.threshold = best.threshold;
      node.left = left;
      node.right = left + 1;
      stack.push_back({left + 1, split_at, job.end, job.depth + 1});
      stack.push_back({left, job.begin, split_at, job.depth + 1});
    }
    return tree;
  }

 private:
  struct Split {
    std::int32_t feature = -1;
    float threshold = 0.0f;
    double impurity = std::numeric_limits<double>::infinity();
  };

  void make_leaf(Tree& tree, std::int32_t node, std::size_t total) {
    TreeNode& leaf = tree.nodes[static_cast<std::size_t>(node)];
    leaf.leaf = static_cast<std::int32_t>(tree.leaf_probs.size());
    for (std::size_t c : counts_) {
      tree.leaf_probs.push_back(static_cast<float>(c) / static_cast<float>(total));
    }
  }

  // Candidate features are drawn without replacement; constant ones do
  // not count toward max_features, so the search continues until enough
  // informative features were seen or all were tried.
  Split find_split(std::span<const std::uint32_t> members) {
    Split best;
    const std::size_t m = members.size();
    values_.resize(m);
    std::size_t informative = 0;
    for (std::size_t k = 0; k < data_.dim && informative < max_features_; ++k) {
      const std::size_t pick = k + static_cast<std::size_t>(rng_() % (data_.dim - k));
      std::swap(perm_[k], perm_[pick]);
      const std::uint32_t f = perm_[k];
      const float* col = data_.columns.data() + static_cast<std::size_t>(f) * data_.rows;
      float lo = col[members[0]], hi = lo;
      for (std::size_t i = 0; i < m; ++i) {
        const float v = col[members[i]];
        values_[i] = {v, data_.labels[members[i]]};
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      if (!(hi > lo)) continue;
      ++informative;
      std::sort(values_.begin(), values_.end());
      std::fill(left_counts_.begin(), left_counts_.end(), 0);
      for (std::size_t i = 0; i + 1 < m; ++i) {
        ++left_counts_[static_cast<std::size_t>(values_[i].second)];
        if (!(values_[i + 1].first > values_[i].first)) continue;
        const double nl = static_cast<double>(i + 1), nr = static_cast<double>(m - i - 1);
        double sl = 0.0, sr = 0.0;
        for (std::size_t c = 0; c < counts_.size(); ++c) {
          const double l = static_cast<double>(left_counts_[c]);
          const double r = static_cast<double>(counts_[c]) - l;
          sl += l * l;
          sr += r * r;
        }
        // Weighted gini: nl (1 - sl/nl^2) + nr (1 - sr/nr^2), up to a constant.
        const double impurity = -(sl / nl + sr / nr);
        if (impurity < best.impurity) {
          best.impurity = impurity;
          best.feature = static_cast<std::int32_t>(f);
          best.threshold = values_[i].first + (values_[i + 1].first - values_[i].first) * 0.5f;
          // Midpoints can round onto the upper value in float.
          if (!(best.threshold < values_[i + 1].first)) best.threshold = values_[i].first;
        }
      }
    }
    return best;
  }

  const ForestData& data_;
  const ClassifierParams& params_;
  std::mt19937_64 rng_;
  std::vector<std::uint32_t> perm_;
  std::size_t max_features_ = 1;
  std::vector<std::size_t> counts_, left_counts_;
  std::vector<std::pair<float, int>> values_;
};

class RandomForest final : public Classifier {
 public:
  RandomForest(std::vector<Tree> trees, std::size_t dim, int classes)
      : trees_(std::move(trees)), dim_(dim), classes_(classes) {}

  ClassifierKind kind() const override { return ClassifierKind::kRandomForest; }
  std::size_t dim() const override { return dim_; }

  std::vector<int> predict(const FeatureMatrix& f) const override {
    check_dim(f, dim_);
    std::vector<int> out(f.rows());
    std::vector<double> votes(static_cast<std::size_t>(classes_));
    for (std::size_t i = 0; i < f.rows(); ++i) {
      const auto x = f.row(i);
      std::fill(votes.begin(), votes.end(), 0.0);
      for (const Tree& t : trees_) {
        const TreeNode* node = &t.nodes[0];
        while (node->feature >= 0) {
          node = &t.nodes[static_cast<std::size_t>(
              x[static_cast<std::size_t>(node->feature)] <= node->threshold ? node->left
                                                                             : node->right)];
        }
        for (std::size_t c = 0; c < votes.size(); ++c) {
          votes[c] += t.leaf_probs[static_cast<std::size_t>(node->leaf) + c];
        }
      }
      out[i] = static_cast<int>(std::max_element(votes.begin(), votes.end()) - votes.begin());
    }
    return out;
  }

 private:
  std::vector<Tree> trees_;
  std::size_t dim_;
  int classes_;
};

std::unique_ptr<Classifier> train_forest(const FeatureMatrix& train, const ClassifierParams& p) {
  if (p.rf_trees < 1 || p.rf_min_samples_split < 2 || p.rf_max_depth < 0) {
    throw DataError("invalid random forest parameters");
  }
  ForestData data;
  data.rows = train.rows();
  data.dim = train.dim;
  data.labels = train.labels;
  data.classes = class_count(train);
  data.columns.resize(data.rows * data.dim);
  for (std::size_t i = 0; i < data.rows; ++i) {
    const auto r = train.row(i);
    for (std::size_t j = 0; j < data.dim; ++j) data.columns[j * data.rows + i] = r[j];
  }
  std::vector<Tree> trees(static_cast<std::size_t>(p.rf_trees));
  parallel_for(trees.size(), p.jobs, [&](std::size_t t) {
    trees[t] = TreeBuilder(data, p, mix_seed(p.seed, t)).build();
  });
  return std::make_unique<RandomForest>(std::move(trees), data.dim, data.classes);
}

}  // namespace

std::string classifier_name(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::kSvm: return "svm";
    case ClassifierKind::kRandomForest: return "rf";
    case ClassifierKind::kKnn: return "knn";
    case ClassifierKind::kSoftmax: return "lr";
  }
  return "?";
}

ClassifierKind parse_classifier(const std::string& name) {
  for (ClassifierKind k : kAllClassifiers) {
    if (classifier_name(k) == name) return k;
  }
  throw DataError("unknown classifier: " + name);
}

std::unique_ptr<Classifier> train_classifier(ClassifierKind kind, const FeatureMatrix& train,
                                             const ClassifierParams& params) {
  if (train.rows() == 0 || train.dim == 0) throw DataError("empty training set");
  if (train.class_names.empty()) throw DataError("training set has no class names");
  switch (kind) {
    case ClassifierKind::kKnn:
      if (params.knn_k < 1) throw DataError("KNN needs k >= 1");
      return std::make_unique<Knn>(train, params.knn_k);
    case ClassifierKind::kSvm: return train_svm(train, params);
    case ClassifierKind::kSoftmax: return train_softmax(train, params);
    case ClassifierKind::kRandomForest: return train_forest(train, params);
  }
  throw DataError("unknown classifier kind");
}

}  // namespace taccompress
