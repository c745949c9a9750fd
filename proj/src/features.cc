#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "taccompress/analysis.h"
#include "taccompress/error.h"

namespace taccompress {

std::vector<std::size_t> resample_rows(std::size_t height, std::size_t target) {
  if (target == 0) throw DataError("target height must be positive");
  if (height == 0) throw DataError("cannot resample an empty image");
  std::vector<std::size_t> rows(target);
  // Source row whose centre is nearest to the centre of output row i,
  // ties going to the lower row: ceil((2i + 1) H / 2T) - 1.
  const std::size_t den = 2 * target;
  for (std::size_t i = 0; i < target; ++i) {
    rows[i] = ((2 * i + 1) * height + den - 1) / den - 1;
  }
  return rows;
}

std::vector<float> featurize(const TactileImage& image, std::size_t target_height) {
  const std::vector<std::size_t> rows = resample_rows(image.height(), target_height);
  const std::size_t stride = image.row_stride();
  std::vector<float> out(stride * target_height);
  float* dst = out.data();
  for (std::size_t r : rows) {
    for (std::uint8_t v : image.row(r)) *dst++ = static_cast<float>(v) / 255.0f;
  }
  return out;
}

void FeatureMatrix::append(std::span<const float> features, int label,
                           std::string source) {
  if (rows() == 0 && dim == 0) dim = features.size();
  if (features.size() != dim || dim == 0) {
    throw DataError("feature row has length " + std::to_string(features.size()) +
                    ", expected " + std::to_string(dim));
  }
  if (label < 0 || static_cast<std::size_t>(label) >= class_names.size()) {
    throw DataError("feature label " + std::to_string(label) + " has no class name");
  }
  values.insert(values.end(), features.begin(), features.end());
  labels.push_back(label);
  provenance.push_back(std::move(source));
}

FeatureMatrix FeatureMatrix::subset(std::span<const std::size_t> indices) const {
  FeatureMatrix out;
  out.dim = dim;
  out.class_names = class_names;
  out.values.reserve(indices.size() * dim);
  for (std::size_t i : indices) {
    if (i >= rows()) throw DataError("feature row index out of range");
    const auto r = row(i);
    out.values.insert(out.values.end(), r.begin(), r.end());
    out.labels.push_back(labels[i]);
    out.provenance.push_back(provenance[i]);
  }
  return out;
}

Split stratified_split(const FeatureMatrix& features, double train_fraction,
                       std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw DataError("train fraction must lie strictly between 0 and 1");
  }
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < features.rows(); ++i) {
    by_class[features.labels[i]].push_back(i);
  }
  std::mt19937_64 rng(seed);
  std::vector<char> to_train(features.rows(), 0);
  for (auto& [label, members] : by_class) {
    const std::size_t n = members.size();
    if (n < 2) {
      throw DataError("class " + features.class_names.at(static_cast<std::size_t>(label)) +
                      " has fewer than 2 rows");
    }
    std::size_t take = static_cast<std::size_t>(
        std::floor(train_fraction * static_cast<double>(n) + 1e-9));
    take = std::clamp<std::size_t>(take, 1, n - 1);
    // Fisher-Yates with our own draws so the split does not depend on the
    // standard library's shuffle.
    for (std::size_t i = n - 1; i > 0; --i) {
      const std::size_t j = static_cast<std::size_t>(rng() % (i + 1));
      std::swap(members[i], members[j]);
    }
    for (std::size_t i = 0; i < take; ++i) to_train[members[i]] = 1;
  }
  std::vector<std::size_t> train_rows, test_rows;
  for (std::size_t i = 0; i < features.rows(); ++i) {
    (to_train[i] ? train_rows : test_rows).push_back(i);
  }
  return {features.subset(train_rows), features.subset(test_rows)};
}

double accuracy(std::span<const int> predicted, std::span<const int> truth) {
  if (predicted.size() != truth.size()) throw DataError("accuracy: length mismatch");
  if (truth.empty()) throw DataError("accuracy: no rows");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += predicted[i] == truth[i];
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

double adjusted_rand_index(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) throw DataError("ARI: length mismatch");
  const std::size_t n = a.size();
  if (n < 2) return 1.0;
  std::map<std::pair<int, int>, double> table;
  std::map<int, double> rows, cols;
  for (std::size_t i = 0; i < n; ++i) {
    table[{a[i], b[i]}] += 1.0;
    rows[a[i]] += 1.0;
    cols[b[i]] += 1.0;
  }
  auto pairs = [](double m) { return m * (m - 1.0) / 2.0; };
  double index = 0.0, sum_rows = 0.0, sum_cols = 0.0;
  for (const auto& [key, m] : table) index += pairs(m);
  for (const auto& [key, m] : rows) sum_rows += pairs(m);
  for (const auto& [key, m] : cols) sum_cols += pairs(m);
  const double expected = sum_rows * sum_cols / pairs(static_cast<double>(n));
  const double max_index = 0.5 * (sum_rows + sum_cols);
  // Both partitions trivial (all-in-one or all-singletons alike).
  if (max_index == expected) return 1.0;
  return (index - expected) / (max_index - expected);
}

}  // namespace taccompress
