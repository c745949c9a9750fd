#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "taccompress/analysis.h"
#include "taccompress/error.h"

using namespace taccompress;

namespace {

// `classes` Gaussian blobs of `per_class` rows in `dim` dimensions,
// centres `separation` apart along distinct axes.
FeatureMatrix blobs(std::size_t classes, std::size_t per_class, std::size_t dim, double separation,
                    double noise, std::uint64_t seed) {
  FeatureMatrix m;
  m.dim = dim;
  for (std::size_t c = 0; c < classes; ++c) m.class_names.push_back("c" + std::to_string(c));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, noise);
  std::vector<float> row(dim);
  for (std::size_t i = 0; i < per_class; ++i) {
    for (std::size_t c = 0; c < classes; ++c) {
      for (std::size_t d = 0; d < dim; ++d) {
        row[d] = static_cast<float>((d == c % dim ? separation * (1 + c / dim) : 0.0) + gauss(rng));
      }
      m.append(row, static_cast<int>(c));
    }
  }
  return m;
}

// Pair-counting definition over all n(n-1)/2 pairs.
double brute_force_ari(const std::vector<int>& a, const std::vector<int>& b) {
  double n11 = 0, n10 = 0, n01 = 0, n00 = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      const bool sa = a[i] == a[j], sb = b[i] == b[j];
      if (sa && sb) ++n11;
      else if (sa) ++n10;
      else if (sb) ++n01;
      else ++n00;
    }
  }
  const double den = (n00 + n01) * (n01 + n11) + (n00 + n10) * (n10 + n11);
  if (den == 0.0) return 1.0;
  return 2.0 * (n00 * n11 - n01 * n10) / den;
}

std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) { return v[x] < v[y]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = (i + j) / 2.0;
    i = j + 1;
  }
  return r;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  const auto rx = ranks(x), ry = ranks(y);
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / rx.size();
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / ry.size();
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace

TEST_CASE("resampling rows") {
  const auto same = resample_rows(37, 37);
  for (std::size_t i = 0; i < 37; ++i) CHECK(same[i] == i);
  const auto halved = resample_rows(128, 64);
  for (std::size_t i = 0; i < 64; ++i) CHECK(halved[i] == 2 * i);
  const auto up = resample_rows(3, 6);
  CHECK(up == std::vector<std::size_t>{0, 0, 1, 1, 2, 2});
  for (std::size_t h : {1, 5, 100, 2900}) {
    for (std::size_t t : {1, 7, 64}) {
      const auto rows = resample_rows(h, t);
      REQUIRE(rows.size() == t);
      REQUIRE(std::is_sorted(rows.begin(), rows.end()));
      REQUIRE(rows.back() < h);
      for (std::size_t i = 0; i < t; ++i) {
        // Within half a source row of the target row centre.
        const double centre = (i + 0.5) * double(h) / double(t);
        REQUIRE(std::abs(rows[i] + 0.5 - centre) <= 0.5 + 1e-9);
      }
    }
  }
}

TEST_CASE("featurize scales into [0, 1]") {
  const TactileImage white(4, 8, std::vector<std::uint8_t>(4 * 8 * 3, 255));
  const auto ones = featurize(white, 8);
  CHECK(ones.size() == 4 * 8 * 3);
  for (float v : ones) CHECK(v == 1.0f);

  std::vector<std::uint8_t> ramp(5 * 10 * 3);
  std::iota(ramp.begin(), ramp.end(), 0);
  const auto f = featurize(TactileImage(5, 10, ramp), 4);
  CHECK(f.size() == 5 * 4 * 3);
  CHECK(*std::max_element(f.begin(), f.end()) <= 1.0f);
  CHECK(*std::min_element(f.begin(), f.end()) >= 0.0f);
  CHECK_THROWS_AS(featurize(white, 0), DataError);
}

TEST_CASE("stratified split sizes") {
  const FeatureMatrix m = blobs(3, 10, 4, 5.0, 0.1, 1);
  const Split s = stratified_split(m, 0.7, 3);
  CHECK(s.train.rows() == 21);
  CHECK(s.test.rows() == 9);
  for (int c = 0; c < 3; ++c) {
    CHECK(std::count(s.train.labels.begin(), s.train.labels.end(), c) == 7);
    CHECK(std::count(s.test.labels.begin(), s.test.labels.end(), c) == 3);
  }
  const Split nearly_all = stratified_split(m, 0.999, 3);
  CHECK(nearly_all.train.rows() == 27);
  CHECK(nearly_all.test.rows() == 3);

  const Split again = stratified_split(m, 0.7, 3);
  CHECK(again.train.values == s.train.values);
  CHECK(again.test.labels == s.test.labels);
  const Split other = stratified_split(m, 0.7, 4);
  CHECK(other.train.values != s.train.values);

  CHECK_THROWS_AS(stratified_split(m, 0.0, 1), DataError);
  CHECK_THROWS_AS(stratified_split(m, 1.0, 1), DataError);
}

TEST_CASE("every classifier separates two distant classes") {
  const FeatureMatrix m = blobs(2, 20, 6, 10.0, 0.5, 2);
  const Split s = stratified_split(m, 0.5, 1);
  for (ClassifierKind k : kAllClassifiers) {
    CAPTURE(classifier_name(k));
    const auto model = train_classifier(k, s.train, {});
    CHECK(model->kind() == k);
    CHECK(accuracy(model->predict(s.test), s.test.labels) == 1.0);
  }
}

TEST_CASE("every classifier handles eight blobs") {
  const FeatureMatrix m = blobs(8, 12, 16, 4.0, 0.8, 3);
  const Split s = stratified_split(m, 0.7, 5);
  for (ClassifierKind k : kAllClassifiers) {
    CAPTURE(classifier_name(k));
    ClassifierParams p;
    p.seed = 4;
    const auto model = train_classifier(k, s.train, p);
    CHECK(accuracy(model->predict(s.test), s.test.labels) >= 0.95);
  }
}

TEST_CASE("classifiers are reproducible") {
  const FeatureMatrix m = blobs(4, 15, 8, 1.5, 1.0, 4);
  const Split s = stratified_split(m, 0.6, 2);
  for (ClassifierKind k : kAllClassifiers) {
    ClassifierParams p;
    p.seed = 9;
    p.jobs = 3;
    const auto a = train_classifier(k, s.train, p)->predict(s.test);
    p.jobs = 1;
    const auto b = train_classifier(k, s.train, p)->predict(s.test);
    CHECK(a == b);
  }
}

TEST_CASE("1-NN recalls training labels") {
  const FeatureMatrix m = blobs(5, 6, 5, 1.0, 1.0, 6);
  ClassifierParams p;
  p.knn_k = 1;
  const auto model = train_classifier(ClassifierKind::kKnn, m, p);
  CHECK(model->predict(m) == m.labels);
}

TEST_CASE("classifier argument checks") {
  const FeatureMatrix m = blobs(2, 5, 3, 5.0, 0.1, 7);
  const auto model = train_classifier(ClassifierKind::kKnn, m, {});
  const FeatureMatrix wrong = blobs(2, 5, 4, 5.0, 0.1, 7);
  CHECK_THROWS_AS(model->predict(wrong), DataError);
  CHECK_THROWS_AS(train_classifier(ClassifierKind::kSvm, FeatureMatrix{}, {}), DataError);
  CHECK(parse_classifier("rf") == ClassifierKind::kRandomForest);
  CHECK(classifier_name(ClassifierKind::kSoftmax) == "lr");
  CHECK_THROWS_AS(parse_classifier("mlp"), DataError);
  const std::vector<int> x = {1, 2, 3, 4}, y = {1, 2, 0, 4};
  CHECK(accuracy(x, y) == 0.75);
  CHECK_THROWS_AS(accuracy(x, std::vector<int>{1}), DataError);
}

TEST_CASE("k-means with k=1 reports the total variance") {
  const FeatureMatrix m = blobs(3, 7, 4, 3.0, 1.0, 8);
  const KMeansResult r = kmeans(m, 1, 1);
  std::vector<double> mean(m.dim, 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t d = 0; d < m.dim; ++d) mean[d] += m.row(i)[d] / double(m.rows());
  double total = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t d = 0; d < m.dim; ++d) total += std::pow(m.row(i)[d] - mean[d], 2);
  CHECK(r.inertia == doctest::Approx(total).epsilon(1e-9));
  for (int a : r.assignment) CHECK(a == 0);
  CHECK_THROWS_AS(kmeans(m, 0, 1), DataError);
  CHECK_THROWS_AS(kmeans(m, m.rows() + 1, 1), DataError);
}

TEST_CASE("k-means recovers eight separated blobs") {
  const FeatureMatrix m = blobs(8, 20, 8, 12.0, 1.0, 9);
  const KMeansResult r = kmeans(m, 8, 3);
  const double ari = adjusted_rand_index(r.assignment, m.labels);
  CHECK(ari == doctest::Approx(brute_force_ari(r.assignment, m.labels)).epsilon(1e-12));
  CHECK(ari >= 0.95);
}

TEST_CASE("ARI matches the pair-counting definition") {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + rng() % 40;
    std::vector<int> a(n), b(n);
    for (auto& x : a) x = static_cast<int>(rng() % (1 + trial % 6));
    for (auto& x : b) x = static_cast<int>(rng() % (1 + trial % 4));
    REQUIRE(adjusted_rand_index(a, b) == doctest::Approx(brute_force_ari(a, b)).epsilon(1e-12));
  }
  const std::vector<int> x = {0, 0, 1, 1, 2, 2};
  const std::vector<int> relabelled = {5, 5, 3, 3, 9, 9};
  CHECK(adjusted_rand_index(x, relabelled) == doctest::Approx(1.0));
}

TEST_CASE("t-SNE keeps the distance ranking of blob data") {
  const FeatureMatrix m = blobs(4, 15, 10, 6.0, 1.0, 11);
  TsneOptions o;
  o.perplexity = 10;
  const auto y = tsne_2d(m, 5, o);
  REQUIRE(y.size() == 2 * m.rows());
  const auto d = squared_distances(m);
  std::vector<double> input, output;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = i + 1; j < m.rows(); ++j) {
      input.push_back(d[i * m.rows() + j]);
      output.push_back(std::pow(y[2 * i] - y[2 * j], 2) + std::pow(y[2 * i + 1] - y[2 * j + 1], 2));
    }
  }
  CHECK(spearman(input, output) >= 0.5);
  const auto km = kmeans(y, 2, 4, 1);
  CHECK(adjusted_rand_index(km.assignment, m.labels) >= 0.95);
}

TEST_CASE("t-SNE places duplicated points together") {
  const FeatureMatrix base = blobs(3, 8, 6, 5.0, 1.0, 12);
  std::vector<std::size_t> twice(2 * base.rows());
  for (std::size_t i = 0; i < twice.size(); ++i) twice[i] = i % base.rows();
  const FeatureMatrix m = base.subset(twice);
  TsneOptions o;
  o.perplexity = 8;
  const auto y = tsne_2d(m, 3, o);
  const std::size_t n = base.rows();
  std::vector<double> pair_gap, all;
  for (std::size_t i = 0; i < n; ++i) {
    pair_gap.push_back(std::hypot(y[2 * i] - y[2 * (i + n)], y[2 * i + 1] - y[2 * (i + n) + 1]));
    for (std::size_t j = 0; j < 2 * n; ++j) {
      all.push_back(std::hypot(y[2 * i] - y[2 * j], y[2 * i + 1] - y[2 * j + 1]));
    }
  }
  std::sort(all.begin(), all.end());
  const double median = all[all.size() / 2];
  for (double g : pair_gap) CHECK(g < 0.25 * median);
}

TEST_CASE("t-SNE argument checks") {
  const FeatureMatrix m = blobs(2, 5, 3, 5.0, 0.1, 13);
  TsneOptions o;
  o.perplexity = 30;
  CHECK_THROWS_AS(tsne_2d(m, 1, o), DataError);
  // All rows identical: no bandwidth reaches the target entropy.
  FeatureMatrix flat;
  flat.dim = 2;
  flat.class_names = {"a"};
  for (int i = 0; i < 40; ++i) flat.append(std::vector<float>{1.0f, 1.0f}, 0);
  o.perplexity = 5;
  CHECK_THROWS_AS(tsne_2d(flat, 1, o), DataError);
}
