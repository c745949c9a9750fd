#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "internal/dense.h"
#include "taccompress/analysis.h"
#include "taccompress/error.h"
#include "taccompress/simulator.h"

namespace taccompress {
namespace {

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double sq_dist(const double* a, const double* b, std::size_t dim) {
  double s = 0.0;
  for (std::size_t j = 0; j < dim; ++j) {
    const double d = a[j] - b[j];
    s += d * d;
  }
  return s;
}

KMeansResult kmeans_once(std::span<const double> points, std::size_t n, std::size_t dim,
                         std::size_t k, std::uint64_t seed, const KMeansOptions& opt) {
  std::mt19937_64 rng(seed);
  KMeansResult r;
  r.centroids.assign(k * dim, 0.0);
  // k-means++: first centre uniform, then proportional to D^2.
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  std::size_t pick = static_cast<std::size_t>(rng() % n);
  for (std::size_t c = 0; c < k; ++c) {
    std::copy_n(points.data() + pick * dim, dim, r.centroids.data() + c * dim);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      nearest[i] = std::min(nearest[i], sq_dist(points.data() + i * dim,
                                                r.centroids.data() + c * dim, dim));
      total += nearest[i];
    }
    if (c + 1 == k) break;
    if (total > 0.0) {
      double target = uniform01(rng) * total;
      pick = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        target -= nearest[i];
        if (target < 0.0) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<std::size_t>(rng() % n);
    }
  }

  r.assignment.assign(n, 0);
  double previous = std::numeric_limits<double>::infinity();
  std::vector<double> sums(k * dim);
  std::vector<std::size_t> sizes(k);
  for (int it = 1; it <= opt.max_iterations; ++it) {
    r.iterations = it;
    double inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      int arg = 0;
      for (std::size_t c = 0; c < k; ++c) {
        const double d = sq_dist(points.data() + i * dim, r.centroids.data() + c * dim, dim);
        if (d < best) {
          best = d;
          arg = static_cast<int>(c);
        }
      }
      r.assignment[i] = arg;
      inertia += best;
    }
    r.inertia = inertia;
    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(sizes.begin(), sizes.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto c = static_cast<std::size_t>(r.assignment[i]);
      ++sizes[c];
      for (std::size_t j = 0; j < dim; ++j) sums[c * dim + j] += points[i * dim + j];
    }
    // Empty clusters keep their previous centre.
    for (std::size_t c = 0; c < k; ++c) {
      if (sizes[c] == 0) continue;
      for (std::size_t j = 0; j < dim; ++j) {
        r.centroids[c * dim + j] = sums[c * dim + j] / static_cast<double>(sizes[c]);
      }
    }
    const bool converged = std::isfinite(previous) &&
                           (previous - inertia) <= opt.tolerance * std::max(previous, 1e-300);
    previous = inertia;
    if (converged) break;
  }
  // Final assignment and inertia against the last centres.
  r.inertia = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < k; ++c) {
      const double d = sq_dist(points.data() + i * dim, r.centroids.data() + c * dim, dim);
      if (d < best) {
        best = d;
        r.assignment[i] = static_cast<int>(c);
      }
    }
    r.inertia += best;
  }
  return r;
}

}  // namespace

KMeansResult kmeans(std::span<const double> points, std::size_t dim, std::size_t k,
                    std::uint64_t seed, const KMeansOptions& options) {
  if (dim == 0 || points.size() % dim != 0) throw DataError("k-means: bad point layout");
  const std::size_t n = points.size() / dim;
  if (k == 0 || k > n) throw DataError("k-means: k must lie in [1, rows]");
  if (options.max_iterations < 1 || options.restarts < 1) {
    throw DataError("k-means: iterations and restarts must be positive");
  }
  KMeansResult best;
  for (int r = 0; r < options.restarts; ++r) {
    KMeansResult run =
        kmeans_once(points, n, dim, k, mix_seed(seed, static_cast<std::uint64_t>(r)), options);
    if (r == 0 || run.inertia < best.inertia) best = std::move(run);
  }
  return best;
}

KMeansResult kmeans(const FeatureMatrix& features, std::size_t k, std::uint64_t seed,
                    const KMeansOptions& options) {
  std::vector<double> points(features.values.begin(), features.values.end());
  if (features.rows() == 0) throw DataError("k-means: no rows");
  return kmeans(points, features.dim, k, seed, options);
}

std::vector<double> squared_distances(const FeatureMatrix& features) {
  const std::size_t n = features.rows();
  if (n == 0) return {};
  const detail::RowMatrixF x = detail::centered(features, detail::column_mean(features));
  const Eigen::MatrixXd g = detail::gram(x);
  std::vector<double> d(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      const auto ii = static_cast<Eigen::Index>(i), jj = static_cast<Eigen::Index>(j);
      const double v = std::max(0.0, g(ii, ii) + g(jj, jj) - 2.0 * g(ii, jj));
      d[i * n + j] = v;
      d[j * n + i] = v;
    }
  }
  return d;
}

namespace {

// Row-conditional affinities p(j|i) at the requested perplexity, by
// bisection on the Gaussian precision.
std::vector<double> conditional_affinities(std::span<const double> sq, std::size_t n,
                                           double perplexity) {
  const double target = std::log(perplexity);
  std::vector<double> p(n * n, 0.0);
  std::vector<double> row(n);
  for (std::size_t i = 0; i < n; ++i) {
    double dmin = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) dmin = std::min(dmin, sq[i * n + j]);
    }
    double beta = 1.0, lo = 0.0, hi = std::numeric_limits<double>::infinity();
    double entropy = 0.0;
    bool reached = false;
    for (int step = 0; step < 200; ++step) {
      double sum = 0.0, weighted = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) {
          row[j] = 0.0;
          continue;
        }
        const double shifted = sq[i * n + j] - dmin;
        row[j] = std::exp(-beta * shifted);
        sum += row[j];
        weighted += shifted * row[j];
      }
      entropy = std::log(sum) + beta * weighted / sum;
      if (std::abs(entropy - target) < 1e-5) {
        reached = true;
        break;
      }
      if (entropy > target) {
        lo = beta;
        beta = std::isinf(hi) ? beta * 2.0 : 0.5 * (beta + hi);
      } else {
        hi = beta;
        beta = 0.5 * (beta + lo);
      }
    }
    if (!reached) {
      throw DataError("t-SNE perplexity " + std::to_string(perplexity) +
                      " unattainable for row " + std::to_string(i));
    }
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) sum += row[j];
    for (std::size_t j = 0; j < n; ++j) p[i * n + j] = row[j] / sum;
  }
  return p;
}

}  // namespace

std::vector<double> tsne_2d_from_distances(std::span<const double> sq, std::size_t n,
                                           std::uint64_t seed, const TsneOptions& opt) {
  if (sq.size() != n * n) throw DataError("t-SNE: distance matrix has the wrong size");
  if (!(opt.perplexity > 0.0) || !(opt.perplexity < static_cast<double>(n) / 3.0)) {
    throw DataError("t-SNE: perplexity must be positive and below rows / 3");
  }
  if (opt.iterations < 1 || opt.exaggeration_iterations < 0) {
    throw DataError("t-SNE: bad iteration counts");
  }
  const double learning_rate =
      opt.learning_rate > 0.0
          ? opt.learning_rate
          : std::max(static_cast<double>(n) / std::max(opt.early_exaggeration, 1.0) / 4.0, 50.0);
  std::vector<double> p = conditional_affinities(sq, n, opt.perplexity);
  const double norm = 1.0 / (2.0 * static_cast<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      const double v = std::max((p[i * n + j] + p[j * n + i]) * norm, 1e-12);
      p[i * n + j] = v;
      p[j * n + i] = v;
    }
    p[i * n + i] = 0.0;
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> init(0.0, 1e-4);
  std::vector<double> y(2 * n), velocity(2 * n, 0.0), gains(2 * n, 1.0), grad(2 * n);
  for (double& v : y) v = init(rng);
  std::vector<double> num(n * n);

  for (int it = 0; it < opt.iterations; ++it) {
    const double exaggeration = it < opt.exaggeration_iterations ? opt.early_exaggeration : 1.0;
    const double momentum = it < opt.exaggeration_iterations ? 0.5 : 0.8;
    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      num[i * n + i] = 0.0;
      for (std::size_t j = 0; j < i; ++j) {
        const double dx = y[2 * i] - y[2 * j], dy = y[2 * i + 1] - y[2 * j + 1];
        const double q = 1.0 / (1.0 + dx * dx + dy * dy);
        num[i * n + j] = q;
        num[j * n + i] = q;
        z += 2.0 * q;
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      double gx = 0.0, gy = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double q = num[i * n + j];
        const double m = (exaggeration * p[i * n + j] - q / z) * q;
        gx += m * (y[2 * i] - y[2 * j]);
        gy += m * (y[2 * i + 1] - y[2 * j + 1]);
      }
      grad[2 * i] = 4.0 * gx;
      grad[2 * i + 1] = 4.0 * gy;
    }
    for (std::size_t d = 0; d < 2 * n; ++d) {
      const bool same_sign = (grad[d] > 0.0) == (velocity[d] > 0.0);
      gains[d] = same_sign ? std::max(gains[d] * 0.8, 0.01) : gains[d] + 0.2;
      velocity[d] = momentum * velocity[d] - learning_rate * gains[d] * grad[d];
      y[d] += velocity[d];
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      mx += y[2 * i];
      my += y[2 * i + 1];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[2 * i] -= mx;
      y[2 * i + 1] -= my;
    }
  }
  return y;
}

std::vector<double> tsne_2d(const FeatureMatrix& features, std::uint64_t seed,
                            const TsneOptions& options) {
  return tsne_2d_from_distances(squared_distances(features), features.rows(), seed, options);
}

}  // namespace taccompress
