#pragma once

#include <Eigen/Dense>

#include "taccompress/analysis.h"

namespace taccompress::detail {

using RowMatrixF = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline Eigen::Map<const RowMatrixF> as_matrix(const FeatureMatrix& f) {
  return {f.values.data(), static_cast<Eigen::Index>(f.rows()),
          static_cast<Eigen::Index>(f.dim)};
}

inline Eigen::VectorXf column_mean(const FeatureMatrix& f) {
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(f.dim));
  for (std::size_t i = 0; i < f.rows(); ++i) {
    const auto r = f.row(i);
    for (std::size_t j = 0; j < f.dim; ++j) sum[static_cast<Eigen::Index>(j)] += r[j];
  }
  return (sum / static_cast<double>(f.rows())).cast<float>();
}

// Rows minus `mean`; removing the common offset keeps the float Gram
// products well conditioned.
inline RowMatrixF centered(const FeatureMatrix& f, const Eigen::VectorXf& mean) {
  RowMatrixF out = as_matrix(f);
  out.rowwise() -= mean.transpose();
  return out;
}

// X X^T accumulated by Eigen's blocked product, returned in double.
inline Eigen::MatrixXd gram(const RowMatrixF& x) {
  Eigen::MatrixXf g = Eigen::MatrixXf::Zero(x.rows(), x.rows());
  g.selfadjointView<Eigen::Lower>().rankUpdate(x);
  Eigen::MatrixXf full = g.selfadjointView<Eigen::Lower>();
  return full.cast<double>();
}

}  // namespace taccompress::detail
