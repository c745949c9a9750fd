#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

#include "taccompress/error.h"
#include "taccompress/metrics.h"

namespace taccompress {
namespace {

struct CubicFit {
  double coeff[4];  // c0 + c1 x + c2 x^2 + c3 x^3

  double integral(double lo, double hi) const {
    auto antiderivative = [&](double x) {
      return coeff[0] * x + coeff[1] * x * x / 2.0 + coeff[2] * x * x * x / 3.0 +
             coeff[3] * x * x * x * x / 4.0;
    };
    return antiderivative(hi) - antiderivative(lo);
  }
};

struct Prepared {
  std::vector<double> quality;
  std::vector<double> log_rate;
};

Prepared prepare(const RDCurve& curve, QualityMetric metric) {
  RDCurve sorted = curve;
  sorted.points.erase(
      std::remove_if(sorted.points.begin(), sorted.points.end(),
                     [&](const RDPoint& p) { return !std::isfinite(p.quality(metric)); }),
      sorted.points.end());
  if (sorted.points.size() < 4) {
    throw DataError("BD-rate needs at least 4 finite points on curve " + curve.codec_id);
  }
  sorted.normalize();
  Prepared out;
  for (std::size_t i = 0; i < sorted.points.size(); ++i) {
    const RDPoint& p = sorted.points[i];
    if (i > 0 && !(p.quality(metric) > out.quality.back())) {
      throw DataError("curve " + curve.codec_id +
                      " is not monotone: quality must rise with rate");
    }
    out.quality.push_back(p.quality(metric));
    out.log_rate.push_back(std::log10(p.bpss));
  }
  return out;
}

CubicFit fit(const Prepared& p) {
  const auto n = static_cast<Eigen::Index>(p.quality.size());
  Eigen::MatrixXd a(n, 4);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = p.quality[static_cast<std::size_t>(i)];
    a(i, 0) = 1.0;
    a(i, 1) = x;
    a(i, 2) = x * x;
    a(i, 3) = x * x * x;
    y(i) = p.log_rate[static_cast<std::size_t>(i)];
  }
  const Eigen::VectorXd c = a.colPivHouseholderQr().solve(y);
  return {{c(0), c(1), c(2), c(3)}};
}

}  // namespace

double bd_rate(const RDCurve& reference, const RDCurve& test, QualityMetric metric) {
  const Prepared ref = prepare(reference, metric);
  const Prepared tst = prepare(test, metric);
  const double lo = std::max(ref.quality.front(), tst.quality.front());
  const double hi = std::min(ref.quality.back(), tst.quality.back());
  if (!(hi > lo)) throw DataError("BD-rate curves share no quality range");
  const CubicFit f_ref = fit(ref);
  const CubicFit f_tst = fit(tst);
  const double mean_diff = (f_tst.integral(lo, hi) - f_ref.integral(lo, hi)) / (hi - lo);
  return (std::pow(10.0, mean_diff) - 1.0) * 100.0;
}

}  // namespace taccompress
