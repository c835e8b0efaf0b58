#ifndef ZOQ_STATS_HPP
#define ZOQ_STATS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "zoq/core.hpp"

namespace zoq {

/// Running mean and variance (Welford).
class RunningStats {
 public:
  void add(double x) {
    ++n_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (x - mean_);
  }

  std::int64_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
  double stderr_of_mean() const { return n_ > 0 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0; }

 private:
  std::int64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

/// Entrywise Welford accumulator for matrix-valued samples.
class MatrixStats {
 public:
  MatrixStats(Index rows, Index cols) : mean_(MatrixXd::Zero(rows, cols)), m2_(MatrixXd::Zero(rows, cols)) {}

  template <typename Derived>
  void add(const Eigen::MatrixBase<Derived>& sample) {
    ++n_;
    const MatrixXd delta = sample - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_.array() += delta.array() * (sample - mean_).array();
  }

  std::int64_t count() const { return n_; }
  const MatrixXd& mean() const { return mean_; }
  MatrixXd stderr_of_mean() const {
    if (n_ < 2) return MatrixXd::Zero(mean_.rows(), mean_.cols());
    const double n = static_cast<double>(n_);
    return (m2_ / ((n - 1.0) * n)).cwiseSqrt();
  }

 private:
  std::int64_t n_ = 0;
  MatrixXd mean_;
  MatrixXd m2_;
};

/// Monte Carlo estimate of a matrix expectation with entrywise standard errors.
struct McMatrix {
  MatrixXd mean;
  MatrixXd se;
  std::int64_t n = 0;
};

inline McMatrix to_estimate(const MatrixStats& stats) {
  return {stats.mean(), stats.stderr_of_mean(), stats.count()};
}

/// One named pass/fail verdict: pass iff statistic <= threshold.
struct CheckResult {
  std::string name;
  double statistic = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

inline CheckResult make_check(std::string name, double statistic, double threshold) {
  return {std::move(name), statistic, threshold, statistic <= threshold};
}

/// Largest |estimate - expected| / se over entries; entries with zero
/// se must match to within abs_floor.
inline double max_standardized_deviation(const MatrixXd& estimate, const MatrixXd& se,
                                         const MatrixXd& expected, double abs_floor = 1e-300) {
  double worst = 0.0;
  for (Index j = 0; j < estimate.cols(); ++j) {
    for (Index i = 0; i < estimate.rows(); ++i) {
      const double diff = std::abs(estimate(i, j) - expected(i, j));
      const double scale = std::max(se(i, j), abs_floor);
      worst = std::max(worst, diff / scale);
    }
  }
  return worst;
}

}  // namespace zoq

#endif  // ZOQ_STATS_HPP
