#include "zoq/design.hpp"

#include <algorithm>
#include <cmath>

#include "zoq/linalg.hpp"

namespace zoq {

Design::Design(Kind kind, MatrixXd q, MatrixXd root)
    : kind_(kind), q_(std::move(q)), root_(std::move(root)) {
  if (kind_ != Kind::dense) scale_ = q_.diagonal().cwiseSqrt();
}

Design Design::gaussian_identity(Index d) {
  if (d < 1) fail(Errc::invalid_argument, "dimension must be at least 1");
  return Design(Kind::identity, MatrixXd::Identity(d, d), MatrixXd());
}

Design Design::diagonal(const VectorXd& variances) {
  if (variances.size() < 1) fail(Errc::invalid_argument, "diagonal design needs at least one entry");
  if ((variances.array() < 0.0).any() || !variances.allFinite())
    fail(Errc::invalid_config, "design variances must be finite and non-negative");
  return Design(Kind::diagonal, variances.asDiagonal(), MatrixXd());
}

Design Design::gaussian(const MatrixXd& q) {
  require_symmetric(q, "design second moment");
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(q);
  if (eig.eigenvalues().minCoeff() < -1e-12 * std::max(1.0, eig.eigenvalues().cwiseAbs().maxCoeff()))
    fail(Errc::invalid_config, "design second moment must be positive semi-definite");
  VectorXd roots = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  MatrixXd root = eig.eigenvectors() * roots.asDiagonal() * eig.eigenvectors().transpose();
  return Design(Kind::dense, q, std::move(root));
}

VectorXd Design::sample(RngStream& rng) const {
  VectorXd z = sample_standard_normal(rng, dim());
  switch (kind_) {
    case Kind::identity: return z;
    case Kind::diagonal: return scale_.cwiseProduct(z);
    case Kind::dense: return root_ * z;
  }
  return z;
}

double Design::lambda_min() const {
  if (kind_ == Kind::identity) return 1.0;
  if (kind_ == Kind::diagonal) return q_.diagonal().minCoeff();
  return symmetric_eigenvalues(q_).minCoeff();
}

double Design::max_moment(int order) const {
  if (order < 0 || order % 2 != 0) fail(Errc::invalid_argument, "moment order must be even");
  // E[N(0, s^2)^order] = (order - 1)!! s^order
  double double_factorial = 1.0;
  for (int j = order - 1; j > 1; j -= 2) double_factorial *= j;
  const double max_var = q_.diagonal().maxCoeff();
  return double_factorial * std::pow(max_var, order / 2);
}

double Design::moment_bound(int order) const { return std::max(1.0, max_moment(order)); }

}  // namespace zoq
