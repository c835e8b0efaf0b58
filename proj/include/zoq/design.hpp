#ifndef ZOQ_DESIGN_HPP
#define ZOQ_DESIGN_HPP

#include "zoq/core.hpp"
#include "zoq/rng.hpp"

namespace zoq {

/// Centered Gaussian design distribution P_X with second-moment matrix Q = E[X X^T].
class Design {
 public:
  static Design gaussian_identity(Index d);
  /// Independent coordinates with the given variances; zeros give a degenerate coordinate.
  static Design diagonal(const VectorXd& variances);
  /// General positive semi-definite Q, sampled through its symmetric square root.
  static Design gaussian(const MatrixXd& q);

  Index dim() const { return q_.rows(); }
  const MatrixXd& second_moment() const { return q_; }
  bool is_identity() const { return kind_ == Kind::identity; }

  VectorXd sample(RngStream& rng) const;

  double lambda_min() const;
  /// max_i E[X_i^order] for even order.
  double max_moment(int order) const;
  /// M_order = max_i 1 v E[X_i^order] for even order.
  double moment_bound(int order) const;

 private:
  enum class Kind { identity, diagonal, dense };

  Design(Kind kind, MatrixXd q, MatrixXd root);

  Kind kind_;
  MatrixXd q_;
  MatrixXd root_;
  VectorXd scale_;
};

}  // namespace zoq

#endif  // ZOQ_DESIGN_HPP
