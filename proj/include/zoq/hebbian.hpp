#ifndef ZOQ_HEBBIAN_HPP
#define ZOQ_HEBBIAN_HPP

#include <cstdint>
#include <optional>

#include "zoq/core.hpp"
#include "zoq/oracle.hpp"
#include "zoq/rng.hpp"

namespace zoq {

/// Learning-rate schedule inputs. The learner cannot estimate lambda_min(Q) or
/// M_4 from queries, so both are supplied.
struct ScheduleParams {
  double lambda_min = 1.0;
  double m4 = 3.0;
  double sigma = 1.0;
  Index d = 1;
  std::optional<double> b_override;
  /// Constant step size used for every round when set.
  std::optional<double> alpha_override;

  /// min(1, lambda_min^2 / (2904 M_4)) unless overridden.
  double B() const;
};

double theorem_b(double lambda_min, double m4);

/// alpha_k = 11 B log d / (A^2 lambda_min (B k + d^2 log d)).
double learning_rate(std::int64_t k, const ScheduleParams& schedule, double half_width);

/// 2 d^2 log(d) / B, the round count after which the rate guarantee applies.
double theorem_round_threshold(Index d, double B);

/// sigma / sqrt(d).
double default_half_width(double sigma, Index d);

struct Proposal {
  VectorXd v;
  VectorXd v_prime;
  VectorXd u;
  VectorXd u_prime;
};

/// Zeroth-order learner driven by pairs of squared-loss queries.
///
/// Each round proposes v = theta + U and v' = theta + U' with U, U' uniform on
/// the box [-A, A]^d, then moves theta by alpha (Z^2 - Z'^2)(e^{-U} - e^{U}).
/// propose_queries() and apply_update() must alternate.
class Learner {
 public:
  Learner(VectorXd theta0, double half_width, ScheduleParams schedule, bool antithetic = false);

  const Proposal& propose_queries(RngStream& rng);
  /// Proposal with caller-supplied perturbations; each must lie in the box.
  const Proposal& propose_queries(const VectorXd& u, const VectorXd& u_prime);

  void apply_update(double z, double z_prime, double alpha);
  /// Uses the schedule's rate for the round being completed and returns it.
  double apply_update(double z, double z_prime);

  const VectorXd& theta() const { return theta_; }
  std::int64_t round() const { return k_; }
  double half_width() const { return half_width_; }
  bool antithetic() const { return antithetic_; }
  const ScheduleParams& schedule() const { return schedule_; }
  bool awaiting_answer() const { return pending_.has_value(); }

 private:
  VectorXd theta_;
  double half_width_;
  ScheduleParams schedule_;
  bool antithetic_;
  std::int64_t k_ = 0;
  std::optional<Proposal> pending_;
};

/// Half-width defaults to sigma / sqrt(d) and theta0 to the zero vector.
Learner init_learner(Index d, std::optional<double> half_width, const ScheduleParams& schedule,
                     std::optional<VectorXd> theta0 = std::nullopt, bool antithetic = false);

/// theta + alpha (z^2 - z'^2)(e^{-u} - e^{u}).
VectorXd hebbian_step(const VectorXd& theta, double z, double z_prime, const VectorXd& u, double alpha);

/// propose -> query -> update; returns the step size used.
double hebbian_round(Learner& learner, QuerySession& session, RngStream& rng);

/// Error dynamics W_k = G_k W_{k-1} + xi_k of one round, from latent values.
struct VarStep {
  MatrixXd G;
  VectorXd xi;
  VectorXd next_error;
};

VarStep var_decompose(const VectorXd& theta_prev, const VectorXd& theta_star, const VectorXd& x, double eps,
                      const VectorXd& u, const VectorXd& u_prime, double alpha);

}  // namespace zoq

#endif  // ZOQ_HEBBIAN_HPP
