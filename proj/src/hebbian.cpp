#include "zoq/hebbian.hpp"

#include <algorithm>
#include <cmath>

namespace zoq {

namespace {

VectorXd exp_difference(const VectorXd& u) { return (-u.array()).exp() - u.array().exp(); }

void require_in_box(const VectorXd& u, double half_width, const char* what) {
  if (!u.allFinite() || u.cwiseAbs().maxCoeff() > half_width)
    fail(Errc::invalid_argument, std::string(what) + " lies outside the perturbation box");
}

}  // namespace

double theorem_b(double lambda_min, double m4) {
  if (!(lambda_min > 0.0)) fail(Errc::invalid_hyperparameter, "lambda_min must be positive");
  if (!(m4 > 0.0)) fail(Errc::invalid_hyperparameter, "m4 must be positive");
  return std::min(1.0, lambda_min * lambda_min / (2904.0 * m4));
}

double ScheduleParams::B() const {
  if (b_override) return *b_override;
  return theorem_b(lambda_min, m4);
}

double learning_rate(std::int64_t k, const ScheduleParams& schedule, double half_width) {
  if (schedule.alpha_override) return *schedule.alpha_override;
  if (k < 1) fail(Errc::invalid_argument, "round index must be at least 1");
  if (schedule.d < 2) fail(Errc::schedule_undefined, "the schedule needs d >= 2 (log d > 0)");
  if (!(half_width > 0.0)) fail(Errc::invalid_hyperparameter, "box half-width must be positive");
  const double B = schedule.B();
  const double log_d = std::log(static_cast<double>(schedule.d));
  const double d2 = static_cast<double>(schedule.d) * static_cast<double>(schedule.d);
  return 11.0 * B * log_d /
         (half_width * half_width * schedule.lambda_min * (B * static_cast<double>(k) + d2 * log_d));
}

double theorem_round_threshold(Index d, double B) {
  const double dd = static_cast<double>(d);
  return 2.0 * dd * dd * std::log(dd) / B;
}

double default_half_width(double sigma, Index d) { return sigma / std::sqrt(static_cast<double>(d)); }

Learner::Learner(VectorXd theta0, double half_width, ScheduleParams schedule, bool antithetic)
    : theta_(std::move(theta0)), half_width_(half_width), schedule_(std::move(schedule)), antithetic_(antithetic) {
  if (!(half_width_ > 0.0) || !std::isfinite(half_width_))
    fail(Errc::invalid_hyperparameter, "box half-width A must be positive");
  if (!theta_.allFinite()) fail(Errc::numeric, "initial iterate must be finite");
  if (theta_.size() < 1) fail(Errc::invalid_argument, "dimension must be at least 1");
}

const Proposal& Learner::propose_queries(RngStream& rng) {
  if (pending_) fail(Errc::protocol, "propose_queries called twice without apply_update");
  VectorXd u = sample_uniform_box(rng, theta_.size(), half_width_);
  VectorXd u_prime = antithetic_ ? VectorXd(-u) : sample_uniform_box(rng, theta_.size(), half_width_);
  pending_ = Proposal{theta_ + u, theta_ + u_prime, std::move(u), std::move(u_prime)};
  return *pending_;
}

const Proposal& Learner::propose_queries(const VectorXd& u, const VectorXd& u_prime) {
  if (pending_) fail(Errc::protocol, "propose_queries called twice without apply_update");
  require_size(u.size(), theta_.size(), "U");
  require_size(u_prime.size(), theta_.size(), "U'");
  require_in_box(u, half_width_, "U");
  require_in_box(u_prime, half_width_, "U'");
  pending_ = Proposal{theta_ + u, theta_ + u_prime, u, u_prime};
  return *pending_;
}

void Learner::apply_update(double z, double z_prime, double alpha) {
  if (!pending_) fail(Errc::protocol, "apply_update called without a pending proposal");
  if (!std::isfinite(z) || !std::isfinite(z_prime)) fail(Errc::numeric, "query answers must be finite");
  VectorXd next = hebbian_step(theta_, z, z_prime, pending_->u, alpha);
  if (!next.allFinite()) fail(Errc::numeric, "iterate became non-finite");
  theta_ = std::move(next);
  ++k_;
  pending_.reset();
}

double Learner::apply_update(double z, double z_prime) {
  const double alpha = learning_rate(k_ + 1, schedule_, half_width_);
  apply_update(z, z_prime, alpha);
  return alpha;
}

Learner init_learner(Index d, std::optional<double> half_width, const ScheduleParams& schedule,
                     std::optional<VectorXd> theta0, bool antithetic) {
  const double A = half_width ? *half_width : default_half_width(schedule.sigma, d);
  if (!(A > 0.0)) fail(Errc::invalid_hyperparameter, "box half-width A must be positive");
  VectorXd start = theta0 ? *theta0 : VectorXd::Zero(d);
  require_size(start.size(), d, "theta0");
  return Learner(std::move(start), A, schedule, antithetic);
}

VectorXd hebbian_step(const VectorXd& theta, double z, double z_prime, const VectorXd& u, double alpha) {
  require_size(u.size(), theta.size(), "U");
  return theta + (alpha * (z * z - z_prime * z_prime)) * exp_difference(u);
}

double hebbian_round(Learner& learner, QuerySession& session, RngStream& rng) {
  const Proposal& p = learner.propose_queries(rng);
  const auto [z, z_prime] = session.query_pair(p.v, p.v_prime);
  return learner.apply_update(z, z_prime);
}

VarStep var_decompose(const VectorXd& theta_prev, const VectorXd& theta_star, const VectorXd& x, double eps,
                      const VectorXd& u, const VectorXd& u_prime, double alpha) {
  const Index d = theta_prev.size();
  require_size(theta_star.size(), d, "theta_star");
  require_size(x.size(), d, "X");
  require_size(u.size(), d, "U");
  require_size(u_prime.size(), d, "U'");

  const VectorXd D = exp_difference(u);
  const double x_du = x.dot(u_prime - u);
  const double xu = x.dot(u);
  const double xu_prime = x.dot(u_prime);

  VarStep step;
  step.G = MatrixXd::Identity(d, d) - (2.0 * alpha * x_du) * D * x.transpose();
  step.xi = (2.0 * alpha * eps * x_du + alpha * (xu * xu - xu_prime * xu_prime)) * D;
  step.next_error = step.G * (theta_prev - theta_star) + step.xi;
  return step;
}

}  // namespace zoq
