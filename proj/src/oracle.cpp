#include "zoq/oracle.hpp"

#include <cmath>
#include <ostream>

#include "zoq/csv.hpp"

namespace zoq {

RegressionInstance::RegressionInstance(VectorXd theta_star, double sigma, Design design)
    : theta_star_(std::move(theta_star)), sigma_(sigma), design_(std::move(design)) {
  require_size(design_.dim(), theta_star_.size(), "design");
  if (!(sigma_ >= 0.0) || !std::isfinite(sigma_)) fail(Errc::invalid_config, "sigma must be non-negative");
  if (!theta_star_.allFinite()) fail(Errc::invalid_config, "theta_star must be finite");
}

Truth reveal_truth(const RegressionInstance& instance) {
  return {instance.theta_star_, instance.sigma_, instance.design_.second_moment()};
}

RegressionInstance new_instance(const SimConfig& config, RngStream& rng) {
  config.validate();
  VectorXd theta_star = VectorXd::Zero(config.d);
  switch (config.theta_star.kind) {
    case ThetaStarSpec::Kind::zero: break;
    case ThetaStarSpec::Kind::explicit_vector: theta_star = config.theta_star.values; break;
    case ThetaStarSpec::Kind::sphere: {
      VectorXd direction = sample_standard_normal(rng, config.d);
      while (direction.norm() == 0.0) direction = sample_standard_normal(rng, config.d);
      theta_star = config.theta_star.norm * direction / direction.norm();
      break;
    }
  }
  return RegressionInstance(std::move(theta_star), config.sigma, config.make_design());
}

QuerySession::QuerySession(const RegressionInstance& instance, RngStream rng, Protocol protocol)
    : instance_(&instance), rng_(std::move(rng)), protocol_(protocol) {}

std::pair<double, double> QuerySession::query_pair(const VectorXd& v, const VectorXd& v_prime) {
  require_size(v.size(), dim(), "query vector v");
  require_size(v_prime.size(), dim(), "query vector v_prime");
  if (budget_ && rounds_used_ >= *budget_) fail(Errc::protocol, "query session exhausted");

  latent_.x = instance_->design_.sample(rng_);
  latent_.eps = instance_->sigma_ * rng_.normal();
  latent_.y = latent_.x.dot(instance_->theta_star_) + latent_.eps;

  const double z = latent_.y - latent_.x.dot(v);
  const double z_prime =
      protocol_ == Protocol::standard ? latent_.y - latent_.x.dot(v_prime) : latent_.x.dot(v_prime);
  ++rounds_used_;
  if (audit_enabled_) audit_.push_back({rounds_used_, v, v_prime, z, z_prime});
  return {z, z_prime};
}

const QuerySession::Latent& QuerySession::latest_latent() const {
  if (rounds_used_ == 0) fail(Errc::protocol, "no round has been queried yet");
  return latent_;
}

void write_audit_csv(std::ostream& out, const std::vector<QueryRound>& log) {
  const Index d = log.empty() ? 0 : log.front().v.size();
  CsvWriter csv(out);
  std::vector<std::string> header{"round"};
  for (Index i = 0; i < d; ++i) header.push_back("v[" + std::to_string(i) + "]");
  for (Index i = 0; i < d; ++i) header.push_back("v_prime[" + std::to_string(i) + "]");
  header.push_back("z");
  header.push_back("z_prime");
  csv.header(header);
  for (const auto& r : log) {
    csv.field(r.round);
    for (Index i = 0; i < d; ++i) csv.field(r.v[i]);
    for (Index i = 0; i < d; ++i) csv.field(r.v_prime[i]);
    csv.field(r.z);
    csv.field(r.z_prime);
    csv.end_row();
  }
}

}  // namespace zoq
