#ifndef ZOQ_ORACLE_HPP
#define ZOQ_ORACLE_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "zoq/config.hpp"
#include "zoq/core.hpp"
#include "zoq/design.hpp"
#include "zoq/rng.hpp"

namespace zoq {

struct Truth {
  VectorXd theta_star;
  double sigma;
  MatrixXd q;
};

/// Hidden truth of a linear model Y = X^T theta* + eps, eps ~ N(0, sigma^2), X ~ design.
///
/// Estimators never see an instance directly; they talk to a QuerySession.
/// Only evaluation code calls reveal_truth().
class RegressionInstance {
 public:
  RegressionInstance(VectorXd theta_star, double sigma, Design design);

  Index dim() const { return theta_star_.size(); }

 private:
  friend Truth reveal_truth(const RegressionInstance& instance);
  friend class QuerySession;

  VectorXd theta_star_;
  double sigma_;
  Design design_;
};

Truth reveal_truth(const RegressionInstance& instance);

/// Realizes theta* from the config (one draw from rng when it is random on the sphere).
RegressionInstance new_instance(const SimConfig& config, RngStream& rng);

enum class Protocol {
  standard,     ///< Z = Y - X^T v,  Z' = Y - X^T v'
  transformed,  ///< Z = Y - X^T v,  Z' = X^T v'
};

struct QueryRound {
  std::int64_t round;
  VectorXd v;
  VectorXd v_prime;
  double z;
  double z_prime;
};

/// Answers query-vector pairs against a fresh latent sample (X, eps) per round.
class QuerySession {
 public:
  QuerySession(const RegressionInstance& instance, RngStream rng, Protocol protocol = Protocol::standard);

  /// One round: consumes exactly one latent sample and returns (Z, Z').
  std::pair<double, double> query_pair(const VectorXd& v, const VectorXd& v_prime);

  Index dim() const { return instance_->dim(); }
  Protocol protocol() const { return protocol_; }
  std::int64_t rounds_used() const { return rounds_used_; }

  /// Queries beyond this many rounds raise Errc::protocol.
  void set_round_budget(std::int64_t max_rounds) { budget_ = max_rounds; }

  void enable_audit() { audit_enabled_ = true; }
  const std::vector<QueryRound>& audit_log() const { return audit_; }

 protected:
  struct Latent {
    VectorXd x;
    double eps = 0.0;
    double y = 0.0;
  };

  const Latent& latest_latent() const;

 private:
  const RegressionInstance* instance_;
  RngStream rng_;
  Protocol protocol_;
  std::int64_t rounds_used_ = 0;
  std::optional<std::int64_t> budget_;
  Latent latent_;
  bool audit_enabled_ = false;
  std::vector<QueryRound> audit_;
};

/// Verification-only session that also exposes the latent sample of the last round.
class TestModeSession : public QuerySession {
 public:
  using QuerySession::Latent;
  using QuerySession::QuerySession;
  using QuerySession::latest_latent;
};

/// CSV with header `round,v[0],...,v_prime[0],...,z,z_prime`.
void write_audit_csv(std::ostream& out, const std::vector<QueryRound>& log);

/// Law of (Z, Z') in the transformed protocol under a N(0, I) design.
template <typename Derived>
Matrix<typename Derived::Scalar> conditional_covariance(const Eigen::MatrixBase<Derived>& theta,
                                                        const Eigen::MatrixBase<Derived>& v,
                                                        const Eigen::MatrixBase<Derived>& v_prime,
                                                        typename Derived::Scalar sigma) {
  require_size(v.size(), theta.size(), "v");
  require_size(v_prime.size(), theta.size(), "v_prime");
  const Vector<typename Derived::Scalar> gap = theta - v;
  Matrix<typename Derived::Scalar> cov(2, 2);
  cov(0, 0) = sigma * sigma + gap.squaredNorm();
  cov(0, 1) = cov(1, 0) = gap.dot(v_prime);
  cov(1, 1) = v_prime.squaredNorm();
  return cov;
}

/// Two-query to transformed-query reduction.
///
/// Querying v = w + w' and v' = w - w' in the standard protocol and mapping the
/// answers through map_back() yields W = Y - X^T w and W' = X^T w'.
struct AdaptedQueries {
  VectorXd v;
  VectorXd v_prime;
};

inline AdaptedQueries adapt_queries(const VectorXd& w, const VectorXd& w_prime) {
  require_size(w_prime.size(), w.size(), "w_prime");
  return {w + w_prime, w - w_prime};
}

inline std::pair<double, double> map_back(double z, double z_prime) {
  return {(z + z_prime) / 2.0, (z_prime - z) / 2.0};
}

}  // namespace zoq

#endif  // ZOQ_ORACLE_HPP
