#ifndef ZOQ_NONADAPTIVE_HPP
#define ZOQ_NONADAPTIVE_HPP

#include <cstdint>
#include <vector>

#include "zoq/core.hpp"
#include "zoq/oracle.hpp"

namespace zoq {

/// Pre-committed single-query design: rounds are split into d contiguous
/// blocks and every round of block s queries v = (R v sigma) e_s.
struct NonadaptivePlan {
  enum class Mode { zero_estimator, blocks };

  Mode mode = Mode::zero_estimator;
  Index d = 1;
  std::int64_t k = 0;
  double query_scale = 1.0;
  /// Block s covers rounds [offsets[s], offsets[s + 1]); empty in zero-estimator mode.
  std::vector<std::int64_t> offsets;

  std::int64_t block_size(Index s) const { return offsets[s + 1] - offsets[s]; }
};

/// Zero estimator iff k <= 2 d^2 max(sigma^2 / R^2, 1); otherwise blocks of
/// size floor(k/d) or ceil(k/d), the larger ones first.
NonadaptivePlan plan(std::int64_t k, Index d, double R, double sigma);

/// Issues every planned query (v' = 0, Z' discarded) and returns Z grouped by block.
std::vector<std::vector<double>> run_queries(const NonadaptivePlan& plan, QuerySession& session);

struct NonadaptiveEstimate {
  VectorXd theta_hat;
  /// Per-block mean of Z^2.
  VectorXd block_mean_sq;
};

/// theta_hat_s = (sigma^2 + |theta|^2 + s^2 - mean_{B_s} Z^2) / (2 s) with s = R v sigma.
NonadaptiveEstimate estimate(const NonadaptivePlan& plan, const std::vector<std::vector<double>>& samples,
                             double R, double sigma, double theta_norm_sq);

/// Plug-in estimate of |theta|^2 from n queries at v = 0: mean Z^2 - sigma^2.
double pilot_norm_sq(QuerySession& session, std::int64_t n, double sigma);

/// 25 min(R^2, (d^2 / k)(R v sigma)^2).
double risk_bound(std::int64_t k, Index d, double R, double sigma);

}  // namespace zoq

#endif  // ZOQ_NONADAPTIVE_HPP
