#include "zoq/nonadaptive.hpp"

#include <algorithm>
#include <cmath>

namespace zoq {

NonadaptivePlan plan(std::int64_t k, Index d, double R, double sigma) {
  if (k < 1 || d < 1) fail(Errc::invalid_argument, "k and d must be at least 1");
  if (!(R > 0.0)) fail(Errc::invalid_argument, "R must be positive");
  if (!(sigma >= 0.0)) fail(Errc::invalid_argument, "sigma must be non-negative");

  NonadaptivePlan p;
  p.d = d;
  p.k = k;
  p.query_scale = std::max(R, sigma);
  const double dd = static_cast<double>(d);
  const double threshold = 2.0 * dd * dd * std::max(sigma * sigma / (R * R), 1.0);
  if (static_cast<double>(k) <= threshold) return p;

  p.mode = NonadaptivePlan::Mode::blocks;
  const std::int64_t base = k / d;
  const std::int64_t extra = k % d;
  p.offsets.resize(d + 1);
  p.offsets[0] = 0;
  for (Index s = 0; s < d; ++s) p.offsets[s + 1] = p.offsets[s] + base + (s < extra ? 1 : 0);
  return p;
}

std::vector<std::vector<double>> run_queries(const NonadaptivePlan& p, QuerySession& session) {
  require_size(session.dim(), p.d, "session");
  std::vector<std::vector<double>> samples;
  if (p.mode == NonadaptivePlan::Mode::zero_estimator) return samples;

  samples.resize(p.d);
  const VectorXd origin = VectorXd::Zero(p.d);
  for (Index s = 0; s < p.d; ++s) {
    const VectorXd v = p.query_scale * VectorXd::Unit(p.d, s);
    samples[s].reserve(p.block_size(s));
    for (std::int64_t j = 0; j < p.block_size(s); ++j) samples[s].push_back(session.query_pair(v, origin).first);
  }
  return samples;
}

NonadaptiveEstimate estimate(const NonadaptivePlan& p, const std::vector<std::vector<double>>& samples, double R,
                             double sigma, double theta_norm_sq) {
  NonadaptiveEstimate out{VectorXd::Zero(p.d), VectorXd::Zero(p.d)};
  if (p.mode == NonadaptivePlan::Mode::zero_estimator) return out;
  if (static_cast<Index>(samples.size()) != p.d) fail(Errc::invalid_argument, "one sample block per coordinate");

  const double s = std::max(R, sigma);
  for (Index i = 0; i < p.d; ++i) {
    const auto& block = samples[i];
    if (block.empty()) fail(Errc::invalid_argument, "invalid plan: empty block");
    double sum_sq = 0.0;
    for (double z : block) sum_sq += z * z;
    out.block_mean_sq(i) = sum_sq / static_cast<double>(block.size());
    out.theta_hat(i) = (sigma * sigma + theta_norm_sq + s * s - out.block_mean_sq(i)) / (2.0 * s);
  }
  return out;
}

double pilot_norm_sq(QuerySession& session, std::int64_t n, double sigma) {
  if (n < 1) fail(Errc::invalid_argument, "pilot needs at least one query");
  const VectorXd origin = VectorXd::Zero(session.dim());
  double sum_sq = 0.0;
  for (std::int64_t j = 0; j < n; ++j) {
    const double z = session.query_pair(origin, origin).first;
    sum_sq += z * z;
  }
  return sum_sq / static_cast<double>(n) - sigma * sigma;
}

double risk_bound(std::int64_t k, Index d, double R, double sigma) {
  const double s = std::max(R, sigma);
  const double dd = static_cast<double>(d);
  return 25.0 * std::min(R * R, dd * dd / static_cast<double>(k) * s * s);
}

}  // namespace zoq
