#ifndef ZOQ_HARNESS_HPP
#define ZOQ_HARNESS_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "zoq/config.hpp"
#include "zoq/core.hpp"
#include "zoq/hebbian.hpp"
#include "zoq/stats.hpp"

namespace zoq {

/// (theta_hat - theta*)^T Q (theta_hat - theta*).
template <typename Derived, typename OtherDerived, typename MatrixDerived>
typename Derived::Scalar excess_risk(const Eigen::MatrixBase<Derived>& theta_hat,
                                     const Eigen::MatrixBase<OtherDerived>& theta_star,
                                     const Eigen::MatrixBase<MatrixDerived>& q) {
  require_size(theta_star.size(), theta_hat.size(), "theta_star");
  require_size(q.rows(), theta_hat.size(), "Q");
  require_size(q.cols(), theta_hat.size(), "Q");
  const Vector<typename Derived::Scalar> err = theta_hat - theta_star;
  return err.dot(q * err);
}

/// Runs fn(0), ..., fn(n - 1) on a pool of workers (0 = hardware concurrency).
/// The first exception thrown by any task is rethrown after all workers stop.
void parallel_for(std::int64_t n, unsigned threads, const std::function<void(std::int64_t)>& fn);

/// Rounds 1, ..., k at which trajectories are logged: geometric with the given
/// factor, always including 1 and k.
std::vector<std::int64_t> log_grid(std::int64_t k, double factor);

inline constexpr const char* kTheoremRegime = "theorem-regime";
inline constexpr const char* kOutsideRegime = "outside-theorem-regime";

/// Rates are only guaranteed for d >= 9, k > 2 d^2 log(d) / B, and a B no larger
/// than the theorem's.
bool in_theorem_regime(Index d, std::int64_t k, double B, double theorem_B);

/// Schedule inputs resolved from a config.
ScheduleParams schedule_from(const SimConfig& config);
double half_width_from(const SimConfig& config);

struct TrajectoryPoint {
  std::int64_t k = 0;
  double sq_error = 0.0;
  double excess_risk = 0.0;
  bool theorem_regime = false;
};

struct Trajectory {
  int replicate = 0;
  std::vector<TrajectoryPoint> points;
  bool diverged = false;
};

struct AdaptiveRun {
  std::vector<Trajectory> trajectories;
  ScheduleParams schedule;
  double half_width = 0.0;
  /// 2 d^2 log(d) / B and twice that.
  double threshold = 0.0;
  double burn_in = 0.0;
  int diverged = 0;
};

/// Per replicate r: stream (seed, r) drives a fresh instance, session and learner
/// for k rounds, logged on log_grid(k, log_factor) plus any extra_points.
AdaptiveRun run_adaptive(const SimConfig& config, const std::vector<std::int64_t>& extra_points = {});

struct CurvePoint {
  std::int64_t k = 0;
  double mean_sq_error = 0.0;
  double stderr_sq_error = 0.0;
  double mean_excess_risk = 0.0;
  std::int64_t n = 0;
  bool theorem_regime = false;
};

/// Mean over non-diverged replicates at each logged round.
std::vector<CurvePoint> mean_curve(const AdaptiveRun& run);

struct NonadaptiveRecord {
  int replicate = 0;
  std::string mode;
  double sq_error = 0.0;
  double bound = 0.0;
  VectorXd error;  // theta_hat - theta*
};

struct RiskSummary {
  std::vector<NonadaptiveRecord> records;
  double mean_sq_error = 0.0;
  double stderr_sq_error = 0.0;
  double bound = 0.0;
  /// Per-coordinate mean of theta_hat - theta* and its standard error.
  VectorXd mean_error;
  VectorXd stderr_error;
};

RiskSummary run_nonadaptive(const SimConfig& config);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  double r_squared = 0.0;
};

/// Ordinary least squares of log y on log x.
RateFit fit_rate(const std::vector<double>& x, const std::vector<double>& y);

struct SweepRow {
  Index d = 0;
  std::int64_t k = 0;
  std::string strategy;
  double mean_risk = 0.0;
  double std_error = 0.0;
  std::int64_t n = 0;
  std::string regime;
};

struct GapFit {
  std::int64_t k = 0;
  RateFit adaptive;
  RateFit nonadaptive;
};

struct GapResult {
  std::vector<SweepRow> rows;
  std::vector<GapFit> fits;
  int diverged = 0;
  std::int64_t adaptive_runs = 0;
};

/// Both strategies at sigma = 1, R = sqrt(d), |theta*| = sqrt(d), theta0 = 0 for
/// every d in dims, evaluated at the shared rounds k = c d_max^2 log(d_max) / B
/// for c in config.gap_c; fits the d-exponent of the risk at each k.
GapResult run_gap_experiment(const SimConfig& config, const std::vector<Index>& dims);

void write_trajectories_csv(std::ostream& out, const AdaptiveRun& run);
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);
void write_nonadaptive_csv(std::ostream& out, const RiskSummary& summary);
void write_checks_csv(std::ostream& out, const std::vector<CheckResult>& checks);

}  // namespace zoq

#endif  // ZOQ_HARNESS_HPP
