#include "zoq/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <ostream>
#include <thread>

#include "zoq/csv.hpp"
#include "zoq/nonadaptive.hpp"
#include "zoq/oracle.hpp"

namespace zoq {

void parallel_for(std::int64_t n, unsigned threads, const std::function<void(std::int64_t)>& fn) {
  if (n <= 0) return;
  unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  workers = static_cast<unsigned>(std::min<std::int64_t>(workers, n));
  if (workers <= 1) {
    for (std::int64_t i = 0; i < n; ++i) fn(i);
    return;
  }

  std::atomic<std::int64_t> next{0};
  std::atomic<bool> stop{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    while (!stop.load()) {
      const std::int64_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        stop.store(true);
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::vector<std::int64_t> log_grid(std::int64_t k, double factor) {
  if (k < 1) fail(Errc::invalid_argument, "k must be at least 1");
  if (!(factor > 1.0)) fail(Errc::invalid_argument, "grid factor must exceed 1");
  std::vector<std::int64_t> grid{1};
  double x = 1.0;
  while (true) {
    x *= factor;
    const auto next = static_cast<std::int64_t>(std::ceil(x));
    if (next >= k) break;
    if (next > grid.back()) grid.push_back(next);
  }
  if (grid.back() != k) grid.push_back(k);
  return grid;
}

bool in_theorem_regime(Index d, std::int64_t k, double B, double theorem_B) {
  if (d < 9) return false;
  if (B > theorem_B * (1.0 + 1e-12)) return false;
  return static_cast<double>(k) > theorem_round_threshold(d, B);
}

ScheduleParams schedule_from(const SimConfig& config) {
  ScheduleParams s;
  s.lambda_min = config.resolved_lambda_min();
  s.m4 = config.resolved_m4();
  s.sigma = config.sigma;
  s.d = config.d;
  s.b_override = config.b_override;
  s.alpha_override = config.alpha_override;
  return s;
}

double half_width_from(const SimConfig& config) {
  const double A = config.a_override ? *config.a_override : default_half_width(config.sigma, config.d);
  if (!(A > 0.0)) fail(Errc::invalid_hyperparameter, "box half-width A must be positive (set a_override when sigma = 0)");
  return A;
}

namespace {

bool regime_of(const SimConfig& config, const ScheduleParams& schedule, std::int64_t k) {
  if (schedule.alpha_override) return false;
  return in_theorem_regime(config.d, k, schedule.B(), theorem_b(schedule.lambda_min, schedule.m4));
}

Trajectory run_one_adaptive(const SimConfig& config, const ScheduleParams& schedule, double A,
                            const std::vector<std::int64_t>& grid, int replicate) {
  const RngStream base = rng_stream(config.seed, static_cast<std::uint64_t>(replicate));
  RngStream instance_rng = base.substream(1);
  const RegressionInstance instance = new_instance(config, instance_rng);
  const Truth truth = reveal_truth(instance);
  QuerySession session(instance, base.substream(2));
  RngStream learner_rng = base.substream(3);
  Learner learner = init_learner(config.d, A, schedule, config.theta0, config.antithetic);

  const double limit = 1e6 * std::max(config.R, 1.0);
  Trajectory traj;
  traj.replicate = replicate;
  traj.points.reserve(grid.size());
  std::size_t next = 0;
  try {
    for (std::int64_t k = 1; k <= config.k; ++k) {
      hebbian_round(learner, session, learner_rng);
      if (learner.theta().squaredNorm() > limit * limit) {
        traj.diverged = true;
        break;
      }
      if (next < grid.size() && grid[next] == k) {
        const VectorXd err = learner.theta() - truth.theta_star;
        traj.points.push_back(
            {k, err.squaredNorm(), excess_risk(learner.theta(), truth.theta_star, truth.q), regime_of(config, schedule, k)});
        ++next;
      }
    }
  } catch (const Error& e) {
    if (e.code() != Errc::numeric) throw;
    traj.diverged = true;
  }
  return traj;
}

}  // namespace

AdaptiveRun run_adaptive(const SimConfig& config, const std::vector<std::int64_t>& extra_points) {
  config.validate();
  AdaptiveRun run;
  run.schedule = schedule_from(config);
  run.half_width = half_width_from(config);
  if (config.d >= 2) {
    run.threshold = theorem_round_threshold(config.d, run.schedule.B());
    run.burn_in = 2.0 * run.threshold;
  } else {
    run.threshold = run.burn_in = std::numeric_limits<double>::infinity();
  }

  std::vector<std::int64_t> grid = log_grid(config.k, config.log_factor);
  for (std::int64_t k : extra_points)
    if (k >= 1 && k <= config.k) grid.push_back(k);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  run.trajectories.resize(config.replicates);
  parallel_for(config.replicates, config.threads, [&](std::int64_t r) {
    run.trajectories[r] = run_one_adaptive(config, run.schedule, run.half_width, grid, static_cast<int>(r));
  });
  for (const auto& t : run.trajectories) run.diverged += t.diverged ? 1 : 0;
  return run;
}

std::vector<CurvePoint> mean_curve(const AdaptiveRun& run) {
  std::vector<CurvePoint> curve;
  const Trajectory* reference = nullptr;
  for (const auto& t : run.trajectories)
    if (!t.diverged) {
      reference = &t;
      break;
    }
  if (!reference) return curve;

  for (std::size_t i = 0; i < reference->points.size(); ++i) {
    RunningStats sq, excess;
    for (const auto& t : run.trajectories) {
      if (t.diverged) continue;
      sq.add(t.points[i].sq_error);
      excess.add(t.points[i].excess_risk);
    }
    curve.push_back({reference->points[i].k, sq.mean(), sq.stderr_of_mean(), excess.mean(), sq.count(),
                     reference->points[i].theorem_regime});
  }
  return curve;
}

namespace {

NonadaptiveRecord run_one_nonadaptive(const SimConfig& config, int replicate) {
  const RngStream base = rng_stream(config.seed, static_cast<std::uint64_t>(replicate));
  RngStream instance_rng = base.substream(1);
  const RegressionInstance instance = new_instance(config, instance_rng);
  const Truth truth = reveal_truth(instance);
  QuerySession session(instance, base.substream(2));
  session.set_round_budget(config.k);

  NonadaptiveRecord rec;
  rec.replicate = replicate;
  rec.bound = risk_bound(config.k, config.d, config.R, config.sigma);

  VectorXd theta_hat = VectorXd::Zero(config.d);
  if (config.estimator == EstimatorMode::oracle) {
    const NonadaptivePlan p = plan(config.k, config.d, config.R, config.sigma);
    const auto samples = run_queries(p, session);
    theta_hat = estimate(p, samples, config.R, config.sigma, truth.theta_star.squaredNorm()).theta_hat;
    rec.mode = p.mode == NonadaptivePlan::Mode::blocks ? "blocks" : "zero-estimator";
  } else {
    const std::int64_t pilot = (config.k + 9) / 10;
    const std::int64_t remaining = config.k - pilot;
    rec.mode = "zero-estimator";
    if (remaining >= 1) {
      const NonadaptivePlan p = plan(remaining, config.d, config.R, config.sigma);
      if (p.mode == NonadaptivePlan::Mode::blocks) {
        const double norm_sq = pilot_norm_sq(session, pilot, config.sigma);
        const auto samples = run_queries(p, session);
        theta_hat = estimate(p, samples, config.R, config.sigma, norm_sq).theta_hat;
        rec.mode = "blocks-plug-in";
      }
    }
  }
  rec.error = theta_hat - truth.theta_star;
  rec.sq_error = rec.error.squaredNorm();
  return rec;
}

}  // namespace

RiskSummary run_nonadaptive(const SimConfig& config) {
  config.validate();
  RiskSummary summary;
  summary.records.resize(config.replicates);
  parallel_for(config.replicates, config.threads,
               [&](std::int64_t r) { summary.records[r] = run_one_nonadaptive(config, static_cast<int>(r)); });

  RunningStats sq;
  MatrixStats err(config.d, 1);
  for (const auto& rec : summary.records) {
    sq.add(rec.sq_error);
    err.add(rec.error);
  }
  summary.mean_sq_error = sq.mean();
  summary.stderr_sq_error = sq.stderr_of_mean();
  summary.bound = risk_bound(config.k, config.d, config.R, config.sigma);
  summary.mean_error = err.mean().col(0);
  summary.stderr_error = err.stderr_of_mean().col(0);
  return summary;
}

RateFit fit_rate(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) fail(Errc::invalid_argument, "x and y must have equal length");
  if (x.size() < 3) fail(Errc::invalid_argument, "rate fit needs at least 3 points");
  const std::size_t n = x.size();
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0) || !std::isfinite(x[i]) || !std::isfinite(y[i]))
      fail(Errc::invalid_argument, "rate fit needs positive finite values");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (sxx == 0.0) fail(Errc::invalid_argument, "rate fit needs at least two distinct x values");

  RateFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  const double sse = std::max(0.0, syy - fit.slope * sxy);
  fit.slope_stderr = std::sqrt(sse / static_cast<double>(n - 2) / sxx);
  fit.r_squared = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  return fit;
}

GapResult run_gap_experiment(const SimConfig& config, const std::vector<Index>& dims) {
  config.validate();
  if (config.sigma != 1.0) fail(Errc::invalid_config, "the gap experiment runs at sigma = 1");
  if (dims.size() < 3) fail(Errc::invalid_argument, "the gap experiment needs at least 3 dimensions");
  if (config.gap_c.empty()) fail(Errc::invalid_config, "gap_c must list at least one multiplier");
  for (Index d : dims)
    if (d < 2) fail(Errc::invalid_argument, "gap dimensions must be at least 2");

  const Index d_max = *std::max_element(dims.begin(), dims.end());
  const double B = schedule_from(config).B();
  const double dm = static_cast<double>(d_max);
  std::vector<std::int64_t> ks;
  for (double c : config.gap_c) ks.push_back(static_cast<std::int64_t>(std::llround(c * dm * dm * std::log(dm) / B)));
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());

  GapResult result;
  std::vector<std::vector<double>> adaptive_risk(ks.size()), nonadaptive_risk(ks.size());
  std::vector<double> dims_real;

  for (Index d : dims) {
    SimConfig cell = config;
    cell.d = d;
    cell.R = std::sqrt(static_cast<double>(d));
    cell.theta_star = ThetaStarSpec{ThetaStarSpec::Kind::sphere, cell.R, VectorXd()};
    cell.design = DesignSpec{};
    cell.theta0.reset();
    cell.seed = config.seed + 0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(d);
    cell.k = ks.back();
    dims_real.push_back(static_cast<double>(d));

    const AdaptiveRun run = run_adaptive(cell, ks);
    result.diverged += run.diverged;
    result.adaptive_runs += static_cast<std::int64_t>(run.trajectories.size());
    const auto curve = mean_curve(run);
    for (std::size_t j = 0; j < ks.size(); ++j) {
      const auto it = std::find_if(curve.begin(), curve.end(), [&](const CurvePoint& p) { return p.k == ks[j]; });
      if (it == curve.end()) fail(Errc::numeric, "every adaptive replicate diverged");
      result.rows.push_back({d, ks[j], "adaptive", it->mean_sq_error, it->stderr_sq_error, it->n,
                             it->theorem_regime ? kTheoremRegime : kOutsideRegime});
      adaptive_risk[j].push_back(it->mean_sq_error);
    }

    for (std::size_t j = 0; j < ks.size(); ++j) {
      SimConfig na = cell;
      na.k = ks[j];
      const RiskSummary s = run_nonadaptive(na);
      result.rows.push_back({d, ks[j], "nonadaptive", s.mean_sq_error, s.stderr_sq_error,
                             static_cast<std::int64_t>(s.records.size()),
                             na.estimator == EstimatorMode::oracle ? kTheoremRegime : kOutsideRegime});
      nonadaptive_risk[j].push_back(s.mean_sq_error);
    }
  }

  for (std::size_t j = 0; j < ks.size(); ++j)
    result.fits.push_back({ks[j], fit_rate(dims_real, adaptive_risk[j]), fit_rate(dims_real, nonadaptive_risk[j])});
  return result;
}

void write_trajectories_csv(std::ostream& out, const AdaptiveRun& run) {
  CsvWriter csv(out);
  csv.header({"replicate", "k", "sq_error", "excess_risk", "regime"});
  for (const auto& t : run.trajectories) {
    for (const auto& p : t.points) {
      const char* regime = t.diverged ? "diverged" : (p.theorem_regime ? kTheoremRegime : kOutsideRegime);
      csv.field(t.replicate).field(p.k).field(p.sq_error).field(p.excess_risk).field(regime);
      csv.end_row();
    }
  }
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  CsvWriter csv(out);
  csv.header({"d", "k", "strategy", "mean_risk", "stderr", "n", "regime"});
  for (const auto& r : rows) {
    csv.field(static_cast<std::int64_t>(r.d)).field(r.k).field(r.strategy).field(r.mean_risk).field(r.std_error);
    csv.field(r.n).field(r.regime);
    csv.end_row();
  }
}

void write_nonadaptive_csv(std::ostream& out, const RiskSummary& summary) {
  CsvWriter csv(out);
  csv.header({"replicate", "mode", "sq_error", "bound"});
  for (const auto& r : summary.records) {
    csv.field(r.replicate).field(r.mode).field(r.sq_error).field(r.bound);
    csv.end_row();
  }
}

void write_checks_csv(std::ostream& out, const std::vector<CheckResult>& checks) {
  CsvWriter csv(out);
  csv.header({"check_name", "statistic", "threshold", "pass"});
  for (const auto& c : checks) {
    csv.field(c.name).field(c.statistic).field(c.threshold).field(c.pass);
    csv.end_row();
  }
}

}  // namespace zoq
