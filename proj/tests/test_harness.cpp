#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "zoq/harness.hpp"
#include "zoq/rng.hpp"

using namespace zoq;

namespace {

std::string trajectories_csv(const SimConfig& c) {
  std::ostringstream out;
  write_trajectories_csv(out, run_adaptive(c));
  return out.str();
}

}  // namespace

TEST_CASE("excess_risk") {
  Eigen::Matrix2d q;
  q << 2, 0, 0, 1;
  CHECK(excess_risk(Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 0), q) == 2.0);
  CHECK(excess_risk(Eigen::Vector2d(3, 1), Eigen::Vector2d(3, 0), q) == 1.0);

  RngStream rng = rng_stream(1, 0);
  const MatrixXd eye = MatrixXd::Identity(6, 6);
  for (int i = 0; i < 200; ++i) {
    const VectorXd a = sample_standard_normal(rng, 6), b = sample_standard_normal(rng, 6);
    CHECK(std::abs(excess_risk(a, b, eye) - (a - b).squaredNorm()) <= 1e-12);
  }
  CHECK_THROWS_AS(excess_risk(VectorXd::Zero(2), VectorXd::Zero(3), eye), Error);
}

TEST_CASE("parallel_for") {
  std::vector<int> hits(1000, 0);
  parallel_for(1000, 4, [&](std::int64_t i) { hits[i] += 1; });
  CHECK(std::count(hits.begin(), hits.end(), 1) == 1000);

  std::atomic<int> ran{0};
  CHECK_THROWS_AS(parallel_for(100, 3,
                               [&](std::int64_t i) {
                                 ++ran;
                                 if (i == 17) throw std::runtime_error("boom");
                               }),
                  std::runtime_error);
  parallel_for(0, 2, [](std::int64_t) { FAIL("no tasks expected"); });
}

TEST_CASE("log_grid") {
  const auto g = log_grid(1000, 1.3);
  CHECK(g.front() == 1);
  CHECK(g.back() == 1000);
  for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] > g[i - 1]);
  CHECK(log_grid(1, 1.3) == std::vector<std::int64_t>{1});
  CHECK_THROWS_AS(log_grid(0, 1.3), Error);
  CHECK_THROWS_AS(log_grid(10, 1.0), Error);
}

TEST_CASE("regime tag") {
  const double B = 1.0 / 8712.0;
  const double threshold = 2.0 * 100.0 * std::log(10.0) / B;
  CHECK(in_theorem_regime(10, static_cast<std::int64_t>(threshold) + 1, B, B));
  CHECK_FALSE(in_theorem_regime(10, static_cast<std::int64_t>(threshold) - 1, B, B));
  CHECK_FALSE(in_theorem_regime(8, 1000000000, B, B));
  // a larger B than the theorem allows leaves the regime whatever k is
  CHECK_FALSE(in_theorem_regime(10, 1000000000, 0.025, B));
}

TEST_CASE("fit_rate") {
  SUBCASE("exact power laws") {
    CHECK(std::abs(fit_rate({10, 100, 1000}, {0.7, 0.07, 0.007}).slope + 1.0) <= 1e-10);
    const RateFit f = fit_rate({1, 2, 4, 8}, {3, 12, 48, 192});
    CHECK(std::abs(f.slope - 2.0) <= 1e-12);
    CHECK(std::abs(f.intercept - std::log(3.0)) <= 1e-12);
    CHECK(f.r_squared == doctest::Approx(1.0));
  }
  SUBCASE("noisy 1/x") {
    RngStream rng = rng_stream(2, 0);
    std::vector<double> x, y;
    for (int i = 0; i < 20; ++i) {
      x.push_back(std::pow(10.0, 1.0 + 0.15 * i));
      y.push_back(5.0 / x.back() * (1.0 + 0.05 * rng.normal()));
    }
    const RateFit f = fit_rate(x, y);
    CHECK(f.slope >= -1.1);
    CHECK(f.slope <= -0.9);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(fit_rate({1, 2}, {1, 2}), Error);
    CHECK_THROWS_AS(fit_rate({1, 2, 3}, {1, 0, 2}), Error);
    CHECK_THROWS_AS(fit_rate({1, 2, 3}, {1, 2}), Error);
    CHECK_THROWS_AS(fit_rate({2, 2, 2}, {1, 2, 3}), Error);
  }
}

TEST_CASE("adaptive runs are reproducible") {
  SimConfig c = parse_config_string("d = 4\nk = 3000\nreplicates = 6\nseed = 5\nb_override = 0.025\n");
  c.threads = 1;
  const std::string one = trajectories_csv(c);
  CHECK(one == trajectories_csv(c));
  c.threads = 3;
  CHECK(one == trajectories_csv(c));
  CHECK(one.rfind("replicate,k,sq_error,excess_risk,regime\n", 0) == 0);
  c.seed = 6;
  CHECK(one != trajectories_csv(c));
}

TEST_CASE("adaptive run bookkeeping") {
  const SimConfig c = parse_config_string("d = 3\nk = 500\nreplicates = 4\nseed = 9\nb_override = 0.025\n");
  const AdaptiveRun run = run_adaptive(c, {123});
  REQUIRE(run.trajectories.size() == 4);
  CHECK(run.diverged == 0);
  for (const auto& t : run.trajectories) {
    CHECK(t.points.back().k == 500);
    CHECK(std::any_of(t.points.begin(), t.points.end(), [](const TrajectoryPoint& p) { return p.k == 123; }));
    for (const auto& p : t.points) CHECK(std::abs(p.sq_error - p.excess_risk) <= 1e-12);
  }
  CHECK(run.threshold == doctest::Approx(2.0 * 9.0 * std::log(3.0) / 0.025));
  CHECK(run.burn_in == doctest::Approx(2.0 * run.threshold));

  const auto curve = mean_curve(run);
  CHECK(curve.back().n == 4);
  double mean = 0.0;
  for (const auto& t : run.trajectories) mean += t.points.back().sq_error / 4.0;
  CHECK(curve.back().mean_sq_error == doctest::Approx(mean));
}

TEST_CASE("a huge step size is flagged as divergence") {
  const SimConfig c = parse_config_string("d = 3\nk = 2000\nreplicates = 3\nseed = 1\nalpha_override = 1e6\n");
  const AdaptiveRun run = run_adaptive(c);
  CHECK(run.diverged == 3);
  std::ostringstream out;
  write_trajectories_csv(out, run);
  CHECK(out.str().find(",diverged\n") != std::string::npos);
  for (const auto& p : mean_curve(run)) CHECK(p.n == 0);
}

TEST_CASE("nonadaptive runs") {
  SUBCASE("zero estimator pays the full norm") {
    const SimConfig c = parse_config_string("d = 5\nk = 20\nreplicates = 3\ntheta_star = sphere:0.8\n");
    const RiskSummary s = run_nonadaptive(c);
    for (const auto& r : s.records) {
      CHECK(r.mode == "zero-estimator");
      CHECK(std::abs(r.sq_error - 0.64) <= 1e-12);
    }
    CHECK(s.bound == 25.0);
  }
  SUBCASE("risk halves when k doubles") {
    const std::string base = "d = 4\nreplicates = 4000\nseed = 3\ntheta_star = 0.5,-0.2,0.1,0.3\n";
    const RiskSummary a = run_nonadaptive(parse_config_string(base + "k = 400\n"));
    const RiskSummary b = run_nonadaptive(parse_config_string(base + "k = 800\n"));
    CHECK(a.records.front().mode == "blocks");
    const double diff = a.mean_sq_error - 2.0 * b.mean_sq_error;
    const double se = std::hypot(a.stderr_sq_error, 2.0 * b.stderr_sq_error);
    CHECK(std::abs(diff) <= 5.0 * se);
    CHECK(a.mean_sq_error <= a.bound);
  }
  SUBCASE("plug-in mode") {
    const SimConfig c =
        parse_config_string("d = 3\nk = 2000\nreplicates = 20\nseed = 4\nestimator = plug-in\n");
    const RiskSummary s = run_nonadaptive(c);
    CHECK(s.records.front().mode == "blocks-plug-in");
    CHECK(s.mean_sq_error <= s.bound);
  }
  SUBCASE("csv is reproducible") {
    const SimConfig c = parse_config_string("d = 3\nk = 100\nreplicates = 5\nseed = 8\n");
    std::ostringstream one, two;
    write_nonadaptive_csv(one, run_nonadaptive(c));
    write_nonadaptive_csv(two, run_nonadaptive(c));
    CHECK(one.str() == two.str());
  }
}

TEST_CASE("gap experiment") {
  SUBCASE("smoke") {
    const SimConfig c = parse_config_string("replicates = 2\nseed = 2\nb_override = 0.025\ngap_c = 1\n");
    const GapResult g = run_gap_experiment(c, {2, 3, 4});
    CHECK(g.rows.size() == 6);
    REQUIRE(g.fits.size() == 1);
    CHECK(g.fits[0].k == std::llround(16.0 * std::log(4.0) / 0.025));
    CHECK(g.diverged == 0);
    for (const auto& r : g.rows) CHECK(r.k == g.fits[0].k);
    std::ostringstream out;
    write_sweep_csv(out, g.rows);
    CHECK(out.str().rfind("d,k,strategy,mean_risk,stderr,n,regime\n", 0) == 0);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(run_gap_experiment(parse_config_string("sigma = 2\n"), {2, 3, 4}), Error);
    CHECK_THROWS_AS(run_gap_experiment(parse_config_string(""), {2, 3}), Error);
    CHECK_THROWS_AS(run_gap_experiment(parse_config_string(""), {1, 3, 4}), Error);
  }
}

TEST_CASE("checks csv") {
  std::ostringstream out;
  write_checks_csv(out, {make_check("a", 0.5, 1.0), make_check("b", 2.0, 1.0)});
  const std::string text = out.str();
  CHECK(text.rfind("check_name,statistic,threshold,pass\n", 0) == 0);
  CHECK(text.find("a,0.5,1,true\n") != std::string::npos);
  CHECK(text.find("b,2,1,false\n") != std::string::npos);
}
