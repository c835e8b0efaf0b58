#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "zoq/nonadaptive.hpp"
#include "zoq/stats.hpp"

using namespace zoq;

namespace {

VectorXd vec(std::initializer_list<double> v) {
  VectorXd out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

}  // namespace

TEST_CASE("plan examples") {
  CHECK(plan(10, 5, 1.0, 1.0).mode == NonadaptivePlan::Mode::zero_estimator);
  CHECK(plan(50, 5, 1.0, 1.0).mode == NonadaptivePlan::Mode::zero_estimator);

  const NonadaptivePlan p = plan(100, 5, 1.0, 1.0);
  REQUIRE(p.mode == NonadaptivePlan::Mode::blocks);
  for (Index s = 0; s < 5; ++s) CHECK(p.block_size(s) == 20);

  const NonadaptivePlan q = plan(101, 5, 1.0, 1.0);
  CHECK(q.block_size(0) == 21);
  for (Index s = 1; s < 5; ++s) CHECK(q.block_size(s) == 20);

  CHECK(plan(100, 5, 1.0, 2.0).query_scale == 2.0);
  CHECK(plan(100, 5, 3.0, 2.0).query_scale == 3.0);
  // sigma > R raises the threshold to 2 d^2 sigma^2 / R^2
  CHECK(plan(150, 5, 1.0, 2.0).mode == NonadaptivePlan::Mode::zero_estimator);
  CHECK(plan(201, 5, 1.0, 2.0).mode == NonadaptivePlan::Mode::blocks);
}

TEST_CASE("plan invariants hold exhaustively") {
  const double R = 1.0, sigma = 1.0;
  std::int64_t violations = 0;
  for (Index d = 1; d <= 50; ++d) {
    for (std::int64_t k = 1; k <= 10000; ++k) {
      const NonadaptivePlan p = plan(k, d, R, sigma);
      const bool zero = static_cast<double>(k) <= 2.0 * d * d;
      if ((p.mode == NonadaptivePlan::Mode::zero_estimator) != zero) ++violations;
      if (zero) continue;
      if (p.offsets.front() != 0 || p.offsets.back() != k) ++violations;
      for (Index s = 0; s < d; ++s) {
        const std::int64_t size = p.block_size(s);
        if (2 * d * size < k || (size != k / d && size != k / d + 1)) ++violations;
      }
    }
  }
  CHECK(violations == 0);
}

TEST_CASE("run_queries") {
  SUBCASE("noiseless truth on the first query vector") {
    const RegressionInstance inst(vec({1, 0, 0}), 0.0, Design::gaussian_identity(3));
    QuerySession s(inst, rng_stream(1, 0));
    const NonadaptivePlan p = plan(60, 3, 1.0, 0.0);
    const auto samples = run_queries(p, s);
    for (double z : samples[0]) CHECK(std::abs(z) <= 1e-12);
    CHECK(s.rounds_used() == 60);
  }
  SUBCASE("zero estimator issues nothing") {
    const RegressionInstance inst(vec({0.5, 0}), 1.0, Design::gaussian_identity(2));
    QuerySession s(inst, rng_stream(2, 0));
    CHECK(run_queries(plan(5, 2, 1.0, 1.0), s).empty());
    CHECK(s.rounds_used() == 0);
  }
  SUBCASE("query vectors have norm R v sigma") {
    const RegressionInstance inst(vec({0.5, 0}), 1.5, Design::gaussian_identity(2));
    QuerySession s(inst, rng_stream(3, 0));
    s.enable_audit();
    run_queries(plan(40, 2, 1.0, 1.5), s);
    for (const auto& r : s.audit_log()) CHECK(r.v.norm() == 1.5);
  }
  SUBCASE("exhausted session") {
    const RegressionInstance inst(vec({0.5, 0}), 1.0, Design::gaussian_identity(2));
    QuerySession s(inst, rng_stream(4, 0));
    s.set_round_budget(10);
    try {
      run_queries(plan(40, 2, 1.0, 1.0), s);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::protocol);
    }
  }
  SUBCASE("per-block variance") {
    const VectorXd theta = vec({0.6, -0.3});
    const double sigma = 0.8, R = 1.0;
    const RegressionInstance inst(theta, sigma, Design::gaussian_identity(2));
    QuerySession s(inst, rng_stream(5, 0));
    const NonadaptivePlan p = plan(400000, 2, R, sigma);
    const auto samples = run_queries(p, s);
    for (Index b = 0; b < 2; ++b) {
      RunningStats z2;
      for (double z : samples[b]) z2.add(z * z);
      const double expected = sigma * sigma + theta.squaredNorm() - 2.0 * R * theta(b) + R * R;
      CHECK(std::abs(z2.mean() - expected) <= 5.0 * z2.stderr_of_mean());
    }
  }
}

TEST_CASE("estimate") {
  const NonadaptivePlan p = plan(100, 2, 1.0, 1.0);
  const VectorXd theta = vec({0.3, -0.4});
  const double sigma = 1.0, s = 1.0;
  SUBCASE("expected block means recover theta exactly") {
    std::vector<std::vector<double>> samples(2);
    for (Index b = 0; b < 2; ++b) {
      const double second = sigma * sigma + theta.squaredNorm() - 2.0 * s * theta(b) + s * s;
      samples[b] = {std::sqrt(second)};
    }
    const NonadaptiveEstimate e = estimate(p, samples, 1.0, sigma, theta.squaredNorm());
    CHECK((e.theta_hat - theta).norm() <= 1e-14);
  }
  SUBCASE("zero estimator") {
    const NonadaptivePlan z = plan(3, 2, 1.0, 1.0);
    CHECK(estimate(z, {}, 1.0, 1.0, 0.25).theta_hat.isZero());
  }
  SUBCASE("empty block") {
    CHECK_THROWS_AS(estimate(p, {{1.0}, {}}, 1.0, 1.0, 0.25), Error);
  }
}

TEST_CASE("the block estimator is unbiased") {
  const VectorXd theta = vec({0.5, -0.4, 0.3, 0.2, -0.1});
  const RegressionInstance inst(theta, 1.0, Design::gaussian_identity(5));
  const NonadaptivePlan p = plan(1000, 5, 1.0, 1.0);
  MatrixStats stats(5, 1);
  for (int r = 0; r < 10000; ++r) {
    QuerySession s(inst, rng_stream(6, static_cast<std::uint64_t>(r)));
    stats.add(estimate(p, run_queries(p, s), 1.0, 1.0, theta.squaredNorm()).theta_hat);
  }
  CHECK(max_standardized_deviation(stats.mean(), stats.stderr_of_mean(), theta) <= 4.0);
}

TEST_CASE("pilot estimate of the squared norm") {
  const VectorXd theta = vec({0.5, -0.4});
  const RegressionInstance inst(theta, 1.0, Design::gaussian_identity(2));
  QuerySession s(inst, rng_stream(7, 0));
  // Var(Z^2) = 2 (1 + |theta|^2)^2 at v = 0
  const double estimate = pilot_norm_sq(s, 200000, 1.0);
  CHECK(std::abs(estimate - theta.squaredNorm()) <= 5.0 * std::sqrt(2.0) * 1.41 / std::sqrt(200000.0));
}

TEST_CASE("risk bound") {
  CHECK(risk_bound(100, 5, 1.0, 1.0) == doctest::Approx(6.25));
  CHECK(risk_bound(10, 5, 1.0, 1.0) == 25.0);
  CHECK(risk_bound(1000000000, 5, 1.0, 1.0) < 1e-6);
  double previous = risk_bound(1, 4, 2.0, 1.0);
  for (std::int64_t k = 2; k < 5000; ++k) {
    const double b = risk_bound(k, 4, 2.0, 1.0);
    REQUIRE(b <= previous);
    previous = b;
  }
}
