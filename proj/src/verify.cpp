#include "zoq/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "zoq/design.hpp"
#include "zoq/hebbian.hpp"
#include "zoq/linalg.hpp"
#include "zoq/moments.hpp"
#include "zoq/oracle.hpp"
#include "zoq/rng.hpp"

namespace zoq {

namespace {

std::string tagged(const std::string& name, Index d, double A) {
  std::ostringstream os;
  os << name << "[d=" << d << ";A=" << A << "]";
  return os.str();
}

VectorXd exp_difference(const VectorXd& u) { return (-u.array()).exp() - u.array().exp(); }

MatrixXd random_spd(RngStream& rng, Index d) {
  MatrixXd m(d, d);
  for (Index j = 0; j < d; ++j)
    for (Index i = 0; i < d; ++i) m(i, j) = rng.normal();
  MatrixXd s = m * m.transpose() + 0.1 * MatrixXd::Identity(d, d);
  return (s + s.transpose()) / 2.0;
}

}  // namespace

std::vector<CheckResult> check_moment_properties(int grid, double mu_scale) {
  double mu_low = -1e300, mu_high = -1e300, c02_gap = -1e300, cr2_gap = -1e300, parity = 0.0, closed = 0.0;
  for (int i = 1; i <= grid; ++i) {
    const double A = static_cast<double>(i) / grid;
    const double m = mu_scale * mu(A);
    mu_low = std::max(mu_low, A * A / 11.0 - m);
    mu_high = std::max(mu_high, m - A * A);
    c02_gap = std::max(c02_gap, c_rq(0, 2, A) - 3.0 * m);
    for (int r : {0, 2, 4}) cr2_gap = std::max(cr2_gap, c_rq(r, 2, A) - 3.0 * std::pow(A, r + 2));
    for (int r = 0; r <= 5; ++r)
      for (int q = 0; q <= 3; ++q)
        if ((r + q) % 2 == 1) parity = std::max(parity, std::abs(c_rq_quadrature(r, q, A)));
    closed = std::max(closed, std::abs(m + c_rq_quadrature(1, 1, A)) / (mu(A)));
  }
  return {make_check("mu_lower_bound", mu_low, 0.0),
          make_check("mu_upper_bound", mu_high, 0.0),
          make_check("c02_le_3mu", c02_gap, 0.0),
          make_check("cr2_bound", cr2_gap, 0.0),
          make_check("odd_moments_vanish", parity, 1e-14),
          make_check("mu_closed_form_vs_quadrature", closed, 1e-10)};
}

std::vector<CheckResult> check_closed_forms(const std::vector<Index>& dims, const std::vector<double>& half_widths,
                                            std::int64_t n, std::uint64_t seed) {
  std::vector<CheckResult> out;
  std::uint64_t cell = 0;
  for (Index d : dims) {
    for (double A : half_widths) {
      RngStream rng = rng_stream(seed, cell++);
      const MomentTable table(A);
      const VectorXd x = sample_standard_normal(rng, d);
      RngStream rv = rng.substream(1), rw = rng.substream(2);
      const McMatrix v_mc = mc_v_matrix(x, A, n, rv);
      const McMatrix w_mc = mc_w_integrand(x, A, n, rw);
      out.push_back(make_check(tagged("v_matrix_vs_mc", d, A),
                               max_standardized_deviation(v_mc.mean, v_mc.se, v_matrix(x, table)), 5.0));
      out.push_back(make_check(tagged("w_integrand_vs_mc", d, A),
                               max_standardized_deviation(w_mc.mean, w_mc.se, w_integrand(x, table)), 5.0));
    }
  }
  return out;
}

std::vector<CheckResult> check_spectral_bounds(const std::vector<Index>& dims, const std::vector<double>& half_widths,
                                               std::int64_t n_x, std::uint64_t seed) {
  std::vector<CheckResult> out;
  std::uint64_t cell = 0;
  for (Index d : dims) {
    for (double A : half_widths) {
      RngStream rng = rng_stream(seed, 1000 + cell++);
      for (auto& c : spectral_bound_checks(A, Design::gaussian_identity(d), n_x, rng)) out.push_back(std::move(c));
    }
  }
  return out;
}

std::vector<CheckResult> check_outer_product_norm(int trials, std::uint64_t seed) {
  RngStream rng = rng_stream(seed, 2000);
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const Index d = 1 + static_cast<Index>(rng.uniform() * 8.0);
    const VectorXd a = sample_standard_normal(rng, d);
    const VectorXd b = sample_standard_normal(rng, d);
    const MatrixXd outer = a * b.transpose();
    const double expected = a.norm() * b.norm();
    worst = std::max(worst, std::abs(power_iteration_norm(outer) - expected) / std::max(1.0, expected));
  }
  return {make_check("outer_product_norm", worst, 1e-8)};
}

std::vector<CheckResult> check_kl_bound(int trials, std::uint64_t seed) {
  RngStream rng = rng_stream(seed, 3000);
  double worst = -1e300, equal = 0.0;
  for (int t = 0; t < trials; ++t) {
    const Index d = 1 + static_cast<Index>(rng.uniform() * 6.0);
    const MatrixXd s0 = random_spd(rng, d);
    const MatrixXd s1 = random_spd(rng, d);
    const MatrixXd l0 = 0.5 * lambda_min(s0) * MatrixXd::Identity(d, d);
    const MatrixXd l1 = 0.5 * lambda_min(s1) * MatrixXd::Identity(d, d);
    const double kl = sym_kl_gaussians(s0, s1);
    const double bound = sym_kl_bound(s0, s1, l0, l1);
    worst = std::max(worst, (kl - bound) / std::max(1.0, bound));
    equal = std::max(equal, std::abs(sym_kl_gaussians(s0, s0)));
  }
  return {make_check("sym_kl_le_bound", worst, 1e-12), make_check("sym_kl_zero_at_equality", equal, 1e-10)};
}

std::vector<CheckResult> check_var_identity(int trials, std::int64_t n, std::uint64_t seed, double mu_scale) {
  RngStream rng = rng_stream(seed, 4000);
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const Index d = 1 + static_cast<Index>(rng.uniform() * 6.0);
    const double A = rng.uniform(0.05, 1.0);
    const double alpha = rng.uniform(0.0, 1.0);
    const VectorXd theta = sample_standard_normal(rng, d);
    const VectorXd theta_star = sample_standard_normal(rng, d);
    const VectorXd x = sample_standard_normal(rng, d);
    const double eps = rng.normal();
    const VectorXd u = sample_uniform_box(rng, d, A);
    const VectorXd u_prime = sample_uniform_box(rng, d, A);

    const double y = x.dot(theta_star) + eps;
    const double z = y - x.dot(theta + u);
    const double z_prime = y - x.dot(theta + u_prime);
    const VectorXd direct = hebbian_step(theta, z, z_prime, u, alpha) - theta_star;
    const VarStep step = var_decompose(theta, theta_star, x, eps, u, u_prime, alpha);
    const double scale = std::max({direct.norm(), (theta - theta_star).norm(), 1e-300});
    worst = std::max(worst, (step.next_error - direct).norm() / scale);
  }

  const Index d = 3;
  const double A = 0.5, alpha = 0.1;
  RngStream mc = rng_stream(seed, 4001);
  const VectorXd theta = sample_standard_normal(mc, d);
  const VectorXd theta_star = sample_standard_normal(mc, d);
  MatrixStats xi(d, 1), G(d, d);
  for (std::int64_t i = 0; i < n; ++i) {
    const VectorXd x = sample_standard_normal(mc, d);
    const double eps = mc.normal();
    const VectorXd u = sample_uniform_box(mc, d, A);
    const VectorXd u_prime = sample_uniform_box(mc, d, A);
    const VarStep step = var_decompose(theta, theta_star, x, eps, u, u_prime, alpha);
    xi.add(step.xi);
    G.add(step.G);
  }
  const MatrixXd expected_g = MatrixXd::Identity(d, d) * (1.0 - 2.0 * alpha * mu_scale * mu(A));
  return {make_check("var_reconstruction", worst, 1e-10),
          make_check("xi_mean_zero", max_standardized_deviation(xi.mean(), xi.stderr_of_mean(), MatrixXd::Zero(d, 1)),
                     5.0),
          make_check("g_mean", max_standardized_deviation(G.mean(), G.stderr_of_mean(), expected_g), 5.0)};
}

std::vector<CheckResult> check_anticipated_loss(std::int64_t n, std::uint64_t seed) {
  const Index d = 3;
  const double A = 0.5;
  RngStream rng = rng_stream(seed, 5000);
  const VectorXd theta = sample_standard_normal(rng, d);
  const VectorXd theta_star = sample_standard_normal(rng, d);
  MatrixStats stats(d, 1);
  for (std::int64_t i = 0; i < n; ++i) {
    const VectorXd x = sample_standard_normal(rng, d);
    const double y = x.dot(theta_star) + rng.normal();
    const VectorXd u = sample_uniform_box(rng, d, A);
    const VectorXd u_prime = sample_uniform_box(rng, d, A);
    const double r = y - x.dot(theta + u_prime);
    stats.add((r * r) * exp_difference(u));
  }
  return {make_check("anticipated_loss_centered",
                     max_standardized_deviation(stats.mean(), stats.stderr_of_mean(), MatrixXd::Zero(d, 1)), 5.0)};
}

std::vector<double> recursion_deviations(const VectorXd& theta0, const VectorXd& theta_star, double alpha,
                                         double half_width, double sigma, int steps, std::int64_t replicates,
                                         std::int64_t n_x, std::uint64_t seed) {
  const Index d = theta0.size();
  const Design design = Design::gaussian_identity(d);
  const RegressionInstance instance(theta_star, sigma, design);

  ScheduleParams schedule;
  schedule.d = d;
  schedule.sigma = sigma;
  schedule.alpha_override = alpha;

  std::vector<MatrixStats> empirical(steps, MatrixStats(d, d));
  for (std::int64_t r = 0; r < replicates; ++r) {
    const RngStream base = rng_stream(seed, static_cast<std::uint64_t>(r));
    QuerySession session(instance, base.substream(2));
    RngStream learner_rng = base.substream(3);
    Learner learner(theta0, half_width, schedule);
    for (int k = 0; k < steps; ++k) {
      hebbian_round(learner, session, learner_rng);
      const VectorXd w = learner.theta() - theta_star;
      empirical[k].add(w * w.transpose());
    }
  }

  RngStream sk_rng = rng_stream(seed ^ 0x5eedULL, 1u << 30);
  ErrorMatrix S = initial_error_matrix(theta0, theta_star);
  std::vector<double> out;
  for (int k = 0; k < steps; ++k) {
    S = sk_step(S, alpha, half_width, sigma, design, n_x, sk_rng);
    const MatrixXd emp_se = empirical[k].stderr_of_mean();
    const MatrixXd combined = (emp_se.array().square() + S.se.array().square()).sqrt().matrix();
    out.push_back(max_standardized_deviation(empirical[k].mean(), combined, S.S));
  }
  return out;
}

std::vector<CheckResult> check_recursion(std::int64_t replicates, std::int64_t n_x, std::uint64_t seed) {
  const double alpha = 1e-3, A = 0.3;
  VectorXd theta_star(3);
  theta_star << 0.5, -0.3, 0.2;
  std::vector<CheckResult> out;
  auto add = [&](const std::string& name, const std::vector<double>& devs) {
    for (std::size_t k = 0; k < devs.size(); ++k)
      out.push_back(make_check(name + "[k=" + std::to_string(k + 1) + "]", devs[k], 4.0));
  };
  add("sk_vs_sim_at_optimum", recursion_deviations(theta_star, theta_star, alpha, A, 1.0, 5, replicates, n_x, seed));
  add("sk_vs_sim_from_zero",
      recursion_deviations(VectorXd::Zero(3), theta_star, alpha, A, 1.0, 5, replicates, n_x, seed + 1));
  // sigma = 0 from the optimum: only alpha^2 W is injected.
  add("noiseless_injection", recursion_deviations(theta_star, theta_star, 0.05, A, 0.0, 1, replicates, n_x, seed + 2));
  return out;
}

std::vector<CheckResult> check_query_law(int points, std::int64_t rounds, std::uint64_t seed) {
  std::vector<CheckResult> out;
  const Index d = 4;
  for (int p = 0; p < points; ++p) {
    RngStream rng = rng_stream(seed, 6000 + static_cast<std::uint64_t>(p));
    const VectorXd theta = sample_standard_normal(rng, d);
    const VectorXd v = sample_standard_normal(rng, d);
    const VectorXd v_prime = sample_standard_normal(rng, d);
    const double sigma = 1.0;
    const RegressionInstance instance(theta, sigma, Design::gaussian_identity(d));
    QuerySession session(instance, rng.substream(1), Protocol::transformed);
    MatrixStats stats(2, 2);
    Eigen::Vector2d zz;
    for (std::int64_t i = 0; i < rounds; ++i) {
      const auto [z, z_prime] = session.query_pair(v, v_prime);
      zz << z, z_prime;
      stats.add(zz * zz.transpose());
    }
    const MatrixXd expected = conditional_covariance(theta, v, v_prime, sigma);
    out.push_back(make_check("query_pair_covariance[point=" + std::to_string(p) + "]",
                             max_standardized_deviation(stats.mean(), stats.stderr_of_mean(), expected), 5.0));
  }
  return out;
}

std::vector<CheckResult> check_adapter(int rounds, std::uint64_t seed) {
  RngStream rng = rng_stream(seed, 7000);
  const Index d = 5;
  const RegressionInstance instance(sample_standard_normal(rng, d), 1.0, Design::gaussian_identity(d));
  TestModeSession session(instance, rng.substream(1));
  double worst_w = 0.0, worst_w_prime = 0.0;
  for (int i = 0; i < rounds; ++i) {
    const VectorXd w = sample_standard_normal(rng, d);
    const VectorXd w_prime = sample_standard_normal(rng, d);
    const AdaptedQueries q = adapt_queries(w, w_prime);
    const auto [z, z_prime] = session.query_pair(q.v, q.v_prime);
    const auto [big_w, big_w_prime] = map_back(z, z_prime);
    const auto& latent = session.latest_latent();
    const double expect_w = latent.y - latent.x.dot(w);
    const double expect_w_prime = latent.x.dot(w_prime);
    worst_w = std::max(worst_w, std::abs(big_w - expect_w) / std::max(1.0, std::abs(expect_w)));
    worst_w_prime =
        std::max(worst_w_prime, std::abs(big_w_prime - expect_w_prime) / std::max(1.0, std::abs(expect_w_prime)));
  }
  return {make_check("adapter_w_identity", worst_w, 1e-12), make_check("adapter_w_prime_identity", worst_w_prime, 1e-12)};
}

namespace {

std::int64_t scaled(std::int64_t n, const VerifyOptions& o) { return o.quick ? std::max<std::int64_t>(n / 10, 1) : n; }

void append(std::vector<CheckResult>& out, std::vector<CheckResult> more) {
  for (auto& c : more) out.push_back(std::move(c));
}

}  // namespace

std::vector<CheckResult> verify_moments(const VerifyOptions& o) {
  std::vector<CheckResult> out = check_moment_properties(50, o.mu_scale);
  append(out, check_closed_forms({2, 4}, {0.25, 0.5}, scaled(1000000, o), o.seed));
  append(out, check_spectral_bounds({2, 4, 8}, {0.25, 0.5}, scaled(100000, o), o.seed));
  append(out, check_outer_product_norm(1000, o.seed));
  append(out, check_kl_bound(1000, o.seed));
  return out;
}

std::vector<CheckResult> verify_recursion(const VerifyOptions& o) {
  std::vector<CheckResult> out = check_var_identity(1000, scaled(1000000, o), o.seed, o.mu_scale);
  append(out, check_anticipated_loss(scaled(1000000, o), o.seed));
  append(out, check_recursion(scaled(200000, o), scaled(1000000, o), o.seed));
  return out;
}

std::vector<CheckResult> verify_querydist(const VerifyOptions& o) {
  std::vector<CheckResult> out = check_query_law(5, scaled(1000000, o), o.seed);
  append(out, check_adapter(1000, o.seed));
  return out;
}

std::vector<CheckResult> verify_all(const VerifyOptions& o) {
  std::vector<CheckResult> out = verify_moments(o);
  append(out, verify_recursion(o));
  append(out, verify_querydist(o));
  return out;
}

std::vector<CheckResult> run_suite(const std::string& name, const VerifyOptions& options) {
  if (name == "moments") return verify_moments(options);
  if (name == "recursion") return verify_recursion(options);
  if (name == "querydist") return verify_querydist(options);
  if (name == "all") return verify_all(options);
  fail(Errc::invalid_argument, "unknown verification suite '" + name + "'");
}

bool all_pass(const std::vector<CheckResult>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

}  // namespace zoq
