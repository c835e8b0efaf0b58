#include "zoq/moments.hpp"

#include <cmath>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace zoq {

namespace {

// Below this half-width the closed forms lose digits to cancellation.
constexpr double kSeriesCutoff = 0.1;

double ipow(double x, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

void require_half_width(double A) {
  if (!(A > 0.0) || !std::isfinite(A)) fail(Errc::invalid_argument, "half-width A must be positive and finite");
}

// 2 * sum over odd m of A^{m+1} / ((m + 2) m!)
double mu_series(double A) {
  double sum = 0.0;
  double a_pow = A * A;  // A^{m+1}
  double fact = 1.0;     // m!
  for (int m = 1; m < 40; m += 2) {
    const double term = a_pow / ((m + 2) * fact);
    sum += term;
    if (term < 1e-18 * sum) break;
    a_pow *= A * A;
    fact *= (m + 1) * (m + 2);
  }
  return 2.0 * sum;
}

// sinh(2A)/A - 2 = 2 * sum_{n >= 1} (2A)^{2n} / (2n + 1)!
double c02_series(double A) {
  const double t = 2.0 * A;
  double sum = 0.0;
  double t_pow = t * t;
  double fact = 6.0;
  for (int n = 1; n < 40; ++n) {
    const double term = t_pow / fact;
    sum += term;
    if (term < 1e-18 * sum) break;
    t_pow *= t * t;
    fact *= (2 * n + 2) * (2 * n + 3);
  }
  return 2.0 * sum;
}

double c02_closed(double A) { return A < kSeriesCutoff ? c02_series(A) : std::sinh(2.0 * A) / A - 2.0; }

void require_psd(const MatrixXd& s, const char* what) {
  require_symmetric(s, what);
  const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
  if (symmetric_eigenvalues(s).minCoeff() < -1e-10 * scale)
    fail(Errc::invalid_argument, std::string(what) + " must be positive semi-definite");
}

MatrixXd symmetrized(const MatrixXd& m) { return (m + m.transpose()) / 2.0; }

}  // namespace

double c_rq_quadrature(int r, int q, double A) {
  require_half_width(A);
  if (r < 0 || q < 0) fail(Errc::invalid_argument, "moment orders must be non-negative");
  auto folded = [r, q](double u) {
    const double e = std::exp(-u) - std::exp(u);
    return ipow(u, r) * ipow(e, q) + ipow(-u, r) * ipow(-e, q);
  };
  double error = 0.0;
  const double integral =
      boost::math::quadrature::gauss_kronrod<double, 31>::integrate(folded, 0.0, A, 15, 1e-12, &error);
  return integral / (2.0 * A);
}

double mu(double A) {
  require_half_width(A);
  if (A < kSeriesCutoff) return mu_series(A);
  return std::exp(A) + std::exp(-A) - (std::exp(A) - std::exp(-A)) / A;
}

double c_rq(int r, int q, double A) {
  require_half_width(A);
  if (r < 0 || q < 0) fail(Errc::invalid_argument, "moment orders must be non-negative");
  if (q == 0) return r % 2 == 0 ? ipow(A, r) / (r + 1) : 0.0;
  if (r == 1 && q == 1) return -mu(A);
  if (r == 0 && q == 2) return c02_closed(A);
  return c_rq_quadrature(r, q, A);
}

MomentTable::MomentTable(double A) : A_(A) {
  require_half_width(A);
  c20_ = c_rq(2, 0, A);
  c40_ = c_rq(4, 0, A);
  c11_ = c_rq(1, 1, A);
  c31_ = c_rq(3, 1, A);
  c02_ = c_rq(0, 2, A);
  c22_ = c_rq(2, 2, A);
  c42_ = c_rq(4, 2, A);
}

double MomentTable::c(int r, int q) const {
  if (r == 0 && q == 0) return 1.0;
  if (q == 0 && r == 2) return c20_;
  if (q == 0 && r == 4) return c40_;
  if (q == 1 && r == 1) return c11_;
  if (q == 1 && r == 3) return c31_;
  if (q == 2 && r == 0) return c02_;
  if (q == 2 && r == 2) return c22_;
  if (q == 2 && r == 4) return c42_;
  return c_rq(r, q, A_);
}

McMatrix mc_v_matrix(const VectorXd& x, double A, std::int64_t n, RngStream& rng) {
  if (n < 1) fail(Errc::invalid_argument, "need at least one draw");
  const Index d = x.size();
  MatrixStats stats(d, d);
  for (std::int64_t i = 0; i < n; ++i) {
    const VectorXd u = sample_uniform_box(rng, d, A);
    const VectorXd u_prime = sample_uniform_box(rng, d, A);
    const VectorXd D = (-u.array()).exp() - u.array().exp();
    const double s = x.dot(u_prime - u);
    stats.add((s * s) * D * D.transpose());
  }
  return to_estimate(stats);
}

McMatrix mc_w_integrand(const VectorXd& x, double A, std::int64_t n, RngStream& rng) {
  if (n < 1) fail(Errc::invalid_argument, "need at least one draw");
  const Index d = x.size();
  MatrixStats stats(d, d);
  for (std::int64_t i = 0; i < n; ++i) {
    const VectorXd u = sample_uniform_box(rng, d, A);
    const VectorXd u_prime = sample_uniform_box(rng, d, A);
    const VectorXd D = (-u.array()).exp() - u.array().exp();
    const double xu = x.dot(u), xu_prime = x.dot(u_prime);
    const double s = xu * xu - xu_prime * xu_prime;
    stats.add((s * s) * D * D.transpose());
  }
  return to_estimate(stats);
}

namespace {

template <typename Integrand>
McMatrix design_average(const Design& design, std::int64_t n_x, RngStream& rng, Integrand&& f) {
  if (n_x < 1) fail(Errc::invalid_argument, "need at least one design draw");
  const Index d = design.dim();
  MatrixStats stats(d, d);
  for (std::int64_t i = 0; i < n_x; ++i) stats.add(f(design.sample(rng)));
  return to_estimate(stats);
}

}  // namespace

McMatrix w_matrix(const Design& design, double A, std::int64_t n_x, RngStream& rng) {
  const MomentTable table(A);
  return design_average(design, n_x, rng, [&](const VectorXd& x) { return w_integrand(x, table); });
}

McMatrix expected_v_matrix(const Design& design, double A, std::int64_t n_x, RngStream& rng) {
  const MomentTable table(A);
  return design_average(design, n_x, rng, [&](const VectorXd& x) { return v_matrix(x, table); });
}

McMatrix expected_weighted_v_matrix(const Design& design, double A, std::int64_t n_x, RngStream& rng) {
  const MomentTable table(A);
  return design_average(design, n_x, rng,
                        [&](const VectorXd& x) -> MatrixXd { return x.squaredNorm() * v_matrix(x, table); });
}

ErrorMatrix initial_error_matrix(const VectorXd& theta0, const VectorXd& theta_star) {
  require_size(theta0.size(), theta_star.size(), "theta0");
  const VectorXd w = theta0 - theta_star;
  return {w * w.transpose(), MatrixXd::Zero(w.size(), w.size()), 0};
}

ErrorMatrix sk_step(const ErrorMatrix& prev, double alpha, double A, double sigma, const Design& design,
                    std::int64_t n_x, RngStream& rng) {
  const Index d = design.dim();
  require_size(prev.S.rows(), d, "S_prev");
  require_size(prev.S.cols(), d, "S_prev");
  require_psd(prev.S, "S_prev");
  if (n_x < 1) fail(Errc::invalid_argument, "need at least one design draw");

  ErrorMatrix next;
  next.k = prev.k + 1;
  if (alpha == 0.0) {
    next.S = prev.S;
    next.se = prev.se;
    return next;
  }

  const MomentTable table(A);
  const double m = table.mu();
  const MatrixXd& Q = design.second_moment();
  const MatrixXd T = MatrixXd::Identity(d, d) - (2.0 * alpha * m) * Q;

  // All three design expectations enter through one per-draw integrand.
  MatrixStats stats(d, d);
  for (std::int64_t i = 0; i < n_x; ++i) {
    const VectorXd x = design.sample(rng);
    const double quad = x.dot(prev.S * x);
    stats.add((4.0 * alpha * alpha * (quad + sigma * sigma)) * v_matrix(x, table) +
              (alpha * alpha) * w_integrand(x, table));
  }

  next.S = symmetrized(T * prev.S * T - (4.0 * alpha * alpha * m * m) * Q * prev.S * Q + stats.mean());
  const MatrixXd se = stats.stderr_of_mean();
  const MatrixXd prev_se = prev.se.size() == 0 ? MatrixXd::Zero(d, d) : prev.se;
  next.se = (prev_se.array().square() + se.array().square()).sqrt().matrix();
  return next;
}

std::vector<CheckResult> spectral_bound_checks(double A, const Design& design, std::int64_t n_x, RngStream& rng) {
  const Index d = design.dim();
  const double dd = static_cast<double>(d);
  const double A4 = A * A * A * A;

  std::ostringstream tag;
  tag << "[d=" << d << ";A=" << A << "]";

  auto check = [&](const std::string& name, const McMatrix& est, double bound) {
    const MatrixXd gap = symmetrized(est.mean) - bound * MatrixXd::Identity(d, d);
    return make_check(name + tag.str(), lambda_max(gap), 5.0 * est.se.norm());
  };

  std::vector<CheckResult> out;
  RngStream r1 = rng.substream(1), r2 = rng.substream(2), r3 = rng.substream(3);
  out.push_back(check("expected_v_bound", expected_v_matrix(design, A, n_x, r1), 12.0 * A4 * dd * design.max_moment(2)));
  out.push_back(check("weighted_v_bound", expected_weighted_v_matrix(design, A, n_x, r2),
                      12.0 * A4 * dd * dd * design.max_moment(4)));
  out.push_back(
      check("w_bound", w_matrix(design, A, n_x, r3), 107.0 * A4 * A * A * dd * dd * design.moment_bound(4)));
  return out;
}

}  // namespace zoq
