#ifndef ZOQ_MOMENTS_HPP
#define ZOQ_MOMENTS_HPP

#include <array>
#include <cstdint>
#include <vector>

#include "zoq/core.hpp"
#include "zoq/design.hpp"
#include "zoq/linalg.hpp"
#include "zoq/rng.hpp"
#include "zoq/stats.hpp"

namespace zoq {

/// c_{r,q} = E[U^r (e^{-U} - e^{U})^q] for U ~ Unif[-A, A], by adaptive
/// Gauss-Kronrod quadrature (relative tolerance 1e-12).
///
/// The integral is folded onto [0, A] as f(u) + f(-u); for odd r + q the two
/// terms cancel exactly and the result is 0.
double c_rq_quadrature(int r, int q, double A);

/// c_{r,q} from closed forms where available, quadrature otherwise.
double c_rq(int r, int q, double A);

/// mu(A) = -c_{1,1} = e^A + e^{-A} - (e^A - e^{-A}) / A.
double mu(double A);

/// c_{r,q} for the pairs entering the interaction-matrix closed forms.
class MomentTable {
 public:
  explicit MomentTable(double A);

  double A() const { return A_; }
  double mu() const { return -c11_; }

  double c00() const { return 1.0; }
  double c20() const { return c20_; }
  double c40() const { return c40_; }
  double c11() const { return c11_; }
  double c31() const { return c31_; }
  double c02() const { return c02_; }
  double c22() const { return c22_; }
  double c42() const { return c42_; }

  /// Any (r, q); stored values for the table pairs.
  double c(int r, int q) const;

 private:
  double A_;
  double c20_, c40_, c11_, c31_, c02_, c22_, c42_;
};

/// V(x) = E[(x^T (U' - U))^2 D D^T] with D = e^{-U} - e^{U}, in closed form.
template <typename Derived>
Matrix<typename Derived::Scalar> v_matrix(const Eigen::MatrixBase<Derived>& x, const MomentTable& m) {
  using Scalar = typename Derived::Scalar;
  const Scalar c11_sq = Scalar(m.c11() * m.c11());
  const Scalar diag_coef = Scalar(m.c22() - m.c20() * m.c02()) - 2 * c11_sq;
  const Scalar iso_coef = Scalar(2 * m.c20() * m.c02()) * x.squaredNorm();

  Matrix<Scalar> v = (2 * c11_sq) * x * x.transpose();
  v.diagonal().array() += diag_coef * x.array().square() + iso_coef;
  return v;
}

/// Inner expectation over (U, U') of ((x^T U)^2 - (x^T U')^2)^2 D D^T at fixed x.
template <typename Derived>
Matrix<typename Derived::Scalar> w_integrand(const Eigen::MatrixBase<Derived>& x, const MomentTable& m) {
  using Scalar = typename Derived::Scalar;
  const Scalar c20 = Scalar(m.c20()), c40 = Scalar(m.c40()), c11 = Scalar(m.c11()), c31 = Scalar(m.c31());
  const Scalar c02 = Scalar(m.c02()), c22 = Scalar(m.c22()), c42 = Scalar(m.c42());

  const Vector<Scalar> x2 = x.array().square();
  const Vector<Scalar> x3 = x.array().cube();
  const Vector<Scalar> x4 = x2.array().square();
  const Scalar norm2 = x2.sum();
  const Scalar norm_x2_sq = x4.sum();

  const Scalar a_quartic = c42 - 6 * c20 * c22 + 6 * c20 * c20 * c02 - c40 * c02 - 8 * c31 * c11 +
                           24 * c20 * c11 * c11;
  const Scalar a_weighted = 4 * c20 * c22 - 4 * c20 * c20 * c02 - 8 * c20 * c11 * c11;
  const Scalar a_cubic = 4 * c31 * c11 - 12 * c20 * c11 * c11;
  const Scalar a_outer = 8 * c20 * c11 * c11;
  const Scalar a_iso = (2 * c40 * c02 - 6 * c20 * c20 * c02) * norm_x2_sq + 4 * c20 * c20 * c02 * norm2 * norm2;

  Matrix<Scalar> w = a_cubic * (x3 * x.transpose() + x * x3.transpose());
  w.noalias() += (a_outer * norm2) * x * x.transpose();
  w.diagonal().array() += a_quartic * x4.array() + (a_weighted * norm2) * x2.array() + a_iso;
  return w;
}

/// Sample mean of (x^T (U' - U))^2 D D^T over n draws of (U, U').
McMatrix mc_v_matrix(const VectorXd& x, double A, std::int64_t n, RngStream& rng);

/// Sample mean of ((x^T U)^2 - (x^T U')^2)^2 D D^T over n draws of (U, U').
McMatrix mc_w_integrand(const VectorXd& x, double A, std::int64_t n, RngStream& rng);

/// W = E_X[w_integrand(X)] averaged over n_x design draws.
McMatrix w_matrix(const Design& design, double A, std::int64_t n_x, RngStream& rng);

/// E[V(X)] averaged over n_x design draws.
McMatrix expected_v_matrix(const Design& design, double A, std::int64_t n_x, RngStream& rng);

/// E[|X|^2 V(X)] averaged over n_x design draws.
McMatrix expected_weighted_v_matrix(const Design& design, double A, std::int64_t n_x, RngStream& rng);

/// S_k = E[(theta_k - theta*)(theta_k - theta*)^T] with its accumulated Monte Carlo error.
struct ErrorMatrix {
  MatrixXd S;
  MatrixXd se;
  std::int64_t k = 0;
};

ErrorMatrix initial_error_matrix(const VectorXd& theta0, const VectorXd& theta_star);

/// One step of the exact second-moment recursion
///
///   S_k = (I - 2 a mu Q) S (I - 2 a mu Q) + 4 a^2 (E[X^T S X V(X)] - mu^2 Q S Q)
///         + 4 a^2 sigma^2 E[V(X)] + a^2 W.
///
/// The three design expectations share n_x draws of X; expectations over
/// (U, U') are exact.
ErrorMatrix sk_step(const ErrorMatrix& prev, double alpha, double A, double sigma, const Design& design,
                    std::int64_t n_x, RngStream& rng);

/// Loewner bounds E[V(X)] <= 12 A^4 d max E[X_i^2] I,
/// E[|X|^2 V(X)] <= 12 A^4 d^2 max E[X_i^4] I and
/// W <= 107 A^6 d^2 max(1, E[X_i^4]) I, each checked as
/// lambda_max(estimate - bound I) <= 5 |se|_F.
std::vector<CheckResult> spectral_bound_checks(double A, const Design& design, std::int64_t n_x, RngStream& rng);

/// 1/2 tr(S1 S0^-1) + 1/2 tr(S0 S1^-1) - dim for centered Gaussians.
template <typename Scalar>
Scalar sym_kl_gaussians(const Matrix<Scalar>& s0, const Matrix<Scalar>& s1) {
  require_symmetric(s0, "Sigma0");
  require_symmetric(s1, "Sigma1");
  require_size(s1.rows(), s0.rows(), "Sigma1");
  Eigen::LLT<Matrix<Scalar>> l0(s0), l1(s1);
  if (l0.info() != Eigen::Success || l1.info() != Eigen::Success)
    fail(Errc::invalid_argument, "covariances must be positive definite");
  const Scalar t01 = l0.solve(s1).trace();
  const Scalar t10 = l1.solve(s0).trace();
  return (t01 + t10) / 2 - Scalar(s0.rows());
}

/// 1/2 tr(L0^-1 (S1 - S0) L1^-1 (S1 - S0)), an upper bound on sym_kl_gaussians(S0, S1)
/// whenever S0 >= L0 and S1 >= L1 in Loewner order.
template <typename Scalar>
Scalar sym_kl_bound(const Matrix<Scalar>& s0, const Matrix<Scalar>& s1, const Matrix<Scalar>& l0,
                    const Matrix<Scalar>& l1) {
  for (const auto* m : {&s0, &s1, &l0, &l1}) require_symmetric(*m, "KL bound input");
  Eigen::LLT<Matrix<Scalar>> f0(l0), f1(l1);
  if (f0.info() != Eigen::Success || f1.info() != Eigen::Success)
    fail(Errc::invalid_argument, "Lambda matrices must be positive definite");
  const Matrix<Scalar> delta = s1 - s0;
  const Matrix<Scalar> a = f0.solve(delta);
  const Matrix<Scalar> b = f1.solve(delta);
  return (a * b).trace() / 2;
}

}  // namespace zoq

#endif  // ZOQ_MOMENTS_HPP
