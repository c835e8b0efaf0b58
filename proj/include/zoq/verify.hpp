#ifndef ZOQ_VERIFY_HPP
#define ZOQ_VERIFY_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "zoq/core.hpp"
#include "zoq/stats.hpp"

namespace zoq {

struct VerifyOptions {
  std::uint64_t seed = 20240601;
  /// Monte Carlo sizes divided by 10.
  bool quick = false;
  /// Multiplies every mu value the checks compare against (mutation testing).
  double mu_scale = 1.0;
};

// Individual check groups. Each returns named pass/fail verdicts.

/// mu bounds, c_{0,2} <= 3 mu, c_{r,2} <= 3 A^{r+2}, parity zeros and closed form vs quadrature
/// on an even grid of `grid` values of A in (0, 1].
std::vector<CheckResult> check_moment_properties(int grid, double mu_scale = 1.0);

/// v_matrix and w_integrand against their Monte Carlo oracles at n draws (5 stderr).
std::vector<CheckResult> check_closed_forms(const std::vector<Index>& dims, const std::vector<double>& half_widths,
                                            std::int64_t n, std::uint64_t seed);

/// Loewner bounds on E[V(X)], E[|X|^2 V(X)] and W for a N(0, I) design.
std::vector<CheckResult> check_spectral_bounds(const std::vector<Index>& dims, const std::vector<double>& half_widths,
                                               std::int64_t n_x, std::uint64_t seed);

/// Power-iteration norm of a b^T against |a| |b|.
std::vector<CheckResult> check_outer_product_norm(int trials, std::uint64_t seed);

/// sym_kl <= sym_kl_bound on random PD pairs with Lambda = lambda_min(S) / 2 I, and zero at equality.
std::vector<CheckResult> check_kl_bound(int trials, std::uint64_t seed);

/// Reconstruction of the direct update from (G, xi) on random inputs, and the
/// Monte Carlo means of xi and G at d = 3.
std::vector<CheckResult> check_var_identity(int trials, std::int64_t n, std::uint64_t seed, double mu_scale = 1.0);

/// E[(Y - X^T(theta + U'))^2 (e^{-U} - e^{U})] = 0 by Monte Carlo.
std::vector<CheckResult> check_anticipated_loss(std::int64_t n, std::uint64_t seed);

/// Entrywise max over steps of |empirical E[W_k W_k^T] - S_k| / combined stderr.
std::vector<double> recursion_deviations(const VectorXd& theta0, const VectorXd& theta_star, double alpha,
                                         double half_width, double sigma, int steps, std::int64_t replicates,
                                         std::int64_t n_x, std::uint64_t seed);

/// Second-moment recursion against brute-force learners at d = 3 (4 combined stderr),
/// from theta0 = theta* and from theta0 = 0, plus the noiseless one-step injection.
std::vector<CheckResult> check_recursion(std::int64_t replicates, std::int64_t n_x, std::uint64_t seed);

/// Empirical second moment of (Z, Z') in the transformed protocol against
/// conditional_covariance at `points` random (theta, v, v').
std::vector<CheckResult> check_query_law(int points, std::int64_t rounds, std::uint64_t seed);

/// W = Y - X^T w and W' = X^T w' through adapt_queries / map_back, using latent access.
std::vector<CheckResult> check_adapter(int rounds, std::uint64_t seed);

// Suites behind the `verify` subcommand.
std::vector<CheckResult> verify_moments(const VerifyOptions& options);
std::vector<CheckResult> verify_recursion(const VerifyOptions& options);
std::vector<CheckResult> verify_querydist(const VerifyOptions& options);
std::vector<CheckResult> verify_all(const VerifyOptions& options);

/// "moments", "recursion", "querydist" or "all".
std::vector<CheckResult> run_suite(const std::string& name, const VerifyOptions& options);

bool all_pass(const std::vector<CheckResult>& checks);

}  // namespace zoq

#endif  // ZOQ_VERIFY_HPP
