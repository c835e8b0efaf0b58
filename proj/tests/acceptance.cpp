// One PASS/FAIL line per acceptance criterion. Exit status is nonzero if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "zoq/harness.hpp"
#include "zoq/nonadaptive.hpp"
#include "zoq/oracle.hpp"
#include "zoq/verify.hpp"

#ifndef ZOQ_CONFIG_DIR
#define ZOQ_CONFIG_DIR "configs"
#endif

using namespace zoq;

namespace {

constexpr std::uint64_t kSeed = 20240601;

struct Verdict {
  bool pass = true;
  std::string detail;
};

// Worst check of a group, reported with its name.
Verdict from_checks(const std::vector<CheckResult>& checks) {
  Verdict v;
  const CheckResult* worst = nullptr;
  double worst_ratio = -HUGE_VAL;
  int failed = 0;
  for (const auto& c : checks) {
    if (!c.pass) ++failed;
    const double ratio = (c.statistic - c.threshold) / std::max(std::abs(c.threshold), 1e-12);
    if (ratio > worst_ratio) {
      worst_ratio = ratio;
      worst = &c;
    }
  }
  v.pass = failed == 0 && !checks.empty();
  std::ostringstream out;
  out << checks.size() << " checks, " << failed << " failed";
  if (worst) out << "; tightest " << worst->name << " = " << worst->statistic << " vs " << worst->threshold;
  v.detail = out.str();
  return v;
}

int failures = 0;

void criterion(int id, const std::string& title, double limit_seconds, const std::function<Verdict()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("error: ") + e.what()};
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool in_time = seconds < limit_seconds;
  const bool pass = v.pass && in_time;
  if (!pass) ++failures;
  std::printf("criterion %2d %-32s %s  (%s; %.1f s, limit %.0f s%s)\n", id, title.c_str(), pass ? "PASS" : "FAIL",
              v.detail.c_str(), seconds, limit_seconds, in_time ? "" : ", over time");
  std::fflush(stdout);
}

std::int64_t diverged_runs = 0;
std::int64_t total_runs = 0;

}  // namespace

int main() {
  criterion(1, "moment properties", 1, [] { return from_checks(check_moment_properties(50)); });

  criterion(2, "closed forms vs Monte Carlo", 30,
            [] { return from_checks(check_closed_forms({2, 4}, {0.25, 0.5}, 1000000, kSeed)); });

  criterion(3, "VAR identity and centering", 60,
            [] { return from_checks(check_var_identity(1000, 1000000, kSeed)); });

  criterion(4, "second-moment recursion", 300,
            [] { return from_checks(check_recursion(200000, 1000000, kSeed)); });

  criterion(5, "spectral bounds", 120,
            [] { return from_checks(check_spectral_bounds({2, 4, 8}, {0.25, 0.5}, 100000, kSeed)); });

  criterion(6, "query-pair law", 30, [] { return from_checks(check_query_law(5, 1000000, kSeed)); });

  criterion(7, "two-query adapter", 1, [] { return from_checks(check_adapter(1000, kSeed)); });

  criterion(8, "k-rate", 600, [] {
    const SimConfig c = load_config(ZOQ_CONFIG_DIR "/krate.conf");
    const AdaptiveRun run = run_adaptive(c);
    diverged_runs += run.diverged;
    total_runs += static_cast<std::int64_t>(run.trajectories.size());
    std::vector<double> xs, ys;
    for (const auto& p : mean_curve(run)) {
      if (static_cast<double>(p.k) > run.burn_in && p.mean_sq_error > 0.0) {
        xs.push_back(static_cast<double>(p.k));
        ys.push_back(p.mean_sq_error);
      }
    }
    const RateFit fit = fit_rate(xs, ys);
    std::ostringstream out;
    out << "slope " << fit.slope << " +/- " << fit.slope_stderr << " over " << xs.size()
        << " rounds past burn-in, target [-1.25, -0.75]";
    return Verdict{fit.slope >= -1.25 && fit.slope <= -0.75, out.str()};
  });

  criterion(9, "non-adaptive estimator", 180, [] {
    Verdict v;
    std::ostringstream out;
    {
      SimConfig c = parse_config_string("d = 5\nk = 1000\nR = 1\nsigma = 1\nreplicates = 10000\n");
      c.seed = kSeed;
      c.theta_star = {ThetaStarSpec::Kind::explicit_vector, 0.0, VectorXd(5)};
      c.theta_star.values << 0.5, -0.4, 0.3, 0.2, -0.1;
      const RiskSummary s = run_nonadaptive(c);
      const double z = max_standardized_deviation(s.mean_error, s.stderr_error, VectorXd::Zero(5));
      v.pass = z <= 4.0;
      out << "bias " << z << " stderr (max 4)";
    }
    double worst = -1e300;
    for (Index d : {2, 5, 10}) {
      for (std::int64_t k : {1000, 4000, 16000}) {
        SimConfig c = parse_config_string("R = 1\nsigma = 1\nreplicates = 400\n");
        c.d = d;
        c.k = k;
        c.seed = kSeed + static_cast<std::uint64_t>(d * 100000 + k);
        const RiskSummary s = run_nonadaptive(c);
        const double margin = (s.mean_sq_error - s.bound) / s.stderr_sq_error;
        worst = std::max(worst, margin);
        if (s.mean_sq_error > s.bound + 5.0 * s.stderr_sq_error) v.pass = false;
      }
    }
    out << "; risk minus bound at most " << worst << " stderr over 9 cells (max 5)";
    v.detail = out.str();
    return v;
  });

  criterion(10, "adaptive/non-adaptive gap", 1200, [] {
    const SimConfig c = load_config(ZOQ_CONFIG_DIR "/gap.conf");
    const GapResult g = run_gap_experiment(c, {8, 16, 32});
    diverged_runs += g.diverged;
    total_runs += g.adaptive_runs;
    const GapFit& fit = g.fits.back();
    const double a = fit.adaptive.slope, n = fit.nonadaptive.slope;
    std::ostringstream out;
    out << "k " << fit.k << ": non-adaptive exponent " << n << " (>= 2.6), adaptive " << a
        << " (<= 2.6), separation " << n - a << " (>= 0.5)";
    return Verdict{n >= 2.6 && a <= 2.6 && n - a >= 0.5, out.str()};
  });

  criterion(11, "symmetrized KL bound", 5, [] { return from_checks(check_kl_bound(1000, kSeed)); });

  criterion(12, "reproducibility and divergence", 120, [] {
    Verdict v;
    std::ostringstream out;
    const SimConfig adaptive = parse_config_string("d = 6\nk = 20000\nreplicates = 8\nseed = 3\nb_override = 0.025\n");
    const SimConfig fixed = parse_config_string("d = 6\nk = 2000\nreplicates = 50\nseed = 3\n");
    const SimConfig gap = parse_config_string("replicates = 3\nseed = 3\nb_override = 0.025\ngap_c = 1,2\n");
    const std::vector<std::pair<std::string, std::function<std::string()>>> outputs = {
        {"trajectories",
         [&] {
           std::ostringstream s;
           write_trajectories_csv(s, run_adaptive(adaptive));
           return s.str();
         }},
        {"nonadaptive",
         [&] {
           std::ostringstream s;
           write_nonadaptive_csv(s, run_nonadaptive(fixed));
           return s.str();
         }},
        {"sweep",
         [&] {
           std::ostringstream s;
           write_sweep_csv(s, run_gap_experiment(gap, {2, 3, 4}).rows);
           return s.str();
         }},
        {"verify",
         [&] {
           std::ostringstream s;
           VerifyOptions o;
           o.quick = true;
           write_checks_csv(s, verify_querydist(o));
           return s.str();
         }},
    };
    int identical = 0;
    for (const auto& [name, produce] : outputs) {
      if (produce() == produce()) ++identical;
      else {
        v.pass = false;
        out << name << " differs; ";
      }
    }
    out << identical << "/" << outputs.size() << " outputs byte-identical";
    if (total_runs == 0) {
      v.pass = false;
      out << "; no adaptive runs recorded";
    } else {
      const double fraction = static_cast<double>(diverged_runs) / static_cast<double>(total_runs);
      if (fraction > 0.001) v.pass = false;
      out << "; diverged " << diverged_runs << " of " << total_runs << " runs (max 0.1%)";
    }
    v.detail = out.str();
    return v;
  });

  std::printf("%d of 12 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
