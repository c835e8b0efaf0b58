// zoq: simulate the two-query zeroth-order learner, compare it with the
// non-adaptive block design, and run the verification suites.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "zoq/config.hpp"
#include "zoq/csv.hpp"
#include "zoq/harness.hpp"
#include "zoq/verify.hpp"

namespace fs = std::filesystem;

namespace {

std::ofstream open_output(const std::string& dir, const std::string& name) {
  fs::create_directories(dir);
  const fs::path path = fs::path(dir) / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) zoq::fail(zoq::Errc::invalid_argument, "cannot write " + path.string());
  return out;
}

std::vector<zoq::Index> parse_dims(const std::string& text) {
  std::vector<zoq::Index> dims;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    const long long v = std::stoll(item, &used);
    if (used != item.size() || v < 1) zoq::fail(zoq::Errc::invalid_argument, "bad dimension '" + item + "'");
    dims.push_back(static_cast<zoq::Index>(v));
  }
  return dims;
}

int simulate_adaptive(const zoq::SimConfig& config, const std::string& out_dir) {
  const zoq::AdaptiveRun run = zoq::run_adaptive(config);
  auto traj = open_output(out_dir, "trajectories.csv");
  zoq::write_trajectories_csv(traj, run);

  const auto curve = zoq::mean_curve(run);
  auto summary = open_output(out_dir, "summary.csv");
  zoq::CsvWriter csv(summary);
  csv.header({"k", "mean_sq_error", "stderr", "mean_excess_risk", "n", "regime"});
  std::vector<double> xs, ys;
  for (const auto& p : curve) {
    csv.field(p.k).field(p.mean_sq_error).field(p.stderr_sq_error).field(p.mean_excess_risk).field(p.n);
    csv.field(p.theorem_regime ? zoq::kTheoremRegime : zoq::kOutsideRegime);
    csv.end_row();
    if (static_cast<double>(p.k) > run.burn_in && p.mean_sq_error > 0.0) {
      xs.push_back(static_cast<double>(p.k));
      ys.push_back(p.mean_sq_error);
    }
  }

  std::cout << "replicates " << run.trajectories.size() << ", diverged " << run.diverged << "\n";
  std::cout << "A " << zoq::format_number(run.half_width) << ", B " << zoq::format_number(run.schedule.B())
            << ", burn-in k > " << zoq::format_number(run.burn_in) << "\n";
  if (xs.size() >= 3) {
    const auto fit = zoq::fit_rate(xs, ys);
    std::cout << "slope of mean sq_error past burn-in: " << zoq::format_number(fit.slope) << " +/- "
              << zoq::format_number(fit.slope_stderr) << " (" << xs.size() << " points)\n";
  } else {
    std::cout << "fewer than 3 logged rounds past burn-in; no slope fitted\n";
  }
  std::cout << "note: rates are fitted on the mean squared error (trace of S_k), which bounds the operator norm "
               "up to a factor d\n";
  return 0;
}

int simulate_nonadaptive(const zoq::SimConfig& config, const std::string& out_dir) {
  const zoq::RiskSummary s = zoq::run_nonadaptive(config);
  auto out = open_output(out_dir, "nonadaptive.csv");
  zoq::write_nonadaptive_csv(out, s);
  std::cout << "mean sq_error " << zoq::format_number(s.mean_sq_error) << " +/- "
            << zoq::format_number(s.stderr_sq_error) << ", bound " << zoq::format_number(s.bound) << "\n";
  if (config.estimator == zoq::EstimatorMode::plug_in)
    std::cout << "plug-in mode: |theta|^2 estimated from a pilot; the risk bound is not guaranteed\n";
  return 0;
}

int gap(const zoq::SimConfig& config, const std::string& dims_text, const std::string& out_dir) {
  const zoq::GapResult r = zoq::run_gap_experiment(config, parse_dims(dims_text));
  auto out = open_output(out_dir, "sweep.csv");
  zoq::write_sweep_csv(out, r.rows);

  auto fits = open_output(out_dir, "exponents.csv");
  zoq::CsvWriter csv(fits);
  csv.header({"k", "strategy", "d_exponent", "stderr", "r_squared"});
  for (const auto& f : r.fits) {
    csv.field(f.k).field("adaptive").field(f.adaptive.slope).field(f.adaptive.slope_stderr).field(f.adaptive.r_squared);
    csv.end_row();
    csv.field(f.k).field("nonadaptive").field(f.nonadaptive.slope).field(f.nonadaptive.slope_stderr);
    csv.field(f.nonadaptive.r_squared);
    csv.end_row();
    std::cout << "k " << f.k << ": adaptive exponent " << zoq::format_number(f.adaptive.slope) << ", nonadaptive "
              << zoq::format_number(f.nonadaptive.slope) << "\n";
  }
  std::cout << "diverged " << r.diverged << " of " << r.adaptive_runs << " adaptive runs\n";
  return 0;
}

int verify(const std::string& suite, const zoq::VerifyOptions& options, const std::string& out_dir) {
  const auto checks = zoq::run_suite(suite, options);
  if (out_dir.empty()) {
    zoq::write_checks_csv(std::cout, checks);
  } else {
    auto out = open_output(out_dir, "verify_" + suite + ".csv");
    zoq::write_checks_csv(out, checks);
    for (const auto& c : checks)
      if (!c.pass) std::cout << "FAIL " << c.name << " " << zoq::format_number(c.statistic) << "\n";
  }
  const bool ok = zoq::all_pass(checks);
  std::cerr << (ok ? "all checks passed" : "some checks failed") << "\n";
  return ok ? 0 : 1;
}

int rates(const std::string& path, const std::string& xcol, const std::string& ycol, const std::string& filter,
          double min_x) {
  std::ifstream in(path);
  if (!in) zoq::fail(zoq::Errc::invalid_argument, "cannot read " + path);
  const zoq::CsvTable table = zoq::read_csv(in);
  const std::size_t xi = table.column(xcol), yi = table.column(ycol);

  std::size_t fi = 0;
  std::string fvalue;
  if (!filter.empty()) {
    const auto eq = filter.find('=');
    if (eq == std::string::npos) zoq::fail(zoq::Errc::invalid_argument, "--filter expects col=value");
    fi = table.column(filter.substr(0, eq));
    fvalue = filter.substr(eq + 1);
  }

  std::vector<double> xs, ys;
  for (const auto& row : table.rows) {
    if (!filter.empty() && row[fi] != fvalue) continue;
    const double x = std::stod(row[xi]);
    if (x < min_x) continue;
    xs.push_back(x);
    ys.push_back(std::stod(row[yi]));
  }
  const zoq::RateFit fit = zoq::fit_rate(xs, ys);
  zoq::CsvWriter csv(std::cout);
  csv.header({"slope", "slope_stderr", "intercept", "r_squared", "points"});
  csv.field(fit.slope).field(fit.slope_stderr).field(fit.intercept).field(fit.r_squared);
  csv.field(static_cast<std::int64_t>(xs.size()));
  csv.end_row();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"zeroth-order query learner: simulation and verification"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".", dims = "8,16,32";

  auto* sim = app.add_subcommand("simulate", "run one strategy over replicates");
  sim->require_subcommand(1);
  auto* sim_adaptive = sim->add_subcommand("adaptive", "Hebbian two-query learner");
  auto* sim_nonadaptive = sim->add_subcommand("nonadaptive", "block design with one query per round");
  for (auto* sc : {sim_adaptive, sim_nonadaptive}) {
    sc->add_option("--config", config_path, "config file")->required()->check(CLI::ExistingFile);
    sc->add_option("--out", out_dir, "output directory");
  }

  auto* gap_cmd = app.add_subcommand("gap", "adaptive vs non-adaptive risk across dimensions");
  gap_cmd->add_option("--dims", dims, "comma-separated dimensions");
  gap_cmd->add_option("--config", config_path, "config file")->required()->check(CLI::ExistingFile);
  gap_cmd->add_option("--out", out_dir, "output directory")->required();

  std::string suite;
  std::string verify_out;
  zoq::VerifyOptions vopts;
  auto* verify_cmd = app.add_subcommand("verify", "run verification suites");
  verify_cmd->add_option("suite", suite, "moments | recursion | querydist | all")
      ->required()
      ->check(CLI::IsMember({"moments", "recursion", "querydist", "all"}));
  verify_cmd->add_option("--config", config_path, "config file (its seed is used)")->check(CLI::ExistingFile);
  verify_cmd->add_option("--seed", vopts.seed, "seed (overrides the config)");
  verify_cmd->add_option("--out", verify_out, "write verify_<suite>.csv here instead of stdout");
  verify_cmd->add_flag("--quick", vopts.quick, "Monte Carlo sizes divided by 10");
  verify_cmd->add_option("--tamper-mu", vopts.mu_scale, "scale mu in the checks (mutation test)");

  std::string in_path, xcol = "k", ycol = "mean_risk", filter;
  double min_x = 0.0;
  auto* rates_cmd = app.add_subcommand("rates", "log-log slope of one CSV column against another");
  rates_cmd->add_option("--in", in_path, "CSV file")->required()->check(CLI::ExistingFile);
  rates_cmd->add_option("--xcol", xcol, "x column");
  rates_cmd->add_option("--ycol", ycol, "y column");
  rates_cmd->add_option("--filter", filter, "keep rows with col=value");
  rates_cmd->add_option("--min-x", min_x, "drop rows with x below this");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim_adaptive->parsed()) return simulate_adaptive(zoq::load_config(config_path), out_dir);
    if (sim_nonadaptive->parsed()) return simulate_nonadaptive(zoq::load_config(config_path), out_dir);
    if (gap_cmd->parsed()) return gap(zoq::load_config(config_path), dims, out_dir);
    if (verify_cmd->parsed()) {
      if (!config_path.empty() && verify_cmd->count("--seed") == 0) vopts.seed = zoq::load_config(config_path).seed;
      return verify(suite, vopts, verify_out);
    }
    if (rates_cmd->parsed()) return rates(in_path, xcol, ycol, filter, min_x);
  } catch (const zoq::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
