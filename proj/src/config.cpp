#include "zoq/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace zoq {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double value = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return value;
  } catch (const std::exception&) {
    fail(Errc::invalid_config, "key '" + key + "': cannot parse number '" + text + "'");
  }
}

std::int64_t parse_int(const std::string& key, const std::string& text) {
  std::int64_t value = 0;
  // accept scientific shorthand such as 2e5 for round counts
  if (text.find_first_of("eE.") != std::string::npos) {
    const double as_double = parse_double(key, text);
    if (as_double != std::floor(as_double) || std::abs(as_double) > 9e18)
      fail(Errc::invalid_config, "key '" + key + "': expected an integer, got '" + text + "'");
    return static_cast<std::int64_t>(as_double);
  }
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size())
    fail(Errc::invalid_config, "key '" + key + "': expected an integer, got '" + text + "'");
  return value;
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(key, trim(item)));
  if (out.empty()) fail(Errc::invalid_config, "key '" + key + "': empty list");
  return out;
}

VectorXd to_vector(const std::vector<double>& values) {
  return Eigen::Map<const VectorXd>(values.data(), static_cast<Index>(values.size()));
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  fail(Errc::invalid_config, "key '" + key + "': expected true or false, got '" + text + "'");
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_list(const VectorXd& v) {
  std::string out;
  for (Index i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += format_double(v[i]);
  }
  return out;
}

}  // namespace

void SimConfig::validate() const {
  auto bad = [](const std::string& what) { fail(Errc::invalid_config, what); };
  if (d < 1) bad("d must be at least 1");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) bad("sigma must be finite and non-negative");
  if (!(R > 0.0) || !std::isfinite(R)) bad("R must be positive");
  if (k < 1) bad("k must be at least 1");
  if (replicates < 1) bad("replicates must be at least 1");

  switch (theta_star.kind) {
    case ThetaStarSpec::Kind::zero: break;
    case ThetaStarSpec::Kind::sphere:
      if (!(theta_star.norm >= 0.0)) bad("theta_star sphere norm must be non-negative");
      if (theta_star.norm > R * (1.0 + 1e-12)) bad("theta_star norm exceeds R");
      break;
    case ThetaStarSpec::Kind::explicit_vector:
      if (theta_star.values.size() != d) bad("theta_star length does not match d");
      if (!theta_star.values.allFinite()) bad("theta_star must be finite");
      if (theta_star.values.norm() > R * (1.0 + 1e-12)) bad("theta_star norm exceeds R");
      break;
  }
  if (design.kind == DesignSpec::Kind::diagonal) {
    if (design.eigenvalues.size() != d) bad("design eigenvalue count does not match d");
    if ((design.eigenvalues.array() < 0.0).any()) bad("design eigenvalues must be non-negative");
  }
  if (lambda_min && !(*lambda_min > 0.0)) bad("lambda_min must be positive");
  if (m4 && !(*m4 >= 1.0)) bad("m4 must be at least 1");
  if (a_override && !(*a_override > 0.0)) bad("a_override must be positive");
  if (b_override && !(*b_override > 0.0 && *b_override <= 1.0)) bad("b_override must lie in (0, 1]");
  if (alpha_override && !(*alpha_override >= 0.0)) bad("alpha_override must be non-negative");
  if (theta0 && theta0->size() != d) bad("theta0 length does not match d");
  if (!(log_factor > 1.0)) bad("log_factor must exceed 1");
  for (double c : gap_c)
    if (!(c > 0.0)) bad("gap_c entries must be positive");
}

Design SimConfig::make_design() const {
  if (design.kind == DesignSpec::Kind::diagonal) return Design::diagonal(design.eigenvalues);
  return Design::gaussian_identity(d);
}

double SimConfig::resolved_lambda_min() const {
  if (lambda_min) return *lambda_min;
  if (design.kind == DesignSpec::Kind::diagonal) return design.eigenvalues.minCoeff();
  return 1.0;
}

double SimConfig::resolved_m4() const {
  if (m4) return *m4;
  return make_design().moment_bound(4);
}

SimConfig parse_config(std::istream& in) {
  SimConfig c;
  c.theta_star.norm = -1.0;  // sphere of radius R unless given
  std::map<std::string, std::string> seen;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      fail(Errc::invalid_config, "line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (value.empty()) fail(Errc::invalid_config, "key '" + key + "' has no value");
    if (!seen.emplace(key, value).second) fail(Errc::invalid_config, "duplicate key '" + key + "'");

    if (key == "d") {
      c.d = parse_int(key, value);
    } else if (key == "sigma") {
      c.sigma = parse_double(key, value);
    } else if (key == "R") {
      c.R = parse_double(key, value);
    } else if (key == "k") {
      c.k = parse_int(key, value);
    } else if (key == "replicates") {
      c.replicates = static_cast<int>(parse_int(key, value));
    } else if (key == "seed") {
      c.seed = static_cast<std::uint64_t>(parse_int(key, value));
    } else if (key == "theta_star") {
      if (value == "zero") {
        c.theta_star = {ThetaStarSpec::Kind::zero, 0.0, {}};
      } else if (value.rfind("sphere", 0) == 0) {
        c.theta_star.kind = ThetaStarSpec::Kind::sphere;
        c.theta_star.norm = -1.0;  // resolved to R below when no norm is given
        if (value.size() > 6) {
          if (value[6] != ':') fail(Errc::invalid_config, "theta_star: expected sphere:<norm>");
          c.theta_star.norm = parse_double(key, trim(value.substr(7)));
        }
      } else {
        c.theta_star = {ThetaStarSpec::Kind::explicit_vector, 0.0, to_vector(parse_list(key, value))};
      }
    } else if (key == "design") {
      if (value == "gaussian-identity") {
        c.design = {DesignSpec::Kind::gaussian_identity, {}};
      } else if (value.rfind("diagonal:", 0) == 0) {
        c.design = {DesignSpec::Kind::diagonal, to_vector(parse_list(key, value.substr(9)))};
      } else {
        fail(Errc::invalid_config, "design: expected gaussian-identity or diagonal:<list>");
      }
    } else if (key == "lambda_min") {
      c.lambda_min = parse_double(key, value);
    } else if (key == "m4") {
      c.m4 = parse_double(key, value);
    } else if (key == "a_override") {
      c.a_override = parse_double(key, value);
    } else if (key == "b_override") {
      c.b_override = parse_double(key, value);
    } else if (key == "alpha_override") {
      c.alpha_override = parse_double(key, value);
    } else if (key == "antithetic") {
      c.antithetic = parse_bool(key, value);
    } else if (key == "theta0") {
      if (value != "zero") c.theta0 = to_vector(parse_list(key, value));
    } else if (key == "estimator") {
      if (value == "oracle") c.estimator = EstimatorMode::oracle;
      else if (value == "plug-in") c.estimator = EstimatorMode::plug_in;
      else fail(Errc::invalid_config, "estimator: expected oracle or plug-in");
    } else if (key == "log_factor") {
      c.log_factor = parse_double(key, value);
    } else if (key == "gap_c") {
      c.gap_c = parse_list(key, value);
    } else if (key == "threads") {
      c.threads = static_cast<unsigned>(parse_int(key, value));
    } else {
      fail(Errc::invalid_config, "unknown key '" + key + "'");
    }
  }
  if (c.theta_star.kind == ThetaStarSpec::Kind::sphere && c.theta_star.norm < 0.0) c.theta_star.norm = c.R;
  c.validate();
  return c;
}

SimConfig parse_config_string(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

SimConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::invalid_config, "cannot open config file '" + path + "'");
  return parse_config(in);
}

std::string format_config(const SimConfig& c) {
  std::ostringstream out;
  out << "d = " << c.d << "\n";
  out << "sigma = " << format_double(c.sigma) << "\n";
  out << "R = " << format_double(c.R) << "\n";
  out << "k = " << c.k << "\n";
  out << "replicates = " << c.replicates << "\n";
  out << "seed = " << c.seed << "\n";
  switch (c.theta_star.kind) {
    case ThetaStarSpec::Kind::zero: out << "theta_star = zero\n"; break;
    case ThetaStarSpec::Kind::sphere: out << "theta_star = sphere:" << format_double(c.theta_star.norm) << "\n"; break;
    case ThetaStarSpec::Kind::explicit_vector: out << "theta_star = " << format_list(c.theta_star.values) << "\n"; break;
  }
  if (c.design.kind == DesignSpec::Kind::diagonal)
    out << "design = diagonal:" << format_list(c.design.eigenvalues) << "\n";
  else
    out << "design = gaussian-identity\n";
  if (c.lambda_min) out << "lambda_min = " << format_double(*c.lambda_min) << "\n";
  if (c.m4) out << "m4 = " << format_double(*c.m4) << "\n";
  if (c.a_override) out << "a_override = " << format_double(*c.a_override) << "\n";
  if (c.b_override) out << "b_override = " << format_double(*c.b_override) << "\n";
  if (c.alpha_override) out << "alpha_override = " << format_double(*c.alpha_override) << "\n";
  out << "antithetic = " << (c.antithetic ? "true" : "false") << "\n";
  if (c.theta0) out << "theta0 = " << format_list(*c.theta0) << "\n";
  out << "estimator = " << (c.estimator == EstimatorMode::oracle ? "oracle" : "plug-in") << "\n";
  out << "log_factor = " << format_double(c.log_factor) << "\n";
  out << "gap_c = " << format_list(to_vector(c.gap_c)) << "\n";
  if (c.threads) out << "threads = " << c.threads << "\n";
  return out.str();
}

}  // namespace zoq
