#ifndef ZOQ_CONFIG_HPP
#define ZOQ_CONFIG_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "zoq/core.hpp"
#include "zoq/design.hpp"

namespace zoq {

struct ThetaStarSpec {
  enum class Kind { zero, sphere, explicit_vector };
  Kind kind = Kind::sphere;
  double norm = 1.0;    // sphere
  VectorXd values;      // explicit_vector
};

struct DesignSpec {
  enum class Kind { gaussian_identity, diagonal };
  Kind kind = Kind::gaussian_identity;
  VectorXd eigenvalues;  // diagonal
};

enum class EstimatorMode { oracle, plug_in };

/// Experiment configuration. Field names follow the config-file keys.
struct SimConfig {
  Index d = 10;
  double sigma = 1.0;
  double R = 1.0;
  std::int64_t k = 1000;
  int replicates = 1;
  std::uint64_t seed = 0;
  ThetaStarSpec theta_star;
  DesignSpec design;

  // learning-rate schedule
  std::optional<double> lambda_min;
  std::optional<double> m4;
  std::optional<double> a_override;
  std::optional<double> b_override;
  std::optional<double> alpha_override;
  bool antithetic = false;
  std::optional<VectorXd> theta0;

  // non-adaptive estimator
  EstimatorMode estimator = EstimatorMode::oracle;

  // harness
  double log_factor = 1.3;
  std::vector<double> gap_c = {4.0, 6.0};
  unsigned threads = 0;

  /// Throws Errc::invalid_config on any violated field constraint.
  void validate() const;

  Design make_design() const;
  /// lambda_min(Q) from the override or the design.
  double resolved_lambda_min() const;
  /// M_4 from the override or the design.
  double resolved_m4() const;
};

/// Parses flat `key = value` text. `#` starts a comment; unknown keys are errors.
SimConfig parse_config(std::istream& in);
SimConfig parse_config_string(const std::string& text);
SimConfig load_config(const std::string& path);

/// Canonical text form; parse_config_string(format_config(c)) reproduces c.
std::string format_config(const SimConfig& config);

}  // namespace zoq

#endif  // ZOQ_CONFIG_HPP
