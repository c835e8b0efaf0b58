#ifndef ZOQ_CORE_HPP
#define ZOQ_CORE_HPP

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace zoq {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Failure categories raised by the library.
enum class Errc {
  invalid_hyperparameter,
  invalid_config,
  shape,
  protocol,
  numeric,
  schedule_undefined,
  invalid_argument,
};

const char* to_string(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

inline void require_size(Index actual, Index expected, const char* what) {
  if (actual != expected)
    fail(Errc::shape, std::string(what) + " has length " + std::to_string(actual) + ", expected " +
                          std::to_string(expected));
}

}  // namespace zoq

#endif  // ZOQ_CORE_HPP
