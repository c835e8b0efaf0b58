#include "zoq/core.hpp"

namespace zoq {

const char* to_string(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_hyperparameter: return "invalid-hyperparameter";
    case Errc::invalid_config: return "invalid-config";
    case Errc::shape: return "shape-error";
    case Errc::protocol: return "protocol-error";
    case Errc::numeric: return "numeric-error";
    case Errc::schedule_undefined: return "schedule-undefined";
    case Errc::invalid_argument: return "invalid";
  }
  return "unknown";
}

}  // namespace zoq
