#include "kmwalk/distribution.hpp"

namespace kmwalk {

const char* to_string(Method method) {
  switch (method) {
    case Method::spectral: return "spectral";
    case Method::matrix_power: return "matrix_power";
    case Method::monte_carlo: return "monte_carlo";
    case Method::stationary: return "stationary";
  }
  return "unknown";
}

}  // namespace kmwalk
