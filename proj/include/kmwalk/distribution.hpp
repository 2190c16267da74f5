#pragma once

#include <vector>

namespace kmwalk {

enum class Method { spectral, matrix_power, monte_carlo, stationary };

const char* to_string(Method method);

// Finite prefix of a probability distribution on {0, 1, 2, ...}. Entries the
// vector does not carry are zero, except for the stationary distribution where
// mass_deficit holds the analytic tail beyond the stored range. In every case
// sum(probabilities) + mass_deficit accounts for the full unit mass.
struct DistributionSnapshot {
  long long time = 0;  // -1 for the stationary distribution
  int origin = 0;
  std::vector<double> probabilities;
  Method method = Method::spectral;
  double mass_deficit = 0.0;
};

}  // namespace kmwalk
