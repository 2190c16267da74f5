#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include "kmwalk/koornwinder.hpp"

namespace kmwalk {

enum class QuadratureFamily { gauss_jacobi, gauss_chebyshev };

struct DegreeTooLarge : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Nodes and weights for the continuous part of the Koornwinder measure (total
// weight 1/(N+1)); polynomials through exact_degree integrate exactly. The
// atom at 1 is never part of the rule.
struct QuadratureRule {
  std::vector<double> nodes;    // ascending, inside (-1, 1)
  std::vector<double> weights;  // positive
  long long exact_degree = 0;
  QuadratureFamily family = QuadratureFamily::gauss_chebyshev;

  double integrate(const std::function<double(double)>& f) const;
};

// K = ceil((degree+1)/2) nodes: closed-form Chebyshev rule on the
// alpha = beta = -1/2 line (capped at K = 1e8), Golub-Welsch from the Jacobi
// recurrence elsewhere (capped at K = 1e5; node computation cost).
QuadratureRule build_rule(const KoornwinderParams& params, long long degree);

}  // namespace kmwalk
