#pragma once

#include <functional>
#include <optional>

namespace kmwalk {

struct JacobiParams {
  double alpha = 0.0;
  double beta = 0.0;
};

// Throws std::domain_error unless alpha > -1 and beta > -1.
void validate(const JacobiParams& params);

struct PolyValue {
  double value = 0.0;
  std::optional<double> derivative;
};

// Rising factorial x(x+1)...(x+n-1), with (x)_0 = 1.
// Throws std::range_error if the product overflows; use log_pochhammer then.
double pochhammer(double x, int n);

// log((x)_n) for x > 0, safe for n far beyond the overflow threshold.
double log_pochhammer(double x, int n);

// P_n^{alpha,beta}(x) in the classical normalization P_n(1) = (alpha+1)_n/n!,
// by the standard three-term recurrence. The derivative, when requested, comes
// from the parameter-raising identity, never from finite differences.
PolyValue jacobi_eval(const JacobiParams& params, int n, double x,
                      bool want_derivative = false);

// order-th derivative of P_n^{alpha,beta} at x (0 for order > n).
double jacobi_derivative(const JacobiParams& params, int n, double x, int order);

// Chebyshev polynomials, trig form in the interior, limit values at x = +-1.
double chebyshev_t(int n, double x);
double chebyshev_u(int n, double x);  // defined for n >= -1, U_{-1} = 0

// Max of |f| over [-1,1] for a polynomial of the given degree: scan a
// Chebyshev-extrema grid of at least 8(degree+1) points, then golden-section
// refine around the grid maximum.
double sup_norm_estimate(const std::function<double(double)>& f, int degree);

}  // namespace kmwalk
