#include "kmwalk/orthopoly.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace kmwalk {

void validate(const JacobiParams& params) {
  if (!(params.alpha > -1.0) || !(params.beta > -1.0)) {
    throw std::domain_error("jacobi parameters require alpha > -1 and beta > -1");
  }
}

double pochhammer(double x, int n) {
  if (n < 0) throw std::domain_error("pochhammer: n must be nonnegative");
  double result = 1.0;
  for (int k = 0; k < n; ++k) result *= x + k;
  if (!std::isfinite(result)) {
    throw std::range_error("pochhammer: overflow at n = " + std::to_string(n) +
                           "; use log_pochhammer");
  }
  return result;
}

double log_pochhammer(double x, int n) {
  if (n < 0) throw std::domain_error("log_pochhammer: n must be nonnegative");
  if (!(x > 0.0)) throw std::domain_error("log_pochhammer: requires x > 0");
  return std::lgamma(x + n) - std::lgamma(x);
}

namespace {

double jacobi_value(double alpha, double beta, int n, double x) {
  if (n == 0) return 1.0;
  const double ab = alpha + beta;
  double pm1 = 1.0;
  double p = 0.5 * ((ab + 2.0) * x + (alpha - beta));
  for (int m = 2; m <= n; ++m) {
    const double s = 2.0 * m + ab;
    const double c1 = 2.0 * m * (m + ab) * (s - 2.0);
    const double c2 = (s - 1.0) * (alpha * alpha - beta * beta);
    const double c3 = (s - 1.0) * s * (s - 2.0);
    const double c4 = 2.0 * (m + alpha - 1.0) * (m + beta - 1.0) * s;
    const double next = ((c2 + c3 * x) * p - c4 * pm1) / c1;
    pm1 = p;
    p = next;
  }
  return p;
}

}  // namespace

PolyValue jacobi_eval(const JacobiParams& params, int n, double x,
                      bool want_derivative) {
  if (n < 0) throw std::domain_error("jacobi_eval: n must be nonnegative");
  PolyValue out;
  out.value = jacobi_value(params.alpha, params.beta, n, x);
  if (want_derivative) {
    out.derivative = jacobi_derivative(params, n, x, 1);
  }
  return out;
}

double jacobi_derivative(const JacobiParams& params, int n, double x, int order) {
  if (n < 0) throw std::domain_error("jacobi_derivative: n must be nonnegative");
  if (order < 0) throw std::domain_error("jacobi_derivative: order must be nonnegative");
  if (order == 0) return jacobi_value(params.alpha, params.beta, n, x);
  if (order > n) return 0.0;
  // d^k/dx^k P_n^{a,b} = ((n+a+b+1)_k / 2^k) P_{n-k}^{a+k,b+k}
  const double factor =
      pochhammer(n + params.alpha + params.beta + 1.0, order) / std::ldexp(1.0, order);
  return factor * jacobi_value(params.alpha + order, params.beta + order, n - order, x);
}

double chebyshev_t(int n, double x) {
  if (n < 0) throw std::domain_error("chebyshev_t: n must be nonnegative");
  if (x == 1.0) return 1.0;
  if (x == -1.0) return (n % 2 == 0) ? 1.0 : -1.0;
  return std::cos(n * std::acos(x));
}

double chebyshev_u(int n, double x) {
  if (n < -1) throw std::domain_error("chebyshev_u: n must be >= -1");
  if (n == -1) return 0.0;
  if (x == 1.0) return n + 1.0;
  if (x == -1.0) return (n % 2 == 0) ? (n + 1.0) : -(n + 1.0);
  const double theta = std::acos(x);
  return std::sin((n + 1.0) * theta) / std::sin(theta);
}

namespace {

// Golden-section maximization of g on [a, b].
double golden_max(const std::function<double(double)>& g, double a, double b) {
  constexpr double inv_phi = 0.6180339887498949;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double gc = g(c);
  double gd = g(d);
  for (int it = 0; it < 120 && (b - a) > 1e-14; ++it) {
    if (gc > gd) {
      b = d;
      d = c;
      gd = gc;
      c = b - inv_phi * (b - a);
      gc = g(c);
    } else {
      a = c;
      c = d;
      gc = gd;
      d = a + inv_phi * (b - a);
      gd = g(d);
    }
  }
  return std::max(gc, gd);
}

}  // namespace

double sup_norm_estimate(const std::function<double(double)>& f, int degree) {
  if (degree < 0) throw std::domain_error("sup_norm_estimate: degree must be >= 0");
  const int grid = std::max(8 * (degree + 1), 64);
  auto absf = [&f](double x) { return std::abs(f(x)); };

  double best = 0.0;
  int best_k = 0;
  for (int k = 0; k <= grid; ++k) {
    const double x = std::cos(k * std::numbers::pi / grid);
    const double v = absf(x);
    if (v > best) {
      best = v;
      best_k = k;
    }
  }
  // Bracket around the grid argmax; the extrema grid is dense enough (8 points
  // per oscillation of a degree-n polynomial) for |f| to be unimodal inside.
  const double hi = std::cos(std::max(best_k - 1, 0) * std::numbers::pi / grid);
  const double lo = std::cos(std::min(best_k + 1, grid) * std::numbers::pi / grid);
  return std::max(best, golden_max(absf, lo, hi));
}

}  // namespace kmwalk
