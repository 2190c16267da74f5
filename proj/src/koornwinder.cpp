#include "kmwalk/koornwinder.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace kmwalk {

void validate(const KoornwinderParams& params) {
  validate(params.jacobi);
  if (!(params.big_n >= 0.0)) {
    throw std::domain_error("koornwinder parameters require N >= 0");
  }
}

bool is_chebyshev(const KoornwinderParams& params) {
  return params.jacobi.alpha == -0.5 && params.jacobi.beta == -0.5;
}

double SpectralMeasure::density(double x) const {
  return density_coeff * std::pow(1.0 - x, params.jacobi.alpha) *
         std::pow(1.0 + x, params.jacobi.beta);
}

SpectralMeasure spectral_measure(const KoornwinderParams& params) {
  validate(params);
  const double a = params.jacobi.alpha;
  const double b = params.jacobi.beta;
  SpectralMeasure m;
  m.params = params;
  // 1 / int_{-1}^{1} (1-x)^a (1+x)^b dx = 1 / (2^{a+b+1} B(a+1, b+1)),
  // so the continuous part integrates to exactly 1/(N+1).
  const double total = std::exp((a + b + 1.0) * std::numbers::ln2 +
                                std::lgamma(a + 1.0) + std::lgamma(b + 1.0) -
                                std::lgamma(a + b + 2.0));
  m.density_coeff = 1.0 / (total * (params.big_n + 1.0));
  m.atom_mass = params.big_n / (params.big_n + 1.0);
  m.atom_location = 1.0;
  return m;
}

namespace {

// Shared factors of the transform, kept as running ratios so no intermediate
// Pochhammer value overflows:
//   scale  = (alpha+beta+2)_{n-1} / (beta+1)_n
//   scale_b = scale * B_n = n!/(alpha+1)_n + scale * n(n+alpha+beta+1) N/(alpha+1)
struct TransformFactors {
  double scale = 0.0;
  double scale_b = 0.0;
};

TransformFactors transform_factors(const KoornwinderParams& params, int n) {
  const double a = params.jacobi.alpha;
  const double b = params.jacobi.beta;
  double scale = 1.0 / (b + 1.0);
  for (int k = 1; k < n; ++k) scale *= (a + b + 1.0 + k) / (b + 1.0 + k);
  double fact_ratio = 1.0;  // n! / (alpha+1)_n
  for (int k = 1; k <= n; ++k) fact_ratio *= k / (a + k);
  TransformFactors f;
  f.scale = scale;
  f.scale_b = fact_ratio + scale * n * (n + a + b + 1.0) * params.big_n / (a + 1.0);
  return f;
}

}  // namespace

double q_eval(const KoornwinderParams& params, int n, double x) {
  if (n < 0) throw std::domain_error("q_eval: n must be nonnegative");
  if (n == 0) return 1.0;
  if (x == 1.0) return 1.0;
  const TransformFactors f = transform_factors(params, n);
  const PolyValue base = jacobi_eval(params.jacobi, n, x, true);
  return -params.big_n * f.scale * (1.0 + x) * *base.derivative +
         f.scale_b * base.value;
}

double q_derivative(const KoornwinderParams& params, int n, double x) {
  if (n < 0) throw std::domain_error("q_derivative: n must be nonnegative");
  if (n == 0) return 0.0;
  const TransformFactors f = transform_factors(params, n);
  const double d1 = jacobi_derivative(params.jacobi, n, x, 1);
  const double d2 = jacobi_derivative(params.jacobi, n, x, 2);
  return (f.scale_b - params.big_n * f.scale) * d1 -
         params.big_n * f.scale * (1.0 + x) * d2;
}

double koornwinder_raw(const KoornwinderParams& params, int n, double x) {
  if (n < 0) throw std::domain_error("koornwinder_raw: n must be nonnegative");
  if (n == 0) return 1.0;
  // P_n^{alpha,beta,N} = (alpha+1)_n / n! * Q_n; the ratio is again a tame
  // running product.
  double ratio = 1.0;
  for (int k = 1; k <= n; ++k) ratio *= (params.jacobi.alpha + k) / k;
  return ratio * q_eval(params, n, x);
}

double q_chebyshev(double big_n, int n, double x) {
  if (n < 0) throw std::domain_error("q_chebyshev: n must be nonnegative");
  if (!(big_n >= 0.0)) throw std::domain_error("q_chebyshev: requires N >= 0");
  if (n == 0) return 1.0;
  return -big_n * (x + 1.0) * chebyshev_u(n - 1, x) +
         (1.0 + 2.0 * n * big_n) * chebyshev_t(n, x);
}

}  // namespace kmwalk
