#include "kmwalk/chain.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "kmwalk/summation.hpp"

namespace kmwalk {

RecurrenceCoeffs coeffs_chebyshev(double big_n, int n) {
  if (n < 0) throw std::domain_error("coeffs_chebyshev: n must be nonnegative");
  if (!(big_n >= 0.0)) throw std::domain_error("coeffs_chebyshev: requires N >= 0");
  RecurrenceCoeffs c;
  c.site = n;
  if (n == 0) {
    c.q = 0.0;
    c.r = big_n / (big_n + 1.0);
    c.p = 1.0 / (big_n + 1.0);
    return c;
  }
  const double lo = 1.0 + (2.0 * n - 1.0) * big_n;
  const double hi = 1.0 + (2.0 * n + 1.0) * big_n;
  c.p = 0.5 * lo / hi;
  c.q = 0.5 * hi / lo;
  c.r = -2.0 * big_n * big_n / (lo * hi);
  return c;
}

namespace {

struct Solve3 {
  bool ok = false;
  double cond = std::numeric_limits<double>::infinity();
  std::array<double, 3> x{};
};

Solve3 solve_3x3(const std::array<std::array<double, 3>, 3>& a,
                 const std::array<double, 3>& b) {
  Solve3 s;
  const double det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
                     a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
                     a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
  if (det == 0.0 || !std::isfinite(det)) return s;

  std::array<std::array<double, 3>, 3> inv;
  inv[0][0] = (a[1][1] * a[2][2] - a[1][2] * a[2][1]) / det;
  inv[0][1] = (a[0][2] * a[2][1] - a[0][1] * a[2][2]) / det;
  inv[0][2] = (a[0][1] * a[1][2] - a[0][2] * a[1][1]) / det;
  inv[1][0] = (a[1][2] * a[2][0] - a[1][0] * a[2][2]) / det;
  inv[1][1] = (a[0][0] * a[2][2] - a[0][2] * a[2][0]) / det;
  inv[1][2] = (a[0][2] * a[1][0] - a[0][0] * a[1][2]) / det;
  inv[2][0] = (a[1][0] * a[2][1] - a[1][1] * a[2][0]) / det;
  inv[2][1] = (a[0][1] * a[2][0] - a[0][0] * a[2][1]) / det;
  inv[2][2] = (a[0][0] * a[1][1] - a[0][1] * a[1][0]) / det;

  auto norm_inf = [](const std::array<std::array<double, 3>, 3>& m) {
    double best = 0.0;
    for (const auto& row : m) {
      const double s = std::abs(row[0]) + std::abs(row[1]) + std::abs(row[2]);
      best = std::max(best, s);
    }
    return best;
  };
  s.cond = norm_inf(a) * norm_inf(inv);
  if (!(s.cond < 1e12)) return s;

  for (int i = 0; i < 3; ++i) {
    s.x[i] = inv[i][0] * b[0] + inv[i][1] * b[1] + inv[i][2] * b[2];
  }
  s.ok = true;
  return s;
}

// Rows of the linear system for (p, r, q) at site n >= 1: the recurrence at
// x = 1 and x = -1, and the differentiated recurrence at deriv_at.
Solve3 solve_site(const KoornwinderParams& params, int n, double deriv_at) {
  const double qm_m1 = q_eval(params, n - 1, -1.0);
  const double qn_m1 = q_eval(params, n, -1.0);
  const double qp_m1 = q_eval(params, n + 1, -1.0);
  const double dqm = q_derivative(params, n - 1, deriv_at);
  const double dqn = q_derivative(params, n, deriv_at);
  const double dqp = q_derivative(params, n + 1, deriv_at);
  const double qn_d = q_eval(params, n, deriv_at);

  const std::array<std::array<double, 3>, 3> a{{
      {1.0, 1.0, 1.0},
      {qp_m1, qn_m1, qm_m1},
      {dqp, dqn, dqm},
  }};
  const std::array<double, 3> b{1.0, -qn_m1, qn_d + deriv_at * dqn};
  return solve_3x3(a, b);
}

void check_residual(const KoornwinderParams& params, const RecurrenceCoeffs& c) {
  const int n = c.site;
  double worst = 0.0;
  double scale = 1.0;
  for (int i = 0; i < 10; ++i) {
    const double x = -0.9 + 0.2 * i;
    const double qm = (n == 0) ? 0.0 : q_eval(params, n - 1, x);
    const double qn = q_eval(params, n, x);
    const double qp = q_eval(params, n + 1, x);
    const double resid = c.p * qp + c.r * qn + c.q * qm - x * qn;
    worst = std::max(worst, std::abs(resid));
    scale = std::max({scale, std::abs(qp), std::abs(qn), std::abs(qm)});
  }
  if (!(worst < 1e-9 * scale)) {
    throw SingularSystem("coeffs_general: recurrence residual " + std::to_string(worst) +
                         " at site " + std::to_string(n));
  }
}

}  // namespace

RecurrenceCoeffs coeffs_general(const KoornwinderParams& params, int n) {
  if (n < 0) throw std::domain_error("coeffs_general: n must be nonnegative");
  validate(params);
  RecurrenceCoeffs c;
  c.site = n;
  if (n == 0) {
    // p0 Q_1 + r0 = x at x in {1, 0}: p0 + r0 = 1, p0 Q_1(0) + r0 = 0.
    const double q1_at_0 = q_eval(params, 1, 0.0);
    c.p = 1.0 / (1.0 - q1_at_0);
    c.r = 1.0 - c.p;
    c.q = 0.0;
  } else {
    Solve3 s = solve_site(params, n, 0.0);
    if (!s.ok) s = solve_site(params, n, 0.5);
    if (!s.ok) {
      throw SingularSystem("coeffs_general: singular point sets at site " +
                           std::to_string(n));
    }
    c.p = s.x[0];
    c.r = s.x[1];
    c.q = s.x[2];
  }
  check_residual(params, c);
  return c;
}

double lambda_min(const KoornwinderParams& params, int n_scan) {
  validate(params);
  const double big_n = params.big_n;
  if (is_chebyshev(params)) {
    return 2.0 * big_n * big_n / ((1.0 + big_n) * (1.0 + 3.0 * big_n));
  }
  double worst = 0.0;
  std::vector<double> mags;
  mags.reserve(n_scan + 1);
  for (int n = 0; n <= n_scan; ++n) {
    const double r = coeffs_general(params, n).r;
    if (n >= 1) mags.push_back(std::abs(r));
    worst = std::max(worst, -r);
  }
  if (worst == 0.0) return 0.0;
  // |r_n| must have settled into decay by the end of the scan, and the sup
  // must sit strictly inside it; otherwise a larger scan is needed.
  const std::size_t window = std::min<std::size_t>(16, mags.size());
  bool decreasing = true;
  for (std::size_t i = mags.size() - window; i + 1 < mags.size(); ++i) {
    if (mags[i + 1] > mags[i] * (1.0 + 1e-9) + 1e-15) decreasing = false;
  }
  if (!decreasing || mags.back() >= worst * (1.0 - 1e-9)) {
    throw NotStabilized("lambda_min: -r_n not decreasing by n_scan = " +
                        std::to_string(n_scan));
  }
  return worst;
}

RecurrenceCoeffs shift(const RecurrenceCoeffs& coeffs, double lambda) {
  if (coeffs.shifted) throw std::domain_error("shift: coefficients already shifted");
  RecurrenceCoeffs out;
  out.site = coeffs.site;
  out.shifted = true;
  const double denom = 1.0 + lambda;
  out.p = coeffs.p / denom;
  out.q = coeffs.q / denom;
  out.r = (coeffs.r + lambda) / denom;
  for (double* entry : {&out.p, &out.r, &out.q}) {
    if (*entry < -1e-14) {
      throw NegativeEntry("shift: negative entry " + std::to_string(*entry) +
                              " at site " + std::to_string(coeffs.site) +
                              " (lambda below threshold)",
                          coeffs.site);
    }
    if (*entry < 0.0) *entry = 0.0;
  }
  return out;
}

void validate(const ChainSpec& spec) {
  validate(spec.params);
  if (spec.origin < 0) throw std::domain_error("chain spec: origin must be >= 0");
  if (!(spec.lambda >= lambda_min(spec.params) - 1e-12)) {
    throw std::domain_error("chain spec: lambda below lambda_min");
  }
}

CoefficientTable::CoefficientTable(const KoornwinderParams& params, std::size_t size)
    : params_(params) {
  validate(params);
  p_.reserve(size);
  r_.reserve(size);
  q_.reserve(size);
  const bool cheb = is_chebyshev(params);
  for (std::size_t n = 0; n < size; ++n) {
    const RecurrenceCoeffs c = cheb ? coeffs_chebyshev(params.big_n, static_cast<int>(n))
                                    : coeffs_general(params, static_cast<int>(n));
    p_.push_back(c.p);
    r_.push_back(c.r);
    q_.push_back(c.q);
  }
}

RecurrenceCoeffs CoefficientTable::unshifted(std::size_t n) const {
  if (n >= size()) throw std::out_of_range("coefficient table: site out of range");
  return RecurrenceCoeffs{static_cast<int>(n), q_[n], r_[n], p_[n], false};
}

RecurrenceCoeffs CoefficientTable::shifted_row(std::size_t n, double lambda) const {
  return shift(unshifted(n), lambda);
}

double chebyshev_pi_tail(double big_n, std::size_t after) {
  if (big_n == 0.0) return std::numeric_limits<double>::infinity();
  const double m = static_cast<double>(after);
  return (1.0 + big_n) / (big_n * (1.0 + (2.0 * m + 1.0) * big_n));
}

namespace {

// Fit pi_n ~ c n^{-s} over the last decade and integrate the fitted tail with
// a midpoint correction.
double fitted_pi_tail(std::span<const double> pi) {
  const std::size_t m = pi.size() - 1;
  const std::size_t lo = std::max<std::size_t>(2, m / 10);
  if (m < lo + 4) return 0.0;  // too short to extrapolate
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t count = 0;
  for (std::size_t n = lo; n <= m; ++n) {
    if (!(pi[n] > 0.0)) return std::numeric_limits<double>::infinity();
    const double x = std::log(static_cast<double>(n));
    const double y = std::log(pi[n]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++count;
  }
  const double denom = count * sxx - sx * sx;
  const double slope = (count * sxy - sx * sy) / denom;
  const double intercept = (sy - slope * sx) / count;
  const double s = -slope;
  if (!(s > 1.0)) return std::numeric_limits<double>::infinity();
  const double c = std::exp(intercept);
  return c * std::pow(m + 0.5, 1.0 - s) / (s - 1.0);
}

}  // namespace

ReversibilityMeasure reversibility(const CoefficientTable& coeffs, std::size_t up_to) {
  if (coeffs.size() < up_to + 2) {
    throw std::out_of_range("reversibility: coefficient table shorter than up_to + 2");
  }
  ReversibilityMeasure m;
  m.values.resize(up_to + 1);
  m.values[0] = 1.0;
  CompensatedSum total;
  total.add(1.0);
  const auto p = coeffs.p();
  const auto q = coeffs.q();
  for (std::size_t n = 0; n < up_to; ++n) {
    // Running ratio, never separate products: both p_0...p_{n-1} and
    // q_1...q_n decay geometrically and would underflow near n ~ 1000.
    const double next = m.values[n] * p[n] / q[n + 1];
    if (next < 1e-300) {
      throw MeasureUnderflow("reversibility: pi underflow at site " +
                             std::to_string(n + 1));
    }
    m.values[n + 1] = next;
    total.add(next);
  }
  m.tail = is_chebyshev(coeffs.params())
               ? chebyshev_pi_tail(coeffs.params().big_n, up_to)
               : fitted_pi_tail(m.values);
  m.rho = total.value() + m.tail;
  return m;
}

DistributionSnapshot stationary(const ReversibilityMeasure& measure) {
  if (!std::isfinite(measure.rho)) {
    throw NotPositiveRecurrent("stationary: pi is not summable (rho = inf)");
  }
  if (!(measure.tail <= 0.5 * measure.rho)) {
    throw NotPositiveRecurrent(
        "stationary: tail mass dominates the truncation; increase the range");
  }
  DistributionSnapshot out;
  out.time = -1;
  out.origin = -1;
  out.method = Method::stationary;
  out.probabilities.resize(measure.values.size());
  for (std::size_t n = 0; n < measure.values.size(); ++n) {
    out.probabilities[n] = measure.values[n] / measure.rho;
  }
  out.mass_deficit = measure.tail / measure.rho;
  return out;
}

}  // namespace kmwalk
