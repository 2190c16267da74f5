#include "kmwalk/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "kmwalk/orthopoly.hpp"
#include "kmwalk/parallel.hpp"
#include "kmwalk/summation.hpp"

namespace kmwalk {

std::vector<long long> log_spaced_times(long long t_min, long long t_max, int points) {
  if (t_min < 1 || t_max < t_min || points < 1) {
    throw std::domain_error("log_spaced_times: need 1 <= t_min <= t_max, points >= 1");
  }
  std::vector<long long> times;
  times.reserve(points);
  const double lg_min = std::log10(static_cast<double>(t_min));
  const double lg_max = std::log10(static_cast<double>(t_max));
  for (int i = 0; i < points; ++i) {
    const double f = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
    times.push_back(static_cast<long long>(
        std::llround(std::pow(10.0, lg_min + f * (lg_max - lg_min)))));
  }
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  return times;
}

DecayCurve sample_decay_curve(const ChainSpec& spec, std::span<const long long> times) {
  DecayCurve curve;
  curve.spec = spec;
  curve.method = Method::spectral;
  curve.points.resize(times.size());
  run_blocks(times.size(), [&](std::size_t i) {
    curve.points[i] = {times[i], tv_distance(spec, times[i])};
  });
  return curve;
}

long long mixing_time(const ChainSpec& spec, double epsilon, long long t_cap) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw std::domain_error("mixing_time: epsilon must lie in (0, 1)");
  }
  if (t_cap < 0) throw std::domain_error("mixing_time: t_cap must be >= 0");

  std::map<long long, double> memo;
  auto tv = [&](long long t) {
    auto it = memo.find(t);
    if (it != memo.end()) return it->second;
    const double v = tv_distance(spec, t);
    memo.emplace(t, v);
    return v;
  };

  if (tv(0) <= epsilon) return 0;
  long long lo = 0, hi = 1;
  while (hi <= t_cap && tv(hi) > epsilon) {
    lo = hi;
    hi *= 2;
  }
  if (hi > t_cap) {
    if (tv(t_cap) > epsilon) {
      throw NotMixedByCap("mixing_time: TV(" + std::to_string(t_cap) + ") = " +
                          std::to_string(tv(t_cap)) + " > epsilon");
    }
    hi = t_cap;
  }
  // Invariant: tv(lo) > epsilon >= tv(hi).
  while (hi - lo > 1) {
    const long long mid = lo + (hi - lo) / 2;
    (tv(mid) <= epsilon ? hi : lo) = mid;
  }
  // Linear confirmation around the bisection answer; the curve is only
  // empirically monotone.
  long long result = hi;
  for (long long t = std::max<long long>(0, result - 2); t < result; ++t) {
    if (tv(t) <= epsilon) {
      result = t;
      break;
    }
  }
  while (result <= t_cap && tv(result) > epsilon) ++result;
  return result;
}

namespace {

double sup_norm_q(const ChainSpec& spec, int n, SupNormMode mode) {
  if (mode == SupNormMode::chebyshev_bound) {
    if (!is_chebyshev(spec.params)) {
      throw std::domain_error("decay_upper_bound: 4Nn+1 mode requires alpha = beta = -1/2");
    }
    return 4.0 * spec.params.big_n * n + 1.0;
  }
  const KoornwinderParams params = spec.params;
  return sup_norm_estimate([&params, n](double x) { return q_eval(params, n, x); }, n);
}

}  // namespace

double decay_upper_bound(const ChainSpec& spec, long long t, double constant,
                         SupNormMode mode) {
  if (t < 1) throw std::domain_error("decay_upper_bound: t must be >= 1");
  if (!(constant > 0.0)) throw std::domain_error("decay_upper_bound: constant must be > 0");
  const std::size_t m_max = static_cast<std::size_t>(spec.origin) + t;
  const CoefficientTable table(spec.params, m_max + 2);
  const ReversibilityMeasure rev = reversibility(table, m_max);

  CompensatedSum weighted;
  for (std::size_t n = 0; n <= m_max; ++n) {
    weighted.add(rev.values[n] * sup_norm_q(spec, static_cast<int>(n), mode));
  }
  const double sup_j = sup_norm_q(spec, spec.origin, mode);
  const double main_term = constant * sup_j /
                           std::pow(t + 1.0, 1.0 + spec.params.jacobi.alpha) *
                           weighted.value();
  return main_term + 0.5 * rev.tail;
}

BoundParams derive_bound_params(const DecayCurve& curve, SupNormMode mode) {
  if (curve.points.empty()) throw std::domain_error("derive_bound_params: empty curve");
  BoundParams params;
  params.fit_window = {curve.points.front().first, curve.points.back().first};
  params.c_upper = calibrate_decay_bound_constant(curve.spec, curve.points.front().first, mode);
  params.c_lower = std::numeric_limits<double>::infinity();
  for (const auto& [t, tv] : curve.points) {
    params.c_lower = std::min(params.c_lower, tv * std::sqrt(static_cast<double>(t)));
  }
  return params;
}

double calibrate_decay_bound_constant(const ChainSpec& spec, long long anchor,
                                      SupNormMode mode) {
  const double tv = tv_distance(spec, anchor);
  const double with_unit = decay_upper_bound(spec, anchor, 1.0, mode);
  const std::size_t m_max = static_cast<std::size_t>(spec.origin) + anchor;
  const CoefficientTable table(spec.params, m_max + 2);
  const double tail = 0.5 * reversibility(table, m_max).tail;
  const double constant = (tv - tail) / (with_unit - tail);
  if (!(constant > 0.0)) {
    throw std::domain_error(
        "calibrate_decay_bound_constant: tail already dominates TV at the anchor");
  }
  return constant;
}

namespace {

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double fa, double fm, double fb, double whole, double tol,
                        int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double tol) {
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 48);
}

}  // namespace

double laplace_reference(double alpha, double lambda, long long t) {
  if (t < 1) throw std::domain_error("laplace_reference: t must be >= 1");
  if (!(lambda > 0.0)) throw std::domain_error("laplace_reference: lambda must be > 0");
  if (!(alpha > -1.0)) throw std::domain_error("laplace_reference: alpha must be > -1");

  const double upper = std::log((1.0 + lambda) / lambda);
  // Substitute s = v^m with m large enough that the transformed integrand
  // vanishes at 0 (kills the s^alpha endpoint singularity for alpha < 0).
  const double m = std::max(2.0, 2.0 / (alpha + 1.0));
  const double v_max = std::pow(upper, 1.0 / m);
  const double tau = static_cast<double>(t) + 1.0;
  auto f = [&](double v) {
    if (v <= 0.0) return 0.0;
    return m * std::pow(v, m * (alpha + 1.0) - 1.0) * std::exp(-std::pow(v, m) * tau);
  };

  const double reference = std::tgamma(alpha + 1.0) / std::pow(tau, 1.0 + alpha);
  const double tol = 1e-13 * reference;
  // The integrand is a bump of width ~ tau^{-1/m} near 0; split there so the
  // initial Simpson points cannot all miss it.
  const double v_cut = std::min(v_max, std::pow(40.0 / tau, 1.0 / m));
  CompensatedSum total;
  const int panels = 8;
  for (int i = 0; i < panels; ++i) {
    const double a = v_cut * i / panels;
    const double b = v_cut * (i + 1) / panels;
    total.add(integrate_adaptive(f, a, b, tol / (panels + 1)));
  }
  if (v_cut < v_max) total.add(integrate_adaptive(f, v_cut, v_max, tol / (panels + 1)));
  return total.value() / reference;
}

DecayFit fit_decay(const DecayCurve& curve) {
  const auto& pts = curve.points;
  if (pts.size() < 8) {
    throw InsufficientRange("fit_decay: need at least 8 points");
  }
  if (pts.front().first < 2 || pts.back().first < 100 * pts.front().first) {
    throw InsufficientRange("fit_decay: times must span at least two decades, t_min >= 2");
  }
  for (const auto& [t, tv] : pts) {
    if (!(tv > 0.0)) throw InsufficientRange("fit_decay: TV values must be positive");
  }

  auto lsq_slope = [](const std::vector<double>& x, const std::vector<double>& y,
                      double& slope, double& intercept) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      sx += x[i];
      sy += y[i];
      sxx += x[i] * x[i];
      sxy += x[i] * y[i];
    }
    slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    intercept = (sy - slope * sx) / n;
  };

  std::vector<double> log_t, log_tv, loglog_t, log_scaled;
  DecayFit fit;
  fit.min_tv_sqrt_t = std::numeric_limits<double>::infinity();
  fit.max_tv_sqrt_t = 0.0;
  for (const auto& [t, tv] : pts) {
    const double lt = std::log(static_cast<double>(t));
    log_t.push_back(lt);
    log_tv.push_back(std::log(tv));
    loglog_t.push_back(std::log(lt));
    const double scaled = tv * std::sqrt(static_cast<double>(t));
    log_scaled.push_back(std::log(scaled));
    fit.min_tv_sqrt_t = std::min(fit.min_tv_sqrt_t, scaled);
    fit.max_tv_sqrt_t = std::max(fit.max_tv_sqrt_t, scaled);
  }

  double intercept = 0.0;
  lsq_slope(log_t, log_tv, fit.slope, intercept);
  fit.residuals.resize(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    fit.residuals[i] = log_tv[i] - (intercept + fit.slope * log_t[i]);
  }
  double unused = 0.0;
  lsq_slope(loglog_t, log_scaled, fit.log_corrected_slope, unused);
  return fit;
}

GapReport spectral_gap_report(const ChainSpec& spec) {
  validate(spec);
  GapReport report;
  report.support_lower = (spec.lambda - 1.0) / (spec.lambda + 1.0);
  report.support_upper = 1.0;
  report.atom_location = 1.0;
  report.gap = report.atom_location - report.support_upper;  // structurally zero
  return report;
}

}  // namespace kmwalk
