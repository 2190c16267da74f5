#pragma once

#include <span>
#include <utility>

#include "kmwalk/chain.hpp"
#include "kmwalk/spectral.hpp"

namespace kmwalk {

struct NotMixedByCap : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InsufficientRange : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DecayCurve {
  std::vector<std::pair<long long, double>> points;  // (t, tv), t increasing
  ChainSpec spec;
  Method method = Method::spectral;
};

// Integer times log-spaced over [t_min, t_max], deduplicated.
std::vector<long long> log_spaced_times(long long t_min, long long t_max, int points);

// Exact spectral TV at each time; points are independent and computed as a
// parallel map.
DecayCurve sample_decay_curve(const ChainSpec& spec, std::span<const long long> times);

// Smallest t <= t_cap with TV(t) <= epsilon: exponential search, bisection on
// the empirically monotone curve, then a +-2 linear confirmation scan.
long long mixing_time(const ChainSpec& spec, double epsilon, long long t_cap);

enum class SupNormMode {
  estimate,         // orthopoly::sup_norm_estimate per polynomial
  chebyshev_bound,  // ||Q_n||_inf <= 4Nn + 1 on the Chebyshev line
};

// Constants bracketing the decay over a fit window: c_upper scales the
// polynomial upper bound (calibrated at the window's first time), c_lower is
// the lower-bound witness min tv*sqrt(t).
struct BoundParams {
  double c_upper = 0.0;
  double c_lower = 0.0;
  std::pair<long long, long long> fit_window{0, 0};
};

BoundParams derive_bound_params(const DecayCurve& curve,
                                SupNormMode mode = SupNormMode::chebyshev_bound);

// constant * ||Q_j||_inf / (t+1)^{1+alpha} * sum_{n<=t+j} pi_n ||Q_n||_inf
//   + (1/2) sum_{n>j+t} pi_n  (tail analytic).
double decay_upper_bound(const ChainSpec& spec, long long t, double constant,
                         SupNormMode mode = SupNormMode::chebyshev_bound);

// Constant making the bound touch the exact TV at the anchor time.
double calibrate_decay_bound_constant(
    const ChainSpec& spec, long long anchor,
    SupNormMode mode = SupNormMode::chebyshev_bound);

// Ratio of int_0^{log((1+lambda)/lambda)} e^{-s(t+1)} s^alpha ds to
// Gamma(alpha+1)/(t+1)^{1+alpha}; tends to 1 as t grows.
double laplace_reference(double alpha, double lambda, long long t);

struct DecayFit {
  double slope = 0.0;                // log tv vs log t
  double log_corrected_slope = 0.0;  // log(tv sqrt t) vs log log t
  std::vector<double> residuals;     // of the log-log fit
  double min_tv_sqrt_t = 0.0;
  double max_tv_sqrt_t = 0.0;
};

// Least squares on >= 8 points spanning >= 2 decades; throws
// InsufficientRange otherwise.
DecayFit fit_decay(const DecayCurve& curve);

struct GapReport {
  double support_lower = 0.0;  // (lambda-1)/(lambda+1), open edge
  double support_upper = 1.0;
  double atom_location = 1.0;
  double gap = 0.0;  // sup of continuous support coincides with the atom
};

GapReport spectral_gap_report(const ChainSpec& spec);

}  // namespace kmwalk
