#include "kmwalk/analysis.hpp"

#include <cmath>
#include <vector>

#include "doctest.h"
#include "test_util.hpp"

using namespace kmwalk;

namespace {
const ChainSpec kBase{{{-0.5, -0.5}, 1.0}, 0.25, 0};

DecayCurve synthetic_curve(const std::vector<long long>& times,
                           const std::function<double(double)>& law) {
  DecayCurve curve;
  curve.spec = kBase;
  for (long long t : times) curve.points.emplace_back(t, law(static_cast<double>(t)));
  return curve;
}

}  // namespace

TEST_CASE("log_spaced_times") {
  const std::vector<long long> times = log_spaced_times(100, 100000, 25);
  CHECK(times.size() == 25);
  CHECK(times.front() == 100);
  CHECK(times.back() == 100000);
  for (std::size_t i = 1; i < times.size(); ++i) CHECK(times[i] > times[i - 1]);
}

TEST_CASE("mixing_time pinned values") {
  CHECK(mixing_time(kBase, 0.5, 100) == 0);
  CHECK(mixing_time(kBase, 0.25, 100) == 1);
  CHECK(mixing_time(kBase, 0.9, 100) == 0);
  CHECK_THROWS_AS(mixing_time(kBase, 1.0, 100), std::domain_error);
  CHECK_THROWS_AS(mixing_time(kBase, -0.1, 100), std::domain_error);
  CHECK_THROWS_AS(mixing_time(kBase, 1e-3, 10), NotMixedByCap);
}

TEST_CASE("mixing_time coherence with the tv curve") {
  for (double eps : {0.3, 0.2, 0.15, 0.12}) {
    const long long t_mix = mixing_time(kBase, eps, 10'000);
    CHECK(tv_distance(kBase, t_mix) <= eps);
    if (t_mix >= 1) CHECK(tv_distance(kBase, t_mix - 1) > eps);
  }
}

TEST_CASE("halving epsilon roughly quadruples the mixing time") {
  // tv ~ t^{-1/2} up to a slow correction, so t_mix(eps/2)/t_mix(eps) sits
  // near 4 once the asymptotic regime is reached.
  long long prev = mixing_time(kBase, 0.04, 1'000'000);
  for (double eps : {0.02, 0.01}) {
    const long long cur = mixing_time(kBase, eps, 1'000'000);
    const double ratio = static_cast<double>(cur) / static_cast<double>(prev);
    CHECK(ratio > 3.0);
    CHECK(ratio < 6.0);
    prev = cur;
  }
}

TEST_CASE("decay_upper_bound tail term telescopes at j = 0, N = 1") {
  // With a negligible constant the bound reduces to (1/2) sum_{n>t} pi_n.
  for (long long t : {100LL, 1000LL}) {
    const double bound = decay_upper_bound(kBase, t, 1e-14);
    CHECK(kmtest::rel_err(bound, 0.5 / (t + 1.0)) < 1e-6);
  }
}

TEST_CASE("decay_upper_bound quadrupling ratio in the log window") {
  for (long long t : {1000LL, 10'000LL, 100'000LL}) {
    const double ratio = decay_upper_bound(kBase, 4 * t, 1.0) / decay_upper_bound(kBase, t, 1.0);
    CHECK(ratio > 0.45);
    CHECK(ratio < 0.65);
  }
}

TEST_CASE("decay_upper_bound dominates tv after single-anchor calibration") {
  const double constant = calibrate_decay_bound_constant(kBase, 100);
  CHECK(constant > 0.0);
  for (long long t : {100LL, 150LL, 300LL, 700LL, 1000LL}) {
    const double bound = decay_upper_bound(kBase, t, constant);
    const double tv = tv_distance(kBase, t);
    CHECK(bound >= tv * (1.0 - 1e-12));
  }
}

TEST_CASE("decay_upper_bound sup-norm-estimate mode matches the 4Nn+1 mode loosely") {
  // The estimate mode evaluates each ||Q_n||_inf; the bound mode majorizes it,
  // so the estimated version can only be smaller.
  const double est = decay_upper_bound(kBase, 40, 1.0, SupNormMode::estimate);
  const double maj = decay_upper_bound(kBase, 40, 1.0, SupNormMode::chebyshev_bound);
  CHECK(est <= maj * (1.0 + 1e-12));
  CHECK(est > 0.25 * maj);
}

TEST_CASE("laplace_reference pinned ratios") {
  CHECK(std::abs(laplace_reference(-0.5, 0.25, 10'000) - 1.0) < 0.01);
  // Closed form at alpha = 0: (1 - (lambda/(1+lambda))^{t+1}) / (t+1).
  for (long long t : {1LL, 10LL, 1000LL}) {
    const double ratio = laplace_reference(0.0, 1.0, t);
    const double closed = (1.0 - std::pow(0.5, t + 1.0)) / (t + 1.0);
    CHECK(kmtest::rel_err(ratio * (1.0 / (t + 1.0)), closed) < 1e-10);
  }
  const double early = laplace_reference(-0.5, 0.25, 1);
  CHECK(early > 0.5);
  CHECK(early < 1.5);
  for (double alpha : {-0.5, 0.0, 0.5}) {
    for (double lambda : {0.25, 1.0}) {
      CHECK(std::abs(laplace_reference(alpha, lambda, 10'000) - 1.0) < 0.01);
    }
  }
  // Stronger endpoint singularity (alpha < -1/2) still converges.
  CHECK(std::abs(laplace_reference(-0.75, 1.0, 10'000) - 1.0) < 0.03);
}

TEST_CASE("fit_decay on synthetic laws") {
  const std::vector<long long> times = log_spaced_times(100, 100000, 25);

  const DecayFit power = fit_decay(
      synthetic_curve(times, [](double t) { return 1.0 / std::sqrt(t); }));
  CHECK(std::abs(power.slope + 0.5) < 1e-6);
  CHECK(std::abs(power.log_corrected_slope) < 1e-6);
  CHECK(power.min_tv_sqrt_t == doctest::Approx(1.0));
  CHECK(power.max_tv_sqrt_t == doctest::Approx(1.0));
  REQUIRE(power.residuals.size() == times.size());
  for (double r : power.residuals) CHECK(std::abs(r) < 1e-12);

  // Frozen from an independent least-squares evaluation of the log-corrected
  // law on this exact grid: slope -0.370511, log-correction exponent 1.
  const DecayFit log_law = fit_decay(
      synthetic_curve(times, [](double t) { return std::log(t) / std::sqrt(t); }));
  CHECK(log_law.slope == doctest::Approx(-0.370511).epsilon(2e-4));
  CHECK(log_law.log_corrected_slope == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("fit_decay input guards") {
  const std::vector<long long> short_times = {10, 20, 40, 80, 160, 320, 640};
  CHECK_THROWS_AS(fit_decay(synthetic_curve(short_times, [](double t) { return 1.0 / t; })),
                  InsufficientRange);
  const std::vector<long long> narrow = log_spaced_times(100, 5000, 12);
  CHECK_THROWS_AS(fit_decay(synthetic_curve(narrow, [](double t) { return 1.0 / t; })),
                  InsufficientRange);
}

TEST_CASE("fit_decay on a real short window") {
  const std::vector<long long> times = log_spaced_times(50, 5000, 10);
  const DecayCurve curve = sample_decay_curve(kBase, times);
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    CHECK(curve.points[i].second >= 0.0);
    CHECK(curve.points[i].second <= 1.0);
    if (i > 0) {
      CHECK(curve.points[i].first > curve.points[i - 1].first);
      CHECK(curve.points[i].second < curve.points[i - 1].second);
    }
  }
  const DecayFit fit = fit_decay(curve);
  CHECK(fit.slope > -0.6);
  CHECK(fit.slope < -0.4);
  CHECK(fit.min_tv_sqrt_t > 0.0);

  const BoundParams bounds = derive_bound_params(curve);
  CHECK(bounds.c_upper > 0.0);
  CHECK(bounds.c_lower > 0.0);
  CHECK(bounds.c_lower == doctest::Approx(fit.min_tv_sqrt_t));
  CHECK(bounds.fit_window.first == 50);
  CHECK(bounds.fit_window.second == 5000);
  // The calibrated upper constant must dominate the window it came from.
  for (const auto& [t, tv] : curve.points) {
    CHECK(decay_upper_bound(kBase, t, bounds.c_upper) >= tv * (1.0 - 1e-12));
  }
}

TEST_CASE("sample_decay_curve is reproducible") {
  const std::vector<long long> times = log_spaced_times(10, 1000, 6);
  const DecayCurve a = sample_decay_curve(kBase, times);
  const DecayCurve b = sample_decay_curve(kBase, times);
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    CHECK(a.points[i].second == b.points[i].second);
  }
}

TEST_CASE("spectral_gap_report") {
  const GapReport quarter = spectral_gap_report(kBase);
  CHECK(quarter.support_lower == doctest::Approx(-0.6).epsilon(1e-15));
  CHECK(quarter.support_upper == 1.0);
  CHECK(quarter.atom_location == 1.0);
  CHECK(quarter.gap == 0.0);

  ChainSpec unit = kBase;
  unit.lambda = 1.0;
  CHECK(spectral_gap_report(unit).support_lower == 0.0);

  ChainSpec general{{{0.5, -0.25}, 2.0}, 0.0, 0};
  general.lambda = lambda_min(general.params);
  CHECK(spectral_gap_report(general).gap == 0.0);
}
