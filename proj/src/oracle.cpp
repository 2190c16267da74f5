#include "kmwalk/oracle.hpp"

#include <cmath>
#include <string>

#include "kmwalk/parallel.hpp"
#include "kmwalk/summation.hpp"

namespace kmwalk {

std::vector<double> TridiagonalOperator::apply_left(const std::vector<double>& mu) const {
  const std::size_t m = size();
  std::vector<double> out(m, 0.0);
  for (std::size_t n = 0; n < m; ++n) {
    CompensatedSum acc;
    if (n > 0) acc.add(mu[n - 1] * super[n - 1]);
    acc.add(mu[n] * diag[n]);
    if (n + 1 < m) acc.add(mu[n + 1] * sub[n]);
    out[n] = acc.value();
  }
  return out;
}

TridiagonalOperator truncated_operator(const ChainSpec& spec, std::size_t size) {
  const CoefficientTable table(spec.params, size);
  TridiagonalOperator op;
  op.diag.resize(size);
  op.sub.resize(size > 0 ? size - 1 : 0);
  op.super.resize(size > 0 ? size - 1 : 0);
  for (std::size_t n = 0; n < size; ++n) {
    const RecurrenceCoeffs row = table.shifted_row(n, spec.lambda);
    op.diag[n] = row.r;
    if (n + 1 < size) op.super[n] = row.p;
    if (n > 0) op.sub[n - 1] = row.q;
  }
  return op;
}

DistributionSnapshot truncated_power(const ChainSpec& spec, long long t,
                                     std::size_t size) {
  if (t < 0) throw std::domain_error("truncated_power: t must be nonnegative");
  const std::size_t needed = static_cast<std::size_t>(spec.origin) + t;
  if (size < needed + 1) {
    throw TruncationTooSmall("truncated_power: size " + std::to_string(size) +
                             " < origin + t + 1 = " + std::to_string(needed + 1));
  }
  const TridiagonalOperator op = truncated_operator(spec, size);
  std::vector<double> mu(size, 0.0);
  mu[static_cast<std::size_t>(spec.origin)] = 1.0;
  for (long long s = 0; s < t; ++s) mu = op.apply_left(mu);

  DistributionSnapshot snap;
  snap.time = t;
  snap.origin = spec.origin;
  snap.method = Method::matrix_power;
  snap.probabilities = std::move(mu);
  snap.mass_deficit = 1.0 - compensated_total(snap.probabilities);
  return snap;
}

namespace {

inline std::uint64_t splitmix_at(std::uint64_t state, std::uint64_t index) {
  std::uint64_t z = state + (index + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline double uniform01(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace

DistributionSnapshot monte_carlo(const ChainSpec& spec, long long t,
                                 std::size_t walkers, std::uint64_t seed) {
  if (t < 0) throw std::domain_error("monte_carlo: t must be nonnegative");
  if (walkers < 1) throw std::domain_error("monte_carlo: walkers must be >= 1");
  const std::size_t top = static_cast<std::size_t>(spec.origin) + t;
  const TridiagonalOperator op = truncated_operator(spec, top + 1);

  constexpr std::size_t kWalkerChunk = 1u << 14;
  const std::size_t n_blocks = (walkers + kWalkerChunk - 1) / kWalkerChunk;
  std::vector<std::vector<std::uint64_t>> counts(n_blocks);

  run_blocks(n_blocks, [&](std::size_t blk) {
    std::vector<std::uint64_t> local(top + 1, 0);
    const std::size_t lo = blk * kWalkerChunk;
    const std::size_t hi = std::min(lo + kWalkerChunk, walkers);
    for (std::size_t w = lo; w < hi; ++w) {
      const std::uint64_t walker_key = splitmix_at(seed, w);
      std::size_t site = static_cast<std::size_t>(spec.origin);
      for (long long step = 0; step < t; ++step) {
        const double u = uniform01(splitmix_at(walker_key, static_cast<std::uint64_t>(step)));
        // Inverse transform with fixed outcome order: down, stay, up.
        const double down = (site > 0) ? op.sub[site - 1] : 0.0;
        const double stay = op.diag[site];
        if (u < down) {
          --site;
        } else if (u < down + stay) {
          // stay
        } else {
          ++site;
        }
      }
      ++local[site];
    }
    counts[blk] = std::move(local);
  });

  std::vector<std::uint64_t> total(top + 1, 0);
  for (const auto& local : counts) {
    for (std::size_t n = 0; n <= top; ++n) total[n] += local[n];
  }

  DistributionSnapshot snap;
  snap.time = t;
  snap.origin = spec.origin;
  snap.method = Method::monte_carlo;
  snap.probabilities.resize(top + 1);
  for (std::size_t n = 0; n <= top; ++n) {
    snap.probabilities[n] =
        static_cast<double>(total[n]) / static_cast<double>(walkers);
  }
  snap.mass_deficit = 1.0 - compensated_total(snap.probabilities);
  return snap;
}

double tv_between(const DistributionSnapshot& a, const DistributionSnapshot& b) {
  const std::size_t m = std::max(a.probabilities.size(), b.probabilities.size());
  CompensatedSum acc;
  for (std::size_t n = 0; n < m; ++n) {
    const double pa = n < a.probabilities.size() ? a.probabilities[n] : 0.0;
    const double pb = n < b.probabilities.size() ? b.probabilities[n] : 0.0;
    acc.add(std::abs(pa - pb));
  }
  return 0.5 * acc.value();
}

double tv_to_stationary(const DistributionSnapshot& a, const ChainSpec& spec) {
  const std::size_t m = a.probabilities.size();
  const CoefficientTable table(spec.params, m + 1);
  const ReversibilityMeasure rev = reversibility(table, m - 1);
  if (!std::isfinite(rev.rho)) {
    throw NotPositiveRecurrent("tv_to_stationary: chain is not positive recurrent");
  }
  CompensatedSum acc;
  for (std::size_t n = 0; n < m; ++n) {
    acc.add(std::abs(a.probabilities[n] - rev.values[n] / rev.rho));
  }
  return 0.5 * (acc.value() + rev.tail / rev.rho);
}

}  // namespace kmwalk
