#pragma once

#include <cstdint>
#include <stdexcept>

#include "kmwalk/chain.hpp"
#include "kmwalk/distribution.hpp"

namespace kmwalk {

struct TruncationTooSmall : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Rows 0..size-1 of the shifted operator. Row size-1 may leak mass upward;
// callers that need exactness keep size >= origin + t so the walk never
// reaches the edge.
struct TridiagonalOperator {
  std::vector<double> sub;    // q_1..q_{size-1}
  std::vector<double> diag;   // r_0..r_{size-1}
  std::vector<double> super;  // p_0..p_{size-2}

  std::size_t size() const { return diag.size(); }
  // mu <- mu P (row vector times the operator), compensated per entry.
  std::vector<double> apply_left(const std::vector<double>& mu) const;
};

TridiagonalOperator truncated_operator(const ChainSpec& spec, std::size_t size);

// mu_t = delta_j P^t by t row-vector sweeps over sites 0..size-1; exact for
// the nearest-neighbor walk whenever size - 1 >= origin + t (enforced).
DistributionSnapshot truncated_power(const ChainSpec& spec, long long t,
                                     std::size_t size);

// Empirical mu_t from independent walkers driven by a counter-based generator:
// the draw for (walker, step) is a pure function of the seed, so results are
// identical across thread counts and partitions.
DistributionSnapshot monte_carlo(const ChainSpec& spec, long long t,
                                 std::size_t walkers, std::uint64_t seed);

// Half L1 distance; the shorter snapshot is zero-padded.
double tv_between(const DistributionSnapshot& a, const DistributionSnapshot& b);

// Distance to the stationary distribution with the analytic nu-tail beyond
// the snapshot's stored range.
double tv_to_stationary(const DistributionSnapshot& a, const ChainSpec& spec);

}  // namespace kmwalk
