#pragma once

#include "kmwalk/chain.hpp"
#include "kmwalk/distribution.hpp"
#include "kmwalk/quadrature.hpp"

namespace kmwalk {

// Continuous-part Karlin-McGregor integrals for the shifted chain,
//   I_n = int_{(-1,1)} ((x+lambda)/(1+lambda))^t Q_j(x) Q_n(x) dpsi(x),
// for n = 0..j+t, on one shared rule of exact degree 2(j+t). Every Q_n at a
// node comes from a single upward recurrence sweep; node blocks are fixed and
// reduced in block order, so results do not depend on the thread count.
std::vector<double> km_moments(const ChainSpec& spec, long long t);

// Same integrals on a rule of the given exact degree (>= 2(j+t) reproduces
// km_moments; larger degrees serve the doubling exactness check).
std::vector<double> km_moments_with_degree(const ChainSpec& spec, long long t,
                                           long long degree);

// p_t(i,k) of the shifted chain; exact 0 when |i-k| > t without touching
// quadrature.
double transition_probability(const ChainSpec& spec, int i, int k, long long t);

// mu_t over sites 0..j+t (entries beyond are exactly zero and not stored).
DistributionSnapshot distribution_at(const ChainSpec& spec, long long t);

// ||nu - mu_t||_TV = (1/2) [ sum_{n<=j+t} pi_n |I_n| + sum_{n>j+t} nu_n ],
// the tail analytic. Requires a positive recurrent chain (N > 0).
double tv_distance(const ChainSpec& spec, long long t);

struct CappedTv {
  double value = 0.0;
  double error_estimate = 0.0;  // |value - half-rule value|, 0 when exact
  bool capped = false;
};

// Exact below the node cap; beyond it (Chebyshev line only) evaluates on
// max_nodes and max_nodes/2 and reports the doubling difference as the error
// estimate.
CappedTv tv_distance_capped(const ChainSpec& spec, long long t, std::size_t max_nodes);

}  // namespace kmwalk
