#include "kmwalk/spectral.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "kmwalk/parallel.hpp"
#include "kmwalk/summation.hpp"

namespace kmwalk {

namespace {

constexpr std::size_t kNodeChunk = 2048;

// Accumulates I_n = sum_m w_m beta_m^t Q_j(x_m) Q_n(x_m) for n = 0..m_max.
// Nodes are processed in fixed blocks of kNodeChunk; per-block compensated
// partials are reduced in block order afterwards. A node whose power factor
// underflows to exactly 0 contributes exact zeros and is skipped outright.
std::vector<double> moments_with_rule(const ChainSpec& spec, long long t,
                                      const QuadratureRule& rule,
                                      const CoefficientTable& table,
                                      std::size_t m_max) {
  const std::size_t n_nodes = rule.nodes.size();
  const auto p = table.p();
  const auto r = table.r();
  const auto q = table.q();

  std::vector<double> inv_p(m_max), q_over_p(m_max);
  for (std::size_t n = 0; n < m_max; ++n) {
    inv_p[n] = 1.0 / p[n];
    q_over_p[n] = q[n] / p[n];
  }

  struct BlockPartial {
    std::vector<double> sum, comp;
    bool active = false;
  };
  const std::size_t n_blocks = (n_nodes + kNodeChunk - 1) / kNodeChunk;
  std::vector<BlockPartial> partials(n_blocks);

  const double lambda = spec.lambda;
  const int j = spec.origin;

  run_blocks(n_blocks, [&](std::size_t blk) {
    BlockPartial& part = partials[blk];
    const std::size_t lo = blk * kNodeChunk;
    const std::size_t hi = std::min(lo + kNodeChunk, n_nodes);
    for (std::size_t m = lo; m < hi; ++m) {
      const double x = rule.nodes[m];
      const double power = ipow((x + lambda) / (1.0 + lambda),
                                static_cast<std::uint64_t>(t));
      if (power == 0.0) continue;
      if (!part.active) {
        part.sum.assign(m_max + 1, 0.0);
        part.comp.assign(m_max + 1, 0.0);
        part.active = true;
      }

      double q_prev = 0.0, q_cur = 1.0;
      for (int n = 0; n < j; ++n) {
        const double next = (x - r[n]) * inv_p[n] * q_cur - q_over_p[n] * q_prev;
        q_prev = q_cur;
        q_cur = next;
      }
      const double g = rule.weights[m] * power * q_cur;

      q_prev = 0.0;
      q_cur = 1.0;
      double* sum = part.sum.data();
      double* comp = part.comp.data();
      for (std::size_t n = 0; n <= m_max; ++n) {
        const double contrib = g * q_cur;
        const double s = sum[n];
        const double tot = s + contrib;
        comp[n] += (std::abs(s) >= std::abs(contrib)) ? (s - tot) + contrib
                                                      : (contrib - tot) + s;
        sum[n] = tot;
        if (n < m_max) {
          const double next = (x - r[n]) * inv_p[n] * q_cur - q_over_p[n] * q_prev;
          q_prev = q_cur;
          q_cur = next;
        }
      }
    }
  });

  std::vector<double> out(m_max + 1);
  for (std::size_t n = 0; n <= m_max; ++n) {
    CompensatedSum acc;
    for (const BlockPartial& part : partials) {
      if (part.active) acc.add(part.sum[n]);
    }
    for (const BlockPartial& part : partials) {
      if (part.active) acc.add(part.comp[n]);
    }
    out[n] = acc.value();
  }
  return out;
}

void check_time(long long t) {
  if (t < 0) throw std::domain_error("time t must be nonnegative");
}

}  // namespace

std::vector<double> km_moments(const ChainSpec& spec, long long t) {
  check_time(t);
  return km_moments_with_degree(spec, t,
                                2 * (static_cast<long long>(spec.origin) + t));
}

std::vector<double> km_moments_with_degree(const ChainSpec& spec, long long t,
                                           long long degree) {
  check_time(t);
  const std::size_t m_max = static_cast<std::size_t>(spec.origin) + t;
  const QuadratureRule rule = build_rule(spec.params, degree);
  const CoefficientTable table(spec.params, m_max + 2);
  return moments_with_rule(spec, t, rule, table, m_max);
}

double transition_probability(const ChainSpec& spec, int i, int k, long long t) {
  check_time(t);
  if (i < 0 || k < 0) throw std::domain_error("transition_probability: sites must be >= 0");
  if (std::abs(i - k) > t) return 0.0;  // nearest-neighbor support bound

  const QuadratureRule rule = build_rule(spec.params, t + i + k);
  const std::size_t top = static_cast<std::size_t>(std::max(i, k));
  const CoefficientTable table(spec.params, top + 2);
  const auto p = table.p();
  const auto r = table.r();
  const auto q = table.q();

  const double lambda = spec.lambda;
  CompensatedSum acc;
  for (std::size_t m = 0; m < rule.nodes.size(); ++m) {
    const double x = rule.nodes[m];
    const double power =
        ipow((x + lambda) / (1.0 + lambda), static_cast<std::uint64_t>(t));
    if (power == 0.0) continue;
    double q_prev = 0.0, q_cur = 1.0, q_i = 1.0, q_k = 1.0;
    for (std::size_t n = 0; n < top; ++n) {
      if (n == static_cast<std::size_t>(i)) q_i = q_cur;
      if (n == static_cast<std::size_t>(k)) q_k = q_cur;
      const double next = ((x - r[n]) * q_cur - q[n] * q_prev) / p[n];
      q_prev = q_cur;
      q_cur = next;
    }
    if (top == static_cast<std::size_t>(i)) q_i = q_cur;
    if (top == static_cast<std::size_t>(k)) q_k = q_cur;
    acc.add(rule.weights[m] * power * q_i * q_k);
  }

  const ReversibilityMeasure rev = reversibility(table, static_cast<std::size_t>(k));
  const double atom = spec.params.big_n / (spec.params.big_n + 1.0);
  const double raw = rev.values[static_cast<std::size_t>(k)] * (acc.value() + atom);

  const double deviation = std::max({0.0, -raw, raw - 1.0});
  if (deviation > 1e-9) {
    throw std::logic_error("transition_probability: value " + std::to_string(raw) +
                           " outside [0,1] beyond quadrature tolerance");
  }
  return std::min(1.0, std::max(0.0, raw));
}

namespace {

struct TvParts {
  double tv = 0.0;
  std::vector<double> moments;
};

TvParts tv_from_rule(const ChainSpec& spec, long long t, const QuadratureRule& rule,
                     const CoefficientTable& table, const ReversibilityMeasure& rev) {
  const std::size_t m_max = static_cast<std::size_t>(spec.origin) + t;
  TvParts parts;
  parts.moments = moments_with_rule(spec, t, rule, table, m_max);
  CompensatedSum acc;
  for (std::size_t n = 0; n <= m_max; ++n) {
    acc.add(rev.values[n] * std::abs(parts.moments[n]));
  }
  parts.tv = 0.5 * (acc.value() + rev.tail / rev.rho);
  return parts;
}

}  // namespace

DistributionSnapshot distribution_at(const ChainSpec& spec, long long t) {
  check_time(t);
  const std::size_t m_max = static_cast<std::size_t>(spec.origin) + t;
  const QuadratureRule rule = build_rule(spec.params, 2 * static_cast<long long>(m_max));
  const CoefficientTable table(spec.params, m_max + 2);
  const std::vector<double> moments = moments_with_rule(spec, t, rule, table, m_max);
  const ReversibilityMeasure rev = reversibility(table, m_max);

  DistributionSnapshot snap;
  snap.time = t;
  snap.origin = spec.origin;
  snap.method = Method::spectral;
  snap.probabilities.resize(m_max + 1);
  CompensatedSum mass;
  for (std::size_t n = 0; n <= m_max; ++n) {
    const double nu_n = rev.values[n] / rev.rho;
    double mu_n = rev.values[n] * moments[n] + nu_n;
    if (mu_n < -1e-12) {
      throw std::logic_error("distribution_at: entry " + std::to_string(mu_n) +
                             " at site " + std::to_string(n) + " below -1e-12");
    }
    if (mu_n < 0.0) mu_n = 0.0;
    snap.probabilities[n] = mu_n;
    mass.add(mu_n);
  }
  snap.mass_deficit = 1.0 - mass.value();
  return snap;
}

double tv_distance(const ChainSpec& spec, long long t) {
  check_time(t);
  if (!(spec.params.big_n > 0.0)) {
    throw NotPositiveRecurrent("tv_distance: requires N > 0");
  }
  const std::size_t m_max = static_cast<std::size_t>(spec.origin) + t;
  const QuadratureRule rule = build_rule(spec.params, 2 * static_cast<long long>(m_max));
  const CoefficientTable table(spec.params, m_max + 2);
  const ReversibilityMeasure rev = reversibility(table, m_max);
  return tv_from_rule(spec, t, rule, table, rev).tv;
}

CappedTv tv_distance_capped(const ChainSpec& spec, long long t, std::size_t max_nodes) {
  check_time(t);
  if (max_nodes < 4) throw std::domain_error("tv_distance_capped: cap too small");
  const std::size_t exact_nodes = static_cast<std::size_t>(spec.origin) + t + 1;
  if (exact_nodes <= max_nodes) {
    return CappedTv{tv_distance(spec, t), 0.0, false};
  }
  if (!is_chebyshev(spec.params)) {
    throw DegreeTooLarge(
        "tv_distance_capped: capped mode is only available on the Chebyshev line");
  }
  const std::size_t m_max = static_cast<std::size_t>(spec.origin) + t;
  const CoefficientTable table(spec.params, m_max + 2);
  const ReversibilityMeasure rev = reversibility(table, m_max);
  const QuadratureRule half =
      build_rule(spec.params, 2 * static_cast<long long>(max_nodes / 2) - 1);
  const QuadratureRule full =
      build_rule(spec.params, 2 * static_cast<long long>(max_nodes) - 1);
  const double tv_half = tv_from_rule(spec, t, half, table, rev).tv;
  const double tv_full = tv_from_rule(spec, t, full, table, rev).tv;
  return CappedTv{tv_full, std::abs(tv_full - tv_half), true};
}

}  // namespace kmwalk
