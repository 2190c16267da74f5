#include "kmwalk/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>
#include <string>

#include "kmwalk/summation.hpp"

namespace kmwalk {

double QuadratureRule::integrate(const std::function<double(double)>& f) const {
  CompensatedSum acc;
  for (std::size_t i = 0; i < nodes.size(); ++i) acc.add(weights[i] * f(nodes[i]));
  return acc.value();
}

namespace {

QuadratureRule chebyshev_rule(const KoornwinderParams& params, std::size_t k_nodes) {
  QuadratureRule rule;
  rule.family = QuadratureFamily::gauss_chebyshev;
  rule.exact_degree = 2 * static_cast<long long>(k_nodes) - 1;
  rule.nodes.resize(k_nodes);
  rule.weights.assign(k_nodes, 1.0 / ((params.big_n + 1.0) * k_nodes));
  for (std::size_t i = 0; i < k_nodes; ++i) {
    // k = K - i gives ascending nodes cos((2k-1)pi/(2K)).
    const double k = static_cast<double>(k_nodes - i);
    rule.nodes[i] = std::cos((2.0 * k - 1.0) * std::numbers::pi / (2.0 * k_nodes));
  }
  return rule;
}

// Monic Jacobi recurrence x p_n = p_{n+1} + a_n p_n + b_n p_{n-1} for the
// probability-normalized weight; standard closed forms, no singularities for
// alpha, beta > -1.
void monic_jacobi_coeffs(double alpha, double beta, std::size_t count,
                         std::vector<double>& a, std::vector<double>& b) {
  const double ab = alpha + beta;
  a.resize(count);
  b.assign(count, 0.0);  // b[0] unused (measure normalized to mass 1)
  a[0] = (beta - alpha) / (ab + 2.0);
  for (std::size_t n = 1; n < count; ++n) {
    const double s = 2.0 * n + ab;
    a[n] = (beta * beta - alpha * alpha) / (s * (s + 2.0));
    if (n == 1) {
      b[1] = 4.0 * (alpha + 1.0) * (beta + 1.0) / ((ab + 2.0) * (ab + 2.0) * (ab + 3.0));
    } else {
      b[n] = 4.0 * n * (n + alpha) * (n + beta) * (n + ab) /
             (s * s * (s + 1.0) * (s - 1.0));
    }
  }
}

QuadratureRule golub_welsch_rule(const KoornwinderParams& params, std::size_t k_nodes) {
  std::vector<double> a, b;
  monic_jacobi_coeffs(params.jacobi.alpha, params.jacobi.beta, k_nodes + 1, a, b);

  Eigen::VectorXd diag(static_cast<Eigen::Index>(k_nodes));
  Eigen::VectorXd sub(static_cast<Eigen::Index>(k_nodes > 0 ? k_nodes - 1 : 0));
  for (std::size_t n = 0; n < k_nodes; ++n) diag[static_cast<Eigen::Index>(n)] = a[n];
  for (std::size_t n = 1; n < k_nodes; ++n) {
    sub[static_cast<Eigen::Index>(n - 1)] = std::sqrt(b[n]);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);

  std::vector<double> sqrt_b(k_nodes + 1, 0.0);
  for (std::size_t n = 1; n <= k_nodes; ++n) sqrt_b[n] = std::sqrt(b[n]);

  // Orthonormal-polynomial sweep: returns p_K and its derivative, plus the
  // Christoffel sum over p_0..p_{K-1} squared.
  auto sweep = [&](double x, double& pk, double& dpk, double& christoffel) {
    double pm1 = 0.0, p = 1.0, dpm1 = 0.0, dp = 0.0;
    CompensatedSum sum_sq;
    for (std::size_t j = 0; j < k_nodes; ++j) {
      sum_sq.add(p * p);
      const double pn = ((x - a[j]) * p - sqrt_b[j] * pm1) / sqrt_b[j + 1];
      const double dpn = ((x - a[j]) * dp + p - sqrt_b[j] * dpm1) / sqrt_b[j + 1];
      pm1 = p;
      p = pn;
      dpm1 = dp;
      dp = dpn;
    }
    pk = p;
    dpk = dp;
    christoffel = sum_sq.value();
  };

  QuadratureRule rule;
  rule.family = QuadratureFamily::gauss_jacobi;
  rule.exact_degree = 2 * static_cast<long long>(k_nodes) - 1;
  rule.nodes.resize(k_nodes);
  rule.weights.resize(k_nodes);
  for (std::size_t i = 0; i < k_nodes; ++i) {
    double x = solver.eigenvalues()[static_cast<Eigen::Index>(i)];
    double pk, dpk, christoffel;
    for (int polish = 0; polish < 2; ++polish) {
      sweep(x, pk, dpk, christoffel);
      if (dpk == 0.0) break;
      const double step = pk / dpk;
      if (!(std::abs(step) < 1e-8)) break;  // eigenvalue was already tight
      x -= step;
    }
    sweep(x, pk, dpk, christoffel);
    rule.nodes[i] = x;
    rule.weights[i] = 1.0 / (christoffel * (params.big_n + 1.0));
  }
  return rule;
}

}  // namespace

QuadratureRule build_rule(const KoornwinderParams& params, long long degree) {
  validate(params);
  if (degree < 0) throw std::domain_error("build_rule: degree must be nonnegative");
  const long long k_nodes = (degree + 2) / 2;
  if (is_chebyshev(params)) {
    if (k_nodes > 100'000'000LL) {
      throw DegreeTooLarge("build_rule: " + std::to_string(k_nodes) +
                           " Chebyshev nodes exceeds the 1e8 cap");
    }
    return chebyshev_rule(params, static_cast<std::size_t>(k_nodes));
  }
  if (k_nodes > 100'000LL) {
    throw DegreeTooLarge("build_rule: " + std::to_string(k_nodes) +
                         " Gauss-Jacobi nodes exceeds the 1e5 cap");
  }
  return golub_welsch_rule(params, static_cast<std::size_t>(k_nodes));
}

}  // namespace kmwalk
