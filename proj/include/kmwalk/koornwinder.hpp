#pragma once

#include "kmwalk/orthopoly.hpp"

namespace kmwalk {

struct KoornwinderParams {
  JacobiParams jacobi;
  double big_n = 0.0;  // weight N of the point mass at x = 1
};

// Throws std::domain_error unless alpha, beta > -1 and N >= 0.
void validate(const KoornwinderParams& params);

// The alpha = beta = -1/2 line, where everything has a closed form.
bool is_chebyshev(const KoornwinderParams& params);

// Orthogonality measure: continuous Jacobi density on (-1,1) carrying mass
// 1/(N+1), plus an atom of mass N/(N+1) at x = 1. The atom stays symbolic:
// integrals are quadrature over the continuous part plus one evaluation at 1.
struct SpectralMeasure {
  KoornwinderParams params;
  double density_coeff = 0.0;  // multiplies (1-x)^alpha (1+x)^beta
  double atom_mass = 0.0;
  double atom_location = 1.0;

  double density(double x) const;
  double continuous_mass() const { return 1.0 - atom_mass; }
};

SpectralMeasure spectral_measure(const KoornwinderParams& params);

// P_n^{alpha,beta,N}(x): the point-mass transform of the Jacobi polynomial,
// prefactor * A_n * [-N(1+x) d/dx + B_n] P_n^{alpha,beta}(x); equals 1 for
// n = 0 (the prefactor is bypassed there, Q_0 is the constant polynomial).
double koornwinder_raw(const KoornwinderParams& params, int n, double x);

// Q_n(x) = n! P_n^{alpha,beta,N}(x) / (alpha+1)_n, normalized so Q_n(1) = 1
// exactly (the endpoint is returned by identity, not through the formula).
double q_eval(const KoornwinderParams& params, int n, double x);

// d/dx Q_n(x).
double q_derivative(const KoornwinderParams& params, int n, double x);

// Closed form on the Chebyshev line: -N(x+1)U_{n-1}(x) + (1+2nN)T_n(x).
double q_chebyshev(double big_n, int n, double x);

}  // namespace kmwalk
