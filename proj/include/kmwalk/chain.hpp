#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "kmwalk/distribution.hpp"
#include "kmwalk/koornwinder.hpp"

namespace kmwalk {

struct ChainSpec {
  KoornwinderParams params;
  double lambda = 0.0;
  int origin = 0;
};

// Throws std::domain_error on invalid parameters, origin < 0, or lambda below
// the Markov threshold for this family.
void validate(const ChainSpec& spec);

// One row of the tridiagonal operator in the Q_n recurrence
//   p_n Q_{n+1} + r_n Q_n + q_n Q_{n-1} = x Q_n.
// Unshifted rows sum to 1 but may have r_n < 0; shifted rows are genuine
// transition probabilities.
struct RecurrenceCoeffs {
  int site = 0;
  double q = 0.0;
  double r = 0.0;
  double p = 0.0;
  bool shifted = false;
};

struct ReversibilityMeasure {
  std::vector<double> values;  // pi_0..pi_M with pi_0 = 1
  double tail = 0.0;           // sum_{n>M} pi_n (analytic or fitted)
  double rho = 0.0;            // full mass including the tail
};

struct SingularSystem : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotStabilized : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NegativeEntry : std::runtime_error {
  NegativeEntry(const std::string& what, int site_) : std::runtime_error(what), site(site_) {}
  int site;
};
struct MeasureUnderflow : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotPositiveRecurrent : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Recurrence row from evaluations of Q_{n-1}, Q_n, Q_{n+1}: a 2x2 solve at
// x in {1, 0} for n = 0, and for n >= 1 a 3x3 system from x = 1, x = -1 and
// the differentiated recurrence at x = 0 (fallback abscissa 1/2 when that
// point set goes singular, which it does at n = 1).
RecurrenceCoeffs coeffs_general(const KoornwinderParams& params, int n);

// Closed forms on the Chebyshev line.
RecurrenceCoeffs coeffs_chebyshev(double big_n, int n);

// Smallest lambda making every shifted row nonnegative: closed form
// 2N^2/((1+N)(1+3N)) on the Chebyshev line, sup_n max(0, -r_n) scan elsewhere.
double lambda_min(const KoornwinderParams& params, int n_scan = 256);

// (q, r, p) -> (q, r+lambda, p)/(1+lambda).
RecurrenceCoeffs shift(const RecurrenceCoeffs& coeffs, double lambda);

// Unshifted rows 0..size-1, closed form on the Chebyshev line and the 3x3
// solver elsewhere. Contiguous spans feed the hot recurrence sweeps.
class CoefficientTable {
 public:
  CoefficientTable(const KoornwinderParams& params, std::size_t size);

  std::size_t size() const { return p_.size(); }
  const KoornwinderParams& params() const { return params_; }

  RecurrenceCoeffs unshifted(std::size_t n) const;
  RecurrenceCoeffs shifted_row(std::size_t n, double lambda) const;

  std::span<const double> p() const { return p_; }
  std::span<const double> r() const { return r_; }
  std::span<const double> q() const { return q_; }

 private:
  KoornwinderParams params_;
  std::vector<double> p_, r_, q_;
};

// pi_0..pi_{up_to} by the running ratio pi_{n+1} = pi_n p_n / q_{n+1}, plus
// the mass beyond: exact telescoping tail on the Chebyshev line, a power-law
// fit on the last decade elsewhere.
ReversibilityMeasure reversibility(const CoefficientTable& coeffs, std::size_t up_to);

// sum_{n > after} pi_n for the Chebyshev family, exact.
double chebyshev_pi_tail(double big_n, std::size_t after);

// nu = pi / rho; mass_deficit carries the analytic nu-tail beyond the stored
// range. Throws NotPositiveRecurrent when pi is not summable.
DistributionSnapshot stationary(const ReversibilityMeasure& measure);

}  // namespace kmwalk
