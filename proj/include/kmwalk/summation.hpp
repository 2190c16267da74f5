#pragma once

#include <cmath>
#include <cstdint>
#include <span>

namespace kmwalk {

// Neumaier-compensated accumulator. The correction term keeps what plain
// summation drops when many terms of mixed sign and magnitude are folded in.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  double raw_sum() const { return sum_; }
  double correction() const { return comp_; }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double compensated_total(std::span<const double> xs) {
  CompensatedSum acc;
  for (double x : xs) acc.add(x);
  return acc.value();
}

// base^n for integer n >= 0 by binary exponentiation; handles negative bases
// with exact sign, underflows cleanly to 0 for |base| < 1 and large n.
inline double ipow(double base, std::uint64_t n) {
  double result = 1.0;
  double b = base;
  while (n != 0) {
    if (n & 1u) result *= b;
    b *= b;
    n >>= 1;
  }
  return result;
}

}  // namespace kmwalk
