#pragma once

#include <cmath>

namespace robustmv::detail {

struct Bracket {
  double lo;
  double hi;
  int iterations;
  bool converged;
};

/// Bisection on a monotone predicate: pred(lo) is false and pred(hi) is true
/// on entry and stay so. Stops once hi - lo <= tol or the midpoint can no
/// longer be represented strictly inside the bracket.
template <class Pred>
Bracket bisect(double lo, double hi, Pred&& pred, double tol, int max_iter) {
  for (int it = 0; it < max_iter; ++it) {
    if (std::abs(hi - lo) <= tol) return {lo, hi, it, true};
    const double mid = lo + 0.5 * (hi - lo);
    if (mid == lo || mid == hi) return {lo, hi, it, true};
    if (pred(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return {lo, hi, max_iter, std::abs(hi - lo) <= tol};
}

/// x/(1-x) + ln(1-x) for x < 1, accurate near x = 0 where the two terms cancel.
/// Twice the entropy of a rank-one variance tilt with loading x.
inline double tilt_entropy_core(double x) {
  if (std::abs(x) < 1e-2) {
    // sum_{k>=2} (k-1)/k x^k
    double term = x * x;
    double sum = 0.0;
    for (int k = 2; k <= 14; ++k) {
      sum += (k - 1.0) / k * term;
      term *= x;
    }
    return sum;
  }
  return x / (1.0 - x) + std::log1p(-x);
}

/// -ln(1-x)/x, continuous at x = 0 with value 1.
inline double log_ratio(double x) {
  if (std::abs(x) < 1e-8) return 1.0 + 0.5 * x;
  return -std::log1p(-x) / x;
}

}  // namespace robustmv::detail
