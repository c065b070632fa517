#pragma once

// Test-only reference computations, written without the library's solvers.

#include <cmath>
#include <functional>
#include <random>

#include "robustmv/robustmv.hpp"

namespace testing_support {

using robustmv::MarketModel;
using robustmv::MatrixXd;
using robustmv::VectorXd;

/// Plain bisection on a scalar function with f(lo), f(hi) of opposite sign.
inline double scalar_root(const std::function<double(double)>& f, double lo, double hi) {
  double flo = f(lo);
  for (int i = 0; i < 400; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    const double fm = f(mid);
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Roots of x - ln x = c (c > 1) above and below 1.
inline double x_minus_log_root_upper(double c) {
  return scalar_root([c](double x) { return x - std::log(x) - c; }, 1.0, c + 10.0);
}
inline double x_minus_log_root_lower(double c) {
  return scalar_root([c](double x) { return x - std::log(x) - c; }, 1e-300, 1.0);
}

/// Sigma^-1 by dense LU.
inline MatrixXd dense_inverse(const MatrixXd& m) { return m.fullPivLu().inverse(); }

/// Tilted covariance from the dense inverse of Sigma^-1 - theta gamma a a'.
inline MatrixXd dense_tilted_covariance(const MarketModel& model, double theta,
                                        const VectorXd& a, double gamma) {
  const MatrixXd prec = dense_inverse(model.sigma()) - theta * gamma * a * a.transpose();
  return dense_inverse(prec);
}

/// Largest mean a'mu among budget portfolios of variance s >= 1/C.
inline double frontier_mean(const MarketModel& model, double s) {
  const MatrixXd inv = dense_inverse(model.sigma());
  const VectorXd ones = VectorXd::Ones(model.size());
  const double A = ones.dot(inv * model.mu());
  const double B = model.mu().dot(inv * model.mu());
  const double C = ones.dot(inv * ones);
  const double D = std::max(0.0, B * C - A * A);
  return A / C + std::sqrt(std::max(0.0, D * (s - 1.0 / C) / C));
}

/// Entropy and tilted value of a portfolio with variance s and mean m under
/// the tilt theta, straight from the Gaussian formulas.
struct TiltPoint {
  double entropy;
  double value;
};

inline TiltPoint tilt_point(double theta, double s, double mean, double gamma,
                            bool mean_moves) {
  const double q = 1.0 - theta * gamma * s;
  const double st = s / q;
  double entropy = 0.5 * (theta * gamma * s / q + std::log(q));
  double value = 0.5 * gamma * st - mean;
  if (mean_moves) {
    entropy += 0.5 * theta * theta * s / (q * q);
    value += 0.5 * gamma * theta * theta * st * st + theta * st;
  }
  return {entropy, value};
}

/// Extreme value over the entropy ball for a portfolio with variance s:
/// theta chosen on the requested side so that the entropy equals eta.
inline double ball_extreme(double eta, double s, double mean, double gamma,
                           bool mean_moves, bool worst) {
  auto f = [&](double theta) {
    return tilt_point(theta, s, mean, gamma, mean_moves).entropy - eta;
  };
  double theta;
  if (worst) {
    theta = scalar_root(f, 0.0, (1.0 - 1e-15) / (gamma * s));
  } else {
    double lo = -1.0;
    while (f(lo) < 0.0) lo *= 2.0;
    theta = scalar_root(f, lo, 0.0);
  }
  return tilt_point(theta, s, mean, gamma, mean_moves).value;
}

/// min over S of ball_extreme at the frontier mean for S, by a log-spaced scan of
/// S - 1/C followed by golden-section refinement.
inline double robust_value_1d(const MarketModel& model, double eta, bool mean_moves,
                              bool worst) {
  const double C = VectorXd::Ones(model.size()).dot(dense_inverse(model.sigma()) *
                                                    VectorXd::Ones(model.size()));
  const double g = model.gamma();
  auto objective = [&](double log_w) {
    const double s = 1.0 / C + std::exp(log_w);
    return ball_extreme(eta, s, frontier_mean(model, s), g, mean_moves, worst);
  };
  double best_x = -40.0, best_f = objective(best_x);
  const double step = 0.05;
  for (double x = -40.0; x <= 12.0; x += step) {
    const double fx = objective(x);
    if (fx < best_f) {
      best_f = fx;
      best_x = x;
    }
  }
  double a = best_x - step, b = best_x + step;
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = objective(c), fd = objective(d);
  for (int i = 0; i < 200; ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = objective(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = objective(d);
    }
  }
  return std::min({best_f, fc, fd});
}

inline std::mt19937_64 seeded(std::uint64_t s) { return std::mt19937_64(s); }

}  // namespace testing_support
