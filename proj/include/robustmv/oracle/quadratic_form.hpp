#pragma once

#include <Eigen/Dense>

#include "robustmv/robust.hpp"

namespace robustmv::oracle {

/// Var(X'MX + b'X) for X ~ N(m, V), M symmetric.
inline double quadratic_form_variance(const Eigen::MatrixXd& M,
                                      const Eigen::VectorXd& b,
                                      const Eigen::VectorXd& m,
                                      const Eigen::MatrixXd& V) {
  const Eigen::MatrixXd MV = M * V;
  const Eigen::VectorXd Mm = M * m;
  return 2.0 * (MV * MV).trace() + 4.0 * Mm.dot(V * Mm) + b.dot(V * b) +
         4.0 * b.dot(V * Mm);
}

/// V_a(X) written as X'MX + b'X + c.
struct QuadraticForm {
  Eigen::MatrixXd M;
  Eigen::VectorXd b;
  double c = 0.0;
};

inline QuadraticForm risk_measure_form(const MarketModel& model,
                                       const Portfolio& a, Variant variant) {
  const Eigen::VectorXd& w = a.weights;
  const double g = risk_aversion(model, variant);
  const double am = w.dot(model.mu());
  QuadraticForm q;
  q.M = 0.5 * g * w * w.transpose();
  // g/2 (a'X - a'mu)^2 = X'MX - g (a'mu) a'X + g/2 (a'mu)^2
  q.b = -g * am * w;
  q.c = 0.5 * g * am * am;
  if (variant == Variant::general) q.b -= w;
  if (variant == Variant::fixed_mean) q.c -= am;
  return q;
}

/// Variance of V_a under the tilted law of (theta, a).
inline double tilted_variance(const MarketModel& model, double theta,
                              const Portfolio& a, Variant variant) {
  const AlternativeModel alt = alternative_model(model, theta, a, variant);
  const QuadraticForm q = risk_measure_form(model, a, variant);
  return quadratic_form_variance(q.M, q.b, alt.mu_tilde, alt.sigma_tilde);
}

struct DerivativeCheck {
  double fd = 0.0;
  double analytic = 0.0;
};

/// Central difference of R(theta, a) in theta against theta Var~(V_a).
inline DerivativeCheck entropy_derivative_check(const MarketModel& model,
                                                double theta, const Portfolio& a,
                                                double h,
                                                Variant variant = Variant::general) {
  if (!(h > 0.0)) throw Error(ErrorCode::InvalidArgument, "step must be positive");
  auto r = [&](double t) {
    try {
      return relative_entropy_at(model, t, a, variant);
    } catch (const Error& e) {
      throw Error(ErrorCode::DomainViolation,
                  "theta +- h leaves the domain: " + std::string(e.what()));
    }
  };
  DerivativeCheck out;
  out.fd = (r(theta + h) - r(theta - h)) / (2.0 * h);
  out.analytic = theta == 0.0 ? 0.0 : theta * tilted_variance(model, theta, a, variant);
  return out;
}

}  // namespace robustmv::oracle
