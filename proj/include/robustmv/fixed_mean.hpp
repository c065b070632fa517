#pragma once

// Tilting with the alternative mean pinned to mu. The effective risk aversion
// no longer depends on the portfolio except through S, and the fixed point
// collapses to a quadratic in Gamma:
//   (C - theta gamma) Gamma^2 - gamma C Gamma - theta gamma D = 0.
// The minimum-variance measure (gamma treated as 1, no mean term) is handled
// here too since its optimum never moves.

#include <cmath>
#include <string>

#include "robustmv/nominal.hpp"
#include "robustmv/robust.hpp"

namespace robustmv {

struct GXSolution {
  double theta = 0.0;
  double gamma_gx = 0.0;
  Portfolio portfolio;
  double entropy = 0.0;
  double risk_value = 0.0;
};

/// Upper end of theta for which the fixed-mean problem is defined: theta gamma < C.
inline double gx_theta_limit(const MarketModel& model) {
  return model.constants().C / model.gamma();
}

/// Most negative theta on the continuous branch through theta = 0. Below it
/// the positive root turns complex; the best case continues on the other root
/// (see gx_best_case). Equals -infinity when D = 0.
inline double gx_theta_fold(const MarketModel& model) {
  const auto& k = model.constants();
  const double g = model.gamma();
  if (!(k.D > 0.0)) return -INFINITY;
  return k.C * (k.D - std::sqrt(k.D * k.D + g * g * k.D)) / (2.0 * g * k.D);
}

/// Gamma^GX(theta) = (gamma C + sqrt(gamma^2 C^2 + 4 theta gamma (C - theta gamma) D)) / (2 (C - theta gamma)).
inline double gx_gamma(const MarketModel& model, double theta) {
  const auto& k = model.constants();
  const double g = model.gamma();
  if (theta * g >= k.C * (1.0 - 1e-12)) {
    throw Error(ErrorCode::ThetaOutOfDomain,
                "theta*gamma = " + std::to_string(theta * g) +
                    " is not below C = " + std::to_string(k.C));
  }
  if (std::abs(theta) < kThetaZero) return g;
  const double slack = k.C - theta * g;
  const double disc = g * g * k.C * k.C + 4.0 * theta * g * slack * k.D;
  if (disc < 0.0) {
    throw Error(ErrorCode::NegativeDiscriminant,
                "no real effective risk aversion at theta = " +
                    std::to_string(theta));
  }
  return (g * k.C + std::sqrt(disc)) / (2.0 * slack);
}

/// R = 1/2 (x - 1 - ln x) with x = Gamma/gamma.
inline double gx_entropy_from_ratio(double x) {
  // x - 1 - ln x, with log1p for x near 1
  const double d = x - 1.0;
  return 0.5 * (d - std::log1p(d));
}

/// (Gamma - D/Gamma)/(2C) - A/C: gamma/2 S~ - a'mu at the two-fund optimum.
inline double gx_risk_value_from_gamma(const MarketModel& model, double gam) {
  const auto& k = model.constants();
  return (gam - k.D / gam) / (2.0 * k.C) - k.A / k.C;
}

inline Portfolio gx_portfolio(const MarketModel& model, double theta) {
  if (std::abs(theta) < kThetaZero) return nominal_portfolio(model);
  return two_fund_portfolio(model, gx_gamma(model, theta));
}

inline double gx_entropy(const MarketModel& model, double theta) {
  if (std::abs(theta) < kThetaZero) return 0.0;
  return gx_entropy_from_ratio(gx_gamma(model, theta) / model.gamma());
}

inline double gx_risk_value(const MarketModel& model, double theta) {
  return gx_risk_value_from_gamma(model, gx_gamma(model, theta));
}

inline GXSolution gx_solution(const MarketModel& model, double theta) {
  GXSolution sol;
  sol.theta = theta;
  sol.gamma_gx = gx_gamma(model, theta);
  sol.portfolio = two_fund_portfolio(model, sol.gamma_gx);
  sol.entropy = gx_entropy_from_ratio(sol.gamma_gx / model.gamma());
  sol.risk_value = gx_risk_value_from_gamma(model, sol.gamma_gx);
  return sol;
}

/// Best case on the ball surface, in closed form. With x = Gamma/gamma < 1
/// the entropy only depends on x, so x is the root of 1/2 (x - 1 - ln x) = eta
/// below 1; the variance and theta follow from the fixed point. Beyond the
/// fold this is the other root of the quadratic, which the positive-root
/// formula cannot reach.
inline GXSolution gx_best_case(const MarketModel& model, double eta) {
  const auto& k = model.constants();
  const double g = model.gamma();
  GXSolution sol;
  if (eta == 0.0) return gx_solution(model, 0.0);
  // x - 1 - ln x is decreasing on (0, 1)
  const auto b = detail::bisect(
      1e-300, 1.0, [&](double x) { return gx_entropy_from_ratio(x) < eta; },
      0.0, 4000);
  const double r_lo = std::abs(gx_entropy_from_ratio(b.lo) - eta);
  const double r_hi = std::abs(gx_entropy_from_ratio(b.hi) - eta);
  const double x = r_lo <= r_hi ? b.lo : b.hi;
  sol.gamma_gx = g * x;
  const double s = (k.D / (sol.gamma_gx * sol.gamma_gx) + 1.0) / k.C;
  sol.theta = (1.0 - 1.0 / x) / (g * s);
  sol.portfolio = two_fund_portfolio(model, sol.gamma_gx);
  sol.entropy = gx_entropy_from_ratio(x);
  sol.risk_value = gx_risk_value_from_gamma(model, sol.gamma_gx);
  return sol;
}

/// Alternative law for the fixed-mean measure: Sigma~ from the rank-one
/// update, mean unchanged.
inline AlternativeModel gx_alternative_model(const MarketModel& model,
                                             double theta, const Portfolio& a) {
  return alternative_model(model, theta, a, Variant::fixed_mean);
}

/// Robust minimum-variance portfolio: always Sigma^-1 1 / C.
inline Portfolio min_variance_portfolio_robust(const MarketModel& model,
                                               double theta) {
  const double limit = model.constants().C;
  if (theta >= limit) {
    throw Error(ErrorCode::ThetaOutOfDomain,
                "theta = " + std::to_string(theta) +
                    " is not below C = " + std::to_string(limit));
  }
  return min_variance_portfolio(model);
}

/// Entropy of the minimum-variance tilt at the minimum-variance portfolio.
inline double min_variance_entropy(const MarketModel& model, double theta) {
  const double c = model.constants().C;
  if (theta >= c) {
    throw Error(ErrorCode::ThetaOutOfDomain,
                "theta = " + std::to_string(theta) + " is not below C");
  }
  return 0.5 * detail::tilt_entropy_core(theta / c);
}

/// 1/2 a'Sigma~ a = 1/(2 (C - theta)).
inline double min_variance_risk_value(const MarketModel& model, double theta) {
  const double c = model.constants().C;
  if (theta >= c) {
    throw Error(ErrorCode::ThetaOutOfDomain,
                "theta = " + std::to_string(theta) + " is not below C");
  }
  return 0.5 / (c - theta);
}

/// True iff mu is a multiple of 1, i.e. the nominal and robust portfolios
/// coincide for every theta. Tested on the direction of Sigma^-1 mu since
/// D itself is dominated by roundoff for mu close to proportional.
inline bool portfolios_coincide(const MarketModel& model) {
  const auto& k = model.constants();
  const VectorXd diff = k.C * model.inv_sigma_mu() - k.A * model.inv_sigma_ones();
  return diff.lpNorm<Eigen::Infinity>() <=
         1e-10 * model.inv_sigma_mu().lpNorm<Eigen::Infinity>();
}

}  // namespace robustmv
