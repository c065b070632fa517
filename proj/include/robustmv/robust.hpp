#pragma once

// Worst-case (theta > 0) and best-case (theta < 0) mean-variance selection
// under an exponential change of measure m = exp(theta V_a) / E[exp(theta V_a)].
//
// For a portfolio a with variance S = a'Sigma a and loading x = theta*gamma*S,
// the tilted law is again Gaussian as long as x < 1:
//   Sigma~ = Sigma + theta*gamma Sigma a a'Sigma / (1 - x),
//   mu~    = mu - theta Sigma~ a            (general variant),
//   mu~    = mu                             (fixed-mean and min-variance).
// The optimal portfolio keeps the two-fund form with gamma replaced by
//   Gamma(S) = (gamma (1-x) + theta) / (1-x)^2,
// evaluated at the root S* of S = (D / Gamma(S)^2 + 1) / C.

#include <cmath>
#include <string>

#include "robustmv/detail/bisection.hpp"
#include "robustmv/market_model.hpp"
#include "robustmv/nominal.hpp"
#include "robustmv/variant.hpp"

namespace robustmv {

/// |theta| below this is treated as the nominal problem.
inline constexpr double kThetaZero = 1e-10;

struct AlternativeModel {
  double theta = 0.0;
  VectorXd mu_tilde;
  MatrixXd sigma_tilde;
  VectorXd base_weights;  ///< portfolio that generated the tilt
};

/// Risk aversion inside V for the variant; the min-variance measure uses 1.
inline double risk_aversion(const MarketModel& model, Variant variant) {
  return variant == Variant::min_variance ? 1.0 : model.gamma();
}

/// 1 / (gamma a'Sigma a): the tilt is integrable iff theta < theta_max(a).
inline double theta_max(const MarketModel& model, const Portfolio& a,
                        Variant variant = Variant::general) {
  return 1.0 / (risk_aversion(model, variant) * a.variance);
}

namespace detail {

inline double checked_slack(double theta, double gamma, double s) {
  const double q = 1.0 - theta * gamma * s;
  if (!(q > 0.0)) {
    throw Error(ErrorCode::ThetaOutOfDomain,
                "theta = " + std::to_string(theta) +
                    " violates theta*gamma*S < 1 (S = " + std::to_string(s) +
                    ")");
  }
  return q;
}

}  // namespace detail

/// Gamma(S; theta, gamma) = (gamma (1 - theta gamma S) + theta) / (1 - theta gamma S)^2.
inline double gamma_eff(double s, double theta, double gamma) {
  const double q = 1.0 - theta * gamma * s;
  if (!(q > 0.0)) {
    throw Error(ErrorCode::DomainViolation,
                "1 - theta*gamma*S = " + std::to_string(q) + " is not positive");
  }
  return (gamma * q + theta) / (q * q);
}

/// Effective risk aversion of the variant at variance S:
/// Gamma for the general measure, gamma / (1 - theta gamma S) when the
/// alternative mean is pinned.
inline double gamma_eff(double s, double theta, const MarketModel& model,
                        Variant variant) {
  const double g = risk_aversion(model, variant);
  if (variant == Variant::general) return gamma_eff(s, theta, g);
  const double q = 1.0 - theta * g * s;
  if (!(q > 0.0)) {
    throw Error(ErrorCode::DomainViolation,
                "1 - theta*gamma*S = " + std::to_string(q) + " is not positive");
  }
  return g / q;
}

/// Gaussian law of X under the optimal tilt for portfolio a.
/// Sigma~ comes from the Sherman-Morrison rank-one update, never from a dense
/// inverse of Sigma^-1 - theta gamma a a'.
inline AlternativeModel alternative_model(const MarketModel& model,
                                          double theta, const Portfolio& a,
                                          Variant variant = Variant::general) {
  AlternativeModel alt;
  alt.theta = theta;
  alt.base_weights = a.weights;
  if (theta == 0.0) {
    alt.mu_tilde = model.mu();
    alt.sigma_tilde = model.sigma();
    return alt;
  }
  const double g = risk_aversion(model, variant);
  const double q = detail::checked_slack(theta, g, a.variance);
  const VectorXd sa = model.sigma() * a.weights;
  alt.sigma_tilde = model.sigma() + (theta * g / q) * sa * sa.transpose();
  // Sigma~ a = Sigma a / q, so mu~ = mu - theta Sigma a / q.
  alt.mu_tilde = variant == Variant::general
                     ? VectorXd(model.mu() - (theta / q) * sa)
                     : model.mu();
  return alt;
}

/// ln E[exp(theta V_a(X))] under the nominal model.
inline double log_mgf(const MarketModel& model, double theta,
                      const Portfolio& a, Variant variant = Variant::general) {
  if (theta == 0.0) return 0.0;
  const double g = risk_aversion(model, variant);
  const double s = a.variance;
  const double q = detail::checked_slack(theta, g, s);
  const double x = theta * g * s;
  double value = -0.5 * std::log1p(-x);
  if (variant != Variant::min_variance) value -= theta * a.weights.dot(model.mu());
  if (variant == Variant::general) value += 0.5 * theta * theta * s / q;
  return value;
}

/// Lagrangian at the optimal change of measure:
///   -1/(2 theta) ln(1 - theta gamma S) - a'mu + theta S / (2(1 - theta gamma S)) + eta/theta.
inline double lagrangian(const MarketModel& model, double theta,
                         const Portfolio& a, double eta,
                         Variant variant = Variant::general) {
  if (theta == 0.0) {
    throw Error(ErrorCode::ThetaZero, "the Lagrangian is singular at theta = 0");
  }
  const double g = risk_aversion(model, variant);
  const double s = a.variance;
  const double q = detail::checked_slack(theta, g, s);
  double value = -std::log1p(-theta * g * s) / (2.0 * theta) + eta / theta;
  if (variant != Variant::min_variance) value -= a.weights.dot(model.mu());
  if (variant == Variant::general) value += 0.5 * theta * s / q;
  return value;
}

/// KL divergence of the tilted law for portfolio a from the nominal one:
///   (theta/2) S Gamma(S) + 1/2 ln(1 - theta gamma S)    (general),
///   1/2 (x/(1-x) + ln(1-x)),  x = theta gamma S          (fixed mean).
inline double relative_entropy_at(const MarketModel& model, double theta,
                                  const Portfolio& a,
                                  Variant variant = Variant::general) {
  if (theta == 0.0) return 0.0;
  const double g = risk_aversion(model, variant);
  const double s = a.variance;
  const double q = detail::checked_slack(theta, g, s);
  double r = 0.5 * detail::tilt_entropy_core(theta * g * s);
  // mean shift term 1/2 (mu~-mu)' Sigma^-1 (mu~-mu)
  if (variant == Variant::general) r += 0.5 * theta * theta * s / (q * q);
  return r;
}

/// E[m* V_a] for a fixed portfolio: the risk measure under the tilted law.
inline double alternative_risk_value(const MarketModel& model, double theta,
                                     const Portfolio& a,
                                     Variant variant = Variant::general) {
  const double g = risk_aversion(model, variant);
  const double s = a.variance;
  const double q = detail::checked_slack(theta, g, s);
  const double s_tilde = s / q;  // a'Sigma~ a
  switch (variant) {
    case Variant::general:
      // E~[(a'(X-mu))^2] = a'Sigma~a + (theta a'Sigma~a)^2, a'mu~ = a'mu - theta a'Sigma~a
      return 0.5 * g * (s_tilde + theta * theta * s_tilde * s_tilde) -
             a.weights.dot(model.mu()) + theta * s_tilde;
    case Variant::fixed_mean:
      return 0.5 * g * s_tilde - a.weights.dot(model.mu());
    case Variant::min_variance:
      return 0.5 * s_tilde;
  }
  return 0.0;
}

/// E[V_a] under the nominal model for the variant's risk measure.
inline double risk_value(const MarketModel& model, const Portfolio& a,
                         Variant variant) {
  if (variant == Variant::min_variance) return 0.5 * a.variance;
  return nominal_risk_value(model, a);
}

/// S - (D / Gamma(S)^2 + 1) / C, the fixed-point residual.
inline double fixed_point_residual(const MarketModel& model, double theta,
                                   double s) {
  const auto& k = model.constants();
  const double gam = gamma_eff(s, theta, model.gamma());
  return s - (k.D / (gam * gam) + 1.0) / k.C;
}

namespace detail {

inline double polish_fixed_point(const MarketModel& model, double theta,
                                 const Bracket& b) {
  const double r_lo = std::abs(fixed_point_residual(model, theta, b.lo));
  const double r_hi = std::abs(fixed_point_residual(model, theta, b.hi));
  const double s = r_lo <= r_hi ? b.lo : b.hi;
  const double r = std::min(r_lo, r_hi);
  if (!b.converged || r > 1e-12 * std::max(1.0, s)) {
    throw Error(ErrorCode::ToleranceNotReached,
                "fixed-point residual " + std::to_string(r) + " at theta = " +
                    std::to_string(theta));
  }
  return s;
}

}  // namespace detail

/// Variance S*(theta) of the optimal portfolio.
///
/// theta > 0: the residual is increasing on [1/C, 1/(theta gamma)) and changes
/// sign exactly once whenever theta gamma < C; outside that range the bracket
/// is empty and NoBracket is raised.
///
/// theta < 0: every root lies above the nominal variance. The branch that
/// continues the nominal solution is the first up-crossing of the residual
/// with Gamma > 0 (a local minimum of the Lagrangian in a). It is located by a
/// geometric scan above the nominal variance followed by bisection, and it
/// ceases to exist past a fold in theta, reported as NoBracket.
inline double solve_S_star(const MarketModel& model, double theta) {
  const auto& k = model.constants();
  const double g = model.gamma();
  const double s_min = 1.0 / k.C;
  if (std::abs(theta) < kThetaZero) return nominal_variance(model);

  if (theta > 0.0) {
    const double s_max = (1.0 - 1e-12) / (theta * g);
    if (!(s_max > s_min)) {
      throw Error(ErrorCode::NoBracket,
                  "theta*gamma = " + std::to_string(theta * g) +
                      " >= C = " + std::to_string(k.C) +
                      ": no admissible variance");
    }
    if (k.D == 0.0) return s_min;
    const double r_lo = fixed_point_residual(model, theta, s_min);
    const double r_hi = fixed_point_residual(model, theta, s_max);
    if (!(r_lo <= 0.0 && r_hi > 0.0)) {
      throw Error(ErrorCode::NoBracket, "fixed-point residual does not change sign");
    }
    const auto b = detail::bisect(
        s_min, s_max,
        [&](double s) { return fixed_point_residual(model, theta, s) > 0.0; },
        1e-14, 200);
    return detail::polish_fixed_point(model, theta, b);
  }

  // theta < 0
  if (k.D == 0.0) {
    if (gamma_eff(s_min, theta, g) > 0.0) return s_min;
    throw Error(ErrorCode::NoBracket,
                "Gamma <= 0 at the minimum-variance portfolio for theta = " +
                    std::to_string(theta));
  }
  auto above = [&](double s) {
    return gamma_eff(s, theta, g) > 0.0 &&
           fixed_point_residual(model, theta, s) > 0.0;
  };
  const double w0 = nominal_variance(model) - s_min;
  constexpr int kStepsPerOctave = 16;
  constexpr int kOctaves = 60;
  double prev = s_min + w0;
  for (int i = 1; i <= kStepsPerOctave * kOctaves; ++i) {
    const double s = s_min + w0 * std::exp2(static_cast<double>(i) / kStepsPerOctave);
    if (above(s)) {
      const auto b = detail::bisect(prev, s, above, 1e-14, 200);
      return detail::polish_fixed_point(model, theta, b);
    }
    prev = s;
  }
  throw Error(ErrorCode::NoBracket,
              "no stationary branch for theta = " + std::to_string(theta) +
                  " (beyond the best-case fold)");
}

/// a*(theta): two-fund portfolio at Gamma(S*(theta)).
inline Portfolio worst_case_portfolio(const MarketModel& model, double theta) {
  if (std::abs(theta) < kThetaZero) return nominal_portfolio(model);
  const double s = solve_S_star(model, theta);
  return two_fund_portfolio(model, gamma_eff(s, theta, model.gamma()));
}

/// R(theta) = R(theta, a*(theta)).
inline double entropy_of_theta(const MarketModel& model, double theta) {
  if (std::abs(theta) < kThetaZero) return 0.0;
  return relative_entropy_at(model, theta, worst_case_portfolio(model, theta));
}

/// Risk measure of a*(theta) under its own tilted law.
inline double worst_case_risk_value(const MarketModel& model, double theta) {
  const Portfolio a = worst_case_portfolio(model, theta);
  if (std::abs(theta) < kThetaZero) return nominal_risk_value(model, a);
  return alternative_risk_value(model, theta, a);
}

/// Point on the best-case stationary curve parameterized by the variance.
struct BranchPoint {
  double variance;
  double theta;
  double gamma_eff;
};

/// For S above the nominal variance (D > 0), the stationarity condition fixes
/// Gamma = sqrt(D / (C (S - 1/C))) < gamma; returns the theta < 0 that
/// produces it. Following the curve in S reaches best-case solutions past the
/// fold where the theta-parameterized branch ends.
inline BranchPoint best_case_branch_point(const MarketModel& model, double s) {
  const auto& k = model.constants();
  const double g = model.gamma();
  const double w = s - 1.0 / k.C;
  if (!(k.D > 0.0) || !(w > 0.0)) {
    throw Error(ErrorCode::InvalidArgument,
                "best-case curve needs D > 0 and S > 1/C");
  }
  const double target = std::sqrt(k.D / (k.C * w));
  if (!(target < g)) {
    throw Error(ErrorCode::InvalidArgument,
                "S = " + std::to_string(s) + " is not above the nominal variance");
  }
  // Gamma(S; -u) decreases from gamma at u = 0 until it first reaches 0.
  auto below = [&](double u) {
    const double q = 1.0 + u * g * s;
    return (g * q - u) / (q * q) < target;
  };
  double hi;
  if (g * g * s < 1.0) {
    hi = g / (1.0 - g * g * s);
  } else {
    hi = 1.0;
    int guard = 0;
    while (!below(hi)) {
      hi *= 2.0;
      if (++guard > 2000) {
        throw Error(ErrorCode::NoBracket, "cannot bracket theta on the best-case curve");
      }
    }
  }
  const auto b = detail::bisect(0.0, hi, below, 0.0, 2000);
  const double u = 0.5 * (b.lo + b.hi);
  return {s, -u, gamma_eff(s, -u, g)};
}

/// Most negative theta for which the best-case branch obtained from
/// solve_S_star exists (the fold).
inline double best_case_theta_fold(const MarketModel& model) {
  auto fails = [&](double theta) {
    try {
      (void)solve_S_star(model, theta);
      return false;
    } catch (const Error& e) {
      if (e.code() == ErrorCode::NoBracket) return true;
      throw;
    }
  };
  // Parameterize by u = -theta so the predicate is increasing.
  double ok = 1e-6 * model.constants().C / model.gamma();
  while (fails(-ok)) ok *= 0.5;
  double bad = 2.0 * ok;
  int guard = 0;
  while (!fails(-bad)) {
    ok = bad;
    bad *= 2.0;
    if (++guard > 200) {
      throw Error(ErrorCode::NoBracket, "best-case branch has no fold");
    }
  }
  const auto b = detail::bisect(ok, bad, [&](double u) { return fails(-u); },
                                1e-13 * bad, 200);
  return -b.lo;
}

}  // namespace robustmv
