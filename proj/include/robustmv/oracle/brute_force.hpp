#pragma once

// Direct numerical minimization of the inner problem over the budget plane.
// Uses nothing from the fixed-point machinery: only the closed-form
// (1/theta) ln E[exp(theta V_a)] and its gradient.

#include <cmath>
#include <string>

#include "robustmv/detail/bisection.hpp"
#include "robustmv/robust.hpp"

namespace robustmv::oracle {

/// (1/theta) ln E[exp(theta V_a)], continuous through theta = 0. Infinite
/// outside the integrability domain.
inline double inner_objective(const MarketModel& model, double theta,
                              const VectorXd& a, Variant variant) {
  const double g = risk_aversion(model, variant);
  const double s = a.dot(model.sigma() * a);
  const double x = theta * g * s;
  if (!(x < 1.0)) return INFINITY;
  // -ln(1-x)/(2 theta) = g S/2 * (-ln(1-x)/x)
  double f = 0.5 * g * s * detail::log_ratio(x);
  if (variant != Variant::min_variance) f -= a.dot(model.mu());
  if (variant == Variant::general) f += 0.5 * theta * s / (1.0 - x);
  return f;
}

/// Gradient of inner_objective: Gamma(S) Sigma a - mu (no mu for min-variance).
inline VectorXd inner_gradient(const MarketModel& model, double theta,
                               const VectorXd& a, Variant variant) {
  const double s = a.dot(model.sigma() * a);
  const double gam = gamma_eff(s, theta, model, variant);
  VectorXd grad = gam * (model.sigma() * a);
  if (variant != Variant::min_variance) grad -= model.mu();
  return grad;
}

inline VectorXd project_to_budget_plane(VectorXd g) {
  g.array() -= g.mean();
  return g;
}

struct BruteForceResult {
  Portfolio portfolio;
  int iterations = 0;
  double gradient_norm = 0.0;
};

/// Projected gradient with Barzilai-Borwein trial steps and Armijo halving,
/// started from the equally weighted portfolio, or from the minimum-variance
/// one when theta is too large for equal weights.
inline BruteForceResult brute_force_minimize(const MarketModel& model,
                                             double theta, Variant variant,
                                             double tol, int max_iter = 100000) {
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tol must be positive");
  const auto n = model.size();
  VectorXd a = VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  double f = inner_objective(model, theta, a, variant);
  if (!std::isfinite(f)) {
    // smallest a'Sigma a on the budget plane, so inside whenever any point is
    a = min_variance_portfolio(model).weights;
    f = inner_objective(model, theta, a, variant);
  }
  if (!std::isfinite(f)) {
    throw Error(ErrorCode::ThetaOutOfDomain, "no budget-feasible start inside the domain");
  }
  VectorXd pg = project_to_budget_plane(inner_gradient(model, theta, a, variant));
  double step = 1.0 / model.sigma().diagonal().maxCoeff();
  VectorXd a_prev, pg_prev;
  for (int it = 0; it < max_iter; ++it) {
    const double gnorm = pg.norm();
    if (gnorm < tol) {
      BruteForceResult res;
      res.portfolio = make_portfolio(model, a);
      res.iterations = it;
      res.gradient_norm = gnorm;
      return res;
    }
    if (it > 0) {
      const VectorXd sk = a - a_prev;
      const VectorXd yk = pg - pg_prev;
      const double sy = sk.dot(yk);
      if (sy > 0.0) step = sk.squaredNorm() / sy;
    }
    bool accepted = false;
    for (int halvings = 0; halvings < 80; ++halvings, step *= 0.5) {
      VectorXd trial = a - step * pg;
      trial.array() += (1.0 - trial.sum()) / static_cast<double>(n);
      const double ft = inner_objective(model, theta, trial, variant);
      if (!std::isfinite(ft)) continue;
      const bool armijo = ft <= f - 1e-4 * step * pg.squaredNorm();
      bool roundoff = false;
      if (!armijo && std::abs(ft - f) <= 1e-14 * std::max(1.0, std::abs(f))) {
        // objective differences below resolution: accept on gradient decrease
        const VectorXd pt =
            project_to_budget_plane(inner_gradient(model, theta, trial, variant));
        roundoff = pt.norm() < gnorm;
      }
      if (armijo || roundoff) {
        a_prev = a;
        pg_prev = pg;
        a = std::move(trial);
        f = ft;
        pg = project_to_budget_plane(inner_gradient(model, theta, a, variant));
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      throw Error(ErrorCode::MaxIterations,
                  "line search stalled, gradient norm " + std::to_string(gnorm));
    }
  }
  throw Error(ErrorCode::MaxIterations,
              "no convergence, gradient norm " + std::to_string(pg.norm()));
}

inline Portfolio brute_force_portfolio(const MarketModel& model, double theta,
                                       Variant variant, double tol) {
  return brute_force_minimize(model, theta, variant, tol).portfolio;
}

}  // namespace robustmv::oracle
