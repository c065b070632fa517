#pragma once

// Outer problem: pick theta so that the optimal tilt sits on the surface of
// the relative-entropy ball, R(theta*) = eta, and sweep eta into frontiers.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "robustmv/fixed_mean.hpp"
#include "robustmv/oracle/gaussian_kl.hpp"
#include "robustmv/robust.hpp"

namespace robustmv {

inline constexpr double kEntropyTolerance = 1e-10;

struct CalibrationRequest {
  MarketModel model;
  double eta = 0.0;
  Variant variant = Variant::general;
  Direction direction = Direction::worst;
};

struct RobustSolution {
  double theta_star = 0.0;
  Portfolio portfolio;
  double gamma_eff = 0.0;
  double entropy = 0.0;
  double risk_value_alternative = 0.0;
  double risk_value_nominal_at_robust = 0.0;
  AlternativeModel alternative;
};

/// Optimal portfolio, entropy and values at a given theta for theta on the
/// branch through theta = 0. Best-case solutions beyond the fold are only
/// reachable through calibrate_theta.
inline RobustSolution solve_at_theta(const MarketModel& model, double theta,
                                     Variant variant) {
  RobustSolution sol;
  sol.theta_star = theta;
  const bool zero = std::abs(theta) < kThetaZero;
  switch (variant) {
    case Variant::general:
      sol.portfolio = worst_case_portfolio(model, theta);
      sol.gamma_eff = zero ? model.gamma()
                           : gamma_eff(solve_S_star(model, theta), theta,
                                       model.gamma());
      break;
    case Variant::fixed_mean:
      sol.gamma_eff = gx_gamma(model, theta);
      sol.portfolio = zero ? nominal_portfolio(model)
                           : two_fund_portfolio(model, sol.gamma_eff);
      break;
    case Variant::min_variance:
      sol.portfolio = min_variance_portfolio_robust(model, theta);
      sol.gamma_eff = zero ? 1.0 : 1.0 / (1.0 - theta / model.constants().C);
      break;
  }
  if (zero) sol.theta_star = 0.0;
  const double t = sol.theta_star;
  sol.entropy = relative_entropy_at(model, t, sol.portfolio, variant);
  sol.risk_value_alternative =
      alternative_risk_value(model, t, sol.portfolio, variant);
  sol.risk_value_nominal_at_robust = risk_value(model, sol.portfolio, variant);
  sol.alternative = alternative_model(model, t, sol.portfolio, variant);
  return sol;
}

/// Solution at a point of the best-case curve given by its variance and theta.
inline RobustSolution solution_from_branch(const MarketModel& model,
                                           double theta, double gam,
                                           Variant variant) {
  RobustSolution sol;
  sol.theta_star = theta;
  sol.gamma_eff = gam;
  sol.portfolio = two_fund_portfolio(model, gam);
  sol.entropy = relative_entropy_at(model, theta, sol.portfolio, variant);
  sol.risk_value_alternative =
      alternative_risk_value(model, theta, sol.portfolio, variant);
  sol.risk_value_nominal_at_robust = risk_value(model, sol.portfolio, variant);
  sol.alternative = alternative_model(model, theta, sol.portfolio, variant);
  return sol;
}

namespace detail {

inline void check_entropy(double entropy, double eta) {
  if (!(std::abs(entropy - eta) <= kEntropyTolerance)) {
    throw Error(ErrorCode::ToleranceNotReached,
                "calibrated entropy " + std::to_string(entropy) +
                    " misses eta = " + std::to_string(eta));
  }
}

/// Picks whichever end of a collapsed bracket lands closer to eta.
template <class Eval>
RobustSolution closest_end(const Bracket& b, double eta, Eval&& eval,
                           bool lo_valid, bool hi_valid) {
  std::optional<RobustSolution> best;
  bool hi_admissible = false;
  for (int i = 0; i < 2; ++i) {
    if (!(i == 0 ? lo_valid : hi_valid)) continue;
    try {
      RobustSolution s = eval(i == 0 ? b.lo : b.hi);
      if (i == 1) hi_admissible = true;
      if (!best || std::abs(s.entropy - eta) < std::abs(best->entropy - eta)) {
        best = std::move(s);
      }
    } catch (const Error&) {
    }
  }
  if (!best) {
    throw Error(ErrorCode::ToleranceNotReached, "no admissible end of the bracket");
  }
  if (!hi_admissible && best->entropy < eta - kEntropyTolerance) {
    // bracket closed on the edge of the admissible set
    throw Error(ErrorCode::EtaUnreachable,
                "entropy tops out at " + std::to_string(best->entropy) +
                    " below eta = " + std::to_string(eta));
  }
  check_entropy(best->entropy, eta);
  return *best;
}

/// Bisection in theta on (0, limit) in the requested direction. The predicate
/// "solve fails or R > eta" is monotone because R is monotone on the branch
/// and the admissible set is an interval containing 0.
inline RobustSolution calibrate_by_theta(const MarketModel& model, double eta,
                                         Variant variant, double dir,
                                         double limit) {
  auto eval = [&](double u) { return solve_at_theta(model, dir * u, variant); };
  auto over = [&](double u) {
    try {
      return eval(u).entropy > eta;
    } catch (const Error& e) {
      if (e.code() == ErrorCode::NoBracket ||
          e.code() == ErrorCode::ThetaOutOfDomain ||
          e.code() == ErrorCode::DomainViolation ||
          e.code() == ErrorCode::NegativeDiscriminant) {
        return true;
      }
      throw;
    }
  };
  double hi = limit;
  if (!std::isfinite(hi)) {
    hi = 1.0;
    int guard = 0;
    while (!over(hi)) {
      hi *= 2.0;
      if (++guard > 1100) {
        throw Error(ErrorCode::EtaUnreachable, "entropy stays below eta");
      }
    }
  } else if (!over(hi)) {
    throw Error(ErrorCode::EtaUnreachable,
                "eta = " + std::to_string(eta) +
                    " exceeds the entropy at the admissible boundary");
  }
  const auto b = bisect(0.0, hi, over, 0.0, 2000);
  // hi may be the boundary itself; probe it but accept failure
  return closest_end(b, eta, eval, true, true);
}

/// General best case with D > 0: walk the stationary curve in w = S - 1/C,
/// where the entropy increases with w; the curve continues past the fold.
inline RobustSolution calibrate_general_best(const MarketModel& model,
                                             double eta) {
  const double s_min = 1.0 / model.constants().C;
  const double w_nom = nominal_variance(model) - s_min;
  auto eval = [&](double log_w) {
    const auto p = best_case_branch_point(model, s_min + w_nom * std::exp(log_w));
    return solution_from_branch(model, p.theta, p.gamma_eff, Variant::general);
  };
  auto over = [&](double log_w) {
    try {
      return eval(log_w).entropy > eta;
    } catch (const Error& e) {
      if (e.code() == ErrorCode::NoBracket) return true;
      throw;
    }
  };
  // R grows like ln(w)/4 along the curve; w = e^512 is the last doubling
  // before exp overflows
  double hi = 1.0 / 64.0;
  int guard = 0;
  while (!over(hi)) {
    hi *= 2.0;
    if (++guard > 15) {
      throw Error(ErrorCode::EtaUnreachable,
                  "eta = " + std::to_string(eta) +
                      " lies beyond the representable part of the best-case curve");
    }
  }
  const auto b = bisect(0.0, hi, over, 0.0, 2000);
  return closest_end(b, eta, eval, b.lo > 0.0, true);
}

}  // namespace detail

/// theta* with R(theta*) = eta on the requested side of 0.
///
/// Worst case (all variants) and the minimum-variance best case: bisection in
/// theta, using the monotonicity of R along the branch through 0. Fixed-mean
/// best case: closed form on the ratio Gamma/gamma. General best case: the
/// stationary curve parameterized by the variance. Both best-case routes stay
/// on the ball surface past the point where the theta-branch folds back.
inline RobustSolution calibrate_theta(const CalibrationRequest& req) {
  const MarketModel& model = req.model;
  const double eta = req.eta;
  if (!(eta >= 0.0) || !std::isfinite(eta)) {
    throw Error(ErrorCode::InvalidArgument,
                "eta must be finite and >= 0, got " + std::to_string(eta));
  }
  if (eta == 0.0) return solve_at_theta(model, 0.0, req.variant);
  const auto& k = model.constants();
  const double dir = sign_of(req.direction);

  if (req.direction == Direction::worst) {
    const double limit = req.variant == Variant::min_variance
                             ? k.C
                             : k.C / model.gamma();
    return detail::calibrate_by_theta(model, eta, req.variant, dir, limit);
  }
  switch (req.variant) {
    case Variant::min_variance:
      return detail::calibrate_by_theta(model, eta, req.variant, dir, INFINITY);
    case Variant::fixed_mean: {
      const GXSolution gx = gx_best_case(model, eta);
      RobustSolution sol =
          solution_from_branch(model, gx.theta, gx.gamma_gx, Variant::fixed_mean);
      detail::check_entropy(sol.entropy, eta);
      return sol;
    }
    case Variant::general:
      if (k.D > 0.0) return detail::calibrate_general_best(model, eta);
      {
        // Mean proportional to 1: the minimum-variance portfolio stays optimal
        // while Gamma(1/C) > 0. Past that point the minimizer is not unique.
        const double g = model.gamma();
        const double limit =
            g * g < k.C ? g / (1.0 - g * g / k.C) : INFINITY;
        return detail::calibrate_by_theta(model, eta, req.variant, dir, limit);
      }
  }
  return solve_at_theta(model, 0.0, req.variant);
}

/// Fixed portfolio, worst case: theta in (0, theta_max(a)) with R(theta, a) = eta.
inline double calibrate_theta_fixed_portfolio(const MarketModel& model,
                                              const Portfolio& a, double eta,
                                              Variant variant) {
  if (!(eta >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "eta must be >= 0");
  }
  if (eta == 0.0) return 0.0;
  const double limit = theta_max(model, a, variant);
  auto over = [&](double t) {
    if (!(t < limit)) return true;
    return relative_entropy_at(model, t, a, variant) > eta;
  };
  const auto b = detail::bisect(0.0, limit, over, 0.0, 2000);
  const double r_lo = std::abs(relative_entropy_at(model, b.lo, a, variant) - eta);
  const double r_hi = b.hi < limit
                          ? std::abs(relative_entropy_at(model, b.hi, a, variant) - eta)
                          : INFINITY;
  const double t = r_lo <= r_hi ? b.lo : b.hi;
  detail::check_entropy(relative_entropy_at(model, t, a, variant), eta);
  return t;
}

struct FrontierPoint {
  double eta = 0.0;
  double theta = 0.0;  ///< worst-case theta* (NaN if not requested)
  double theta_best = std::numeric_limits<double>::quiet_NaN();
  double risk_worst = std::numeric_limits<double>::quiet_NaN();
  double risk_best = std::numeric_limits<double>::quiet_NaN();
  double risk_nominal = 0.0;
  double risk_nominal_at_robust = std::numeric_limits<double>::quiet_NaN();
  double risk_alt_at_nominal_portfolio = std::numeric_limits<double>::quiet_NaN();
};

struct Directions {
  bool worst = true;
  bool best = true;
};

/// Nominal-measure value at the nominal optimum of the variant.
inline double nominal_optimum_value(const MarketModel& model, Variant variant) {
  if (variant == Variant::min_variance) {
    return 0.5 / model.constants().C;
  }
  return nominal_risk_value(model, nominal_portfolio(model));
}

inline Portfolio nominal_optimum(const MarketModel& model, Variant variant) {
  return variant == Variant::min_variance ? min_variance_portfolio(model)
                                          : nominal_portfolio(model);
}

/// Worst-case value of the fixed nominal optimum over the same ball.
inline double alt_value_at_nominal(const MarketModel& model, double eta,
                                   Variant variant) {
  const Portfolio a = nominal_optimum(model, variant);
  const double t = calibrate_theta_fixed_portfolio(model, a, eta, variant);
  return alternative_risk_value(model, t, a, variant);
}

inline FrontierPoint frontier_point(const MarketModel& model, double eta,
                                    Variant variant, Directions dirs) {
  FrontierPoint p;
  p.eta = eta;
  p.theta = std::numeric_limits<double>::quiet_NaN();
  p.risk_nominal = nominal_optimum_value(model, variant);
  if (dirs.worst) {
    const auto w = calibrate_theta({model, eta, variant, Direction::worst});
    p.theta = w.theta_star;
    p.risk_worst = w.risk_value_alternative;
    p.risk_nominal_at_robust = w.risk_value_nominal_at_robust;
    p.risk_alt_at_nominal_portfolio = alt_value_at_nominal(model, eta, variant);
  }
  if (dirs.best) {
    const auto b = calibrate_theta({model, eta, variant, Direction::best});
    p.theta_best = b.theta_star;
    p.risk_best = b.risk_value_alternative;
  }
  return p;
}

inline void check_eta_grid(const std::vector<double>& grid) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= 0.0) || !std::isfinite(grid[i])) {
      throw Error(ErrorCode::InvalidArgument, "eta grid entries must be >= 0");
    }
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      throw Error(ErrorCode::InvalidArgument,
                  "eta grid must be strictly increasing");
    }
  }
}

/// One point per eta, each calibrated independently. Points do not share
/// state, so callers may evaluate them in any order; output follows the grid.
inline std::vector<FrontierPoint> frontier(const MarketModel& model,
                                           const std::vector<double>& eta_grid,
                                           Variant variant, Directions dirs) {
  check_eta_grid(eta_grid);
  std::vector<FrontierPoint> out;
  out.reserve(eta_grid.size());
  for (double eta : eta_grid) {
    out.push_back(frontier_point(model, eta, variant, dirs));
  }
  return out;
}

/// Frontier from a grid of worst-case theta >= 0: each theta gives
/// (R(theta), value) directly, without root finding. Best-case and
/// nominal-portfolio columns are filled by calibrating at the same eta.
inline std::vector<FrontierPoint> frontier_theta_scan(
    const MarketModel& model, const std::vector<double>& theta_grid,
    Variant variant, Directions dirs) {
  std::vector<FrontierPoint> out;
  out.reserve(theta_grid.size());
  double prev = -1.0;
  for (double theta : theta_grid) {
    if (!(theta >= 0.0) || !(theta > prev)) {
      throw Error(ErrorCode::InvalidArgument,
                  "theta grid must be non-negative and strictly increasing");
    }
    prev = theta;
    const RobustSolution w = solve_at_theta(model, theta, variant);
    FrontierPoint p;
    p.eta = w.entropy;
    p.risk_nominal = nominal_optimum_value(model, variant);
    if (dirs.worst) {
      p.theta = w.theta_star;
      p.risk_worst = w.risk_value_alternative;
      p.risk_nominal_at_robust = w.risk_value_nominal_at_robust;
      p.risk_alt_at_nominal_portfolio = alt_value_at_nominal(model, p.eta, variant);
    } else {
      p.theta = std::numeric_limits<double>::quiet_NaN();
    }
    if (dirs.best) {
      const auto b = calibrate_theta({model, p.eta, variant, Direction::best});
      p.theta_best = b.theta_star;
      p.risk_best = b.risk_value_alternative;
    }
    out.push_back(p);
  }
  return out;
}

/// Largest difference in worst-case value between the theta scan and
/// per-eta calibration at the scan's own entropies.
inline double frontier_strategy_gap(const MarketModel& model,
                                    const std::vector<double>& theta_grid,
                                    Variant variant) {
  double gap = 0.0;
  for (const auto& p :
       frontier_theta_scan(model, theta_grid, variant, {true, false})) {
    const auto c = calibrate_theta({model, p.eta, variant, Direction::worst});
    gap = std::max(gap, std::abs(c.risk_value_alternative - p.risk_worst));
  }
  return gap;
}

struct PerturbationRow {
  std::string curve;  ///< rho_only, k_only or joint
  double param = 0.0;
  double entropy = 0.0;
  double risk_value = 0.0;
};

struct PerturbationResult {
  std::vector<PerturbationRow> rows;
  double joint_max_gap = 0.0;  ///< joint curve vs closed-form alternative values
  double rho_gap = 0.0;        ///< worst-case value minus curve value at the rho end
  double k_gap = 0.0;
};

struct Interval {
  double lo;
  double hi;
};

/// Nominal optimum value of a symmetric model, together with its KL distance
/// from the reference spec.
inline PerturbationRow perturbed_point(const SymmetricModelSpec& base,
                                       const SymmetricModelSpec& moved,
                                       double gamma, std::string curve,
                                       double param) {
  MarketModel m0 = expand_symmetric(base, gamma);
  std::optional<MarketModel> m1;
  try {
    m1 = expand_symmetric(moved, gamma);
  } catch (const Error& e) {
    throw Error(ErrorCode::PerturbedModelInvalid,
                curve + " at " + std::to_string(param) + ": " + e.what());
  }
  PerturbationRow row;
  row.curve = std::move(curve);
  row.param = param;
  row.entropy = oracle::gaussian_kl(m1->mu(), m1->sigma(), m0.mu(), m0.sigma());
  row.risk_value = nominal_risk_value(*m1, nominal_portfolio(*m1));
  return row;
}

/// Fixed-mean perturbation study on an equicorrelated model.
///   rho_only: correlation moved, variances kept;
///   k_only:   covariance scaled by k;
///   joint:    for each theta, the alternative covariance at the equally
///             weighted portfolio, read back as a symmetric (k, rho) model.
/// The joint curve reproduces the closed-form alternative curve, so the worst
/// case is itself a member of the symmetric family.
inline PerturbationResult perturbation_scan(const SymmetricModelSpec& spec,
                                            double gamma,
                                            const std::vector<double>& theta_grid,
                                            Interval rho_range, Interval k_range,
                                            int points = 41) {
  check_symmetric_spec(spec);
  if (points < 2) {
    throw Error(ErrorCode::InvalidArgument, "need at least two scan points");
  }
  PerturbationResult res;
  auto lin = [&](Interval r, int i) {
    return r.lo + (r.hi - r.lo) * static_cast<double>(i) / (points - 1);
  };
  for (int i = 0; i < points; ++i) {
    SymmetricModelSpec moved = spec;
    moved.rho = lin(rho_range, i);
    res.rows.push_back(perturbed_point(spec, moved, gamma, "rho_only", moved.rho));
  }
  for (int i = 0; i < points; ++i) {
    SymmetricModelSpec moved = spec;
    const double k = lin(k_range, i);
    moved.sigma2 = spec.sigma2 * k;
    res.rows.push_back(perturbed_point(spec, moved, gamma, "k_only", k));
  }

  const MarketModel model = expand_symmetric(spec, gamma);
  const Portfolio equal =
      make_portfolio(model, VectorXd::Constant(spec.n, 1.0 / spec.n));
  for (double theta : theta_grid) {
    const AlternativeModel alt =
        alternative_model(model, theta, equal, Variant::fixed_mean);
    SymmetricModelSpec moved = spec;
    moved.sigma2 = alt.sigma_tilde(0, 0);
    moved.rho = alt.sigma_tilde(0, 1) / alt.sigma_tilde(0, 0);
    PerturbationRow row = perturbed_point(spec, moved, gamma, "joint", theta);
    const double e = gx_entropy(model, theta);
    const double v = gx_risk_value(model, theta);
    res.joint_max_gap = std::max({res.joint_max_gap, std::abs(row.entropy - e),
                                  std::abs(row.risk_value - v)});
    res.rows.push_back(std::move(row));
  }

  // Gap at the high-risk end of each single-parameter curve.
  auto gap_at_end = [&](const std::string& curve) {
    const PerturbationRow* end = nullptr;
    for (const auto& r : res.rows) {
      if (r.curve == curve && (!end || r.risk_value > end->risk_value)) end = &r;
    }
    const auto w = calibrate_theta(
        {model, end->entropy, Variant::fixed_mean, Direction::worst});
    return w.risk_value_alternative - end->risk_value;
  };
  res.rho_gap = gap_at_end("rho_only");
  res.k_gap = gap_at_end("k_only");
  return res;
}

/// theta grid spanning the fixed-mean best and worst cases at radius eta.
inline std::vector<double> perturbation_theta_grid(const MarketModel& model,
                                                   double eta, int points) {
  const double lo =
      calibrate_theta({model, eta, Variant::fixed_mean, Direction::best}).theta_star;
  const double hi =
      calibrate_theta({model, eta, Variant::fixed_mean, Direction::worst}).theta_star;
  std::vector<double> grid;
  for (int i = 0; i < points; ++i) {
    grid.push_back(lo + (hi - lo) * static_cast<double>(i) / (points - 1));
  }
  return grid;
}

}  // namespace robustmv
