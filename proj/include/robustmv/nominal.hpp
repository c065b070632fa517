#pragma once

#include <cmath>
#include <string>
#include <utility>

#include "robustmv/market_model.hpp"

namespace robustmv {

/// Fully invested weights (short sales allowed) with their variance a'Sigma a.
struct Portfolio {
  VectorXd weights;
  double variance = 0.0;
};

inline constexpr double kBudgetTolerance = 1e-12;

/// Wraps weights into a Portfolio, checking the budget constraint a'1 = 1.
inline Portfolio make_portfolio(const MarketModel& model, VectorXd weights) {
  if (weights.size() != model.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                "portfolio has " + std::to_string(weights.size()) +
                    " weights, model has " + std::to_string(model.size()) +
                    " assets");
  }
  const double drift = std::abs(weights.sum() - 1.0);
  if (drift > kBudgetTolerance * std::max(1.0, weights.lpNorm<1>())) {
    throw Error(ErrorCode::InvalidArgument,
                "weights sum to " + std::to_string(weights.sum()) +
                    ", expected 1");
  }
  const double s = weights.dot(model.sigma() * weights);
  return {std::move(weights), s};
}

/// Two-fund portfolio with effective risk aversion `gamma_eff`:
///   a = Sigma^-1 mu / gamma_eff + (1 - A/gamma_eff) Sigma^-1 1 / C.
/// Written without dividing by A so that A = 0 needs no special case.
inline Portfolio two_fund_portfolio(const MarketModel& model, double gamma_eff) {
  const auto& k = model.constants();
  VectorXd a = model.inv_sigma_mu() / gamma_eff +
               (1.0 - k.A / gamma_eff) / k.C * model.inv_sigma_ones();
  const double sum = a.sum();
  if (std::abs(sum - 1.0) > 1e-14) a /= sum;
  // a'Sigma a = (1 + D/gamma_eff^2) / C; the quadratic form loses digits when
  // gamma_eff is small and the weights are large
  const double s = (1.0 + k.D / (gamma_eff * gamma_eff)) / k.C;
  return {std::move(a), s};
}

inline Portfolio nominal_portfolio(const MarketModel& model) {
  return two_fund_portfolio(model, model.gamma());
}

/// Sigma^-1 1 / C, variance 1/C.
inline Portfolio min_variance_portfolio(const MarketModel& model) {
  VectorXd a = model.inv_sigma_ones() / model.constants().C;
  const double s = a.dot(model.sigma() * a);
  return {std::move(a), s};
}

/// gamma/2 a'Sigma a - a'mu under the nominal model.
inline double nominal_risk_value(const MarketModel& model, const Portfolio& a) {
  return 0.5 * model.gamma() * a.variance - a.weights.dot(model.mu());
}

/// Variance of the nominal optimum, (D/gamma^2 + 1)/C.
inline double nominal_variance(const MarketModel& model) {
  const auto& k = model.constants();
  return (k.D / (model.gamma() * model.gamma()) + 1.0) / k.C;
}

}  // namespace robustmv
