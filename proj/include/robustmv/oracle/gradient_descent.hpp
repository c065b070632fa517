#pragma once

// Fixed-step gradient descent on the inner objective, with the error split
// between the top eigenvector of the Hessian at the optimum and its
// complement. On the equicorrelated model the top direction is 1 and the
// complement is the (n-1)-fold small eigenspace.

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "robustmv/calibration.hpp"
#include "robustmv/oracle/brute_force.hpp"
#include "robustmv/oracle/monte_carlo.hpp"

namespace robustmv::oracle {

enum class GDMode {
  projected,   ///< iterate on the budget plane, gradient projected
  multiplier,  ///< unconstrained descent on F(a) - alpha* 1'a
};

struct GDOptions {
  double step = 0.0;  ///< <= 0 selects 1 / lambda_max(H)
  int max_iter = 100;
  GDMode mode = GDMode::multiplier;
  std::uint64_t seed = 7;
  double start_scale = 1e-4;   ///< size of the random start offset
  std::optional<VectorXd> start;
  double gradient_tol = 1e-14;
};

struct GDTrace {
  std::vector<VectorXd> iterates;
  std::vector<double> objective_values;
  std::vector<double> err_top;   ///< |error| along the top Hessian eigenvector
  std::vector<double> err_rest;  ///< |error| in the complement
  double step_size = 0.0;
  double lambda_top = 0.0;
  double lambda_rest_max = 0.0;  ///< largest eigenvalue of the complement
  double lambda_rest_min = 0.0;
  VectorXd optimum;
};

/// d Gamma / dS for the variant.
inline double gamma_eff_slope(const MarketModel& model, double theta, double s,
                              Variant variant) {
  const double g = risk_aversion(model, variant);
  const double q = 1.0 - theta * g * s;
  if (variant == Variant::general) {
    return theta * g * (g / (q * q) + 2.0 * theta / (q * q * q));
  }
  return theta * g * g / (q * q);
}

/// Hessian of the inner objective: Gamma Sigma + 2 Gamma'(S) Sigma a a' Sigma.
inline MatrixXd inner_hessian(const MarketModel& model, double theta,
                              const VectorXd& a, Variant variant) {
  const double s = a.dot(model.sigma() * a);
  const VectorXd sa = model.sigma() * a;
  return gamma_eff(s, theta, model, variant) * model.sigma() +
         2.0 * gamma_eff_slope(model, theta, s, variant) * sa * sa.transpose();
}

inline GDTrace gd_trace(const MarketModel& model, double theta, Variant variant,
                        const GDOptions& opt = {}) {
  const auto n = model.size();
  const VectorXd opt_a = solve_at_theta(model, theta, variant).portfolio.weights;
  const MatrixXd H = inner_hessian(model, theta, opt_a, variant);
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(H);
  const VectorXd top = eig.eigenvectors().col(n - 1);

  GDTrace tr;
  tr.optimum = opt_a;
  tr.lambda_top = eig.eigenvalues()(n - 1);
  tr.lambda_rest_max = eig.eigenvalues()(n - 2);
  tr.lambda_rest_min = eig.eigenvalues()(0);
  tr.step_size = opt.step > 0.0 ? opt.step : 1.0 / tr.lambda_top;

  // Multiplier of the budget constraint at the optimum.
  const double alpha = inner_gradient(model, theta, opt_a, variant).mean();

  VectorXd a;
  if (opt.start) {
    a = *opt.start;
  } else {
    CounterRng rng(opt.seed, 0);
    std::normal_distribution<double> normal;
    VectorXd d(n);
    for (Eigen::Index i = 0; i < n; ++i) d[i] = normal(rng);
    if (opt.mode == GDMode::projected) d.array() -= d.mean();
    a = opt_a + opt.start_scale * d / d.norm();
  }
  if (a.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "start has the wrong dimension");
  }

  auto objective = [&](const VectorXd& x) {
    double f = inner_objective(model, theta, x, variant);
    if (opt.mode == GDMode::multiplier) f -= alpha * x.sum();
    return f;
  };
  auto direction = [&](const VectorXd& x) {
    VectorXd g = inner_gradient(model, theta, x, variant);
    if (opt.mode == GDMode::multiplier) {
      g.array() -= alpha;
    } else {
      g = project_to_budget_plane(std::move(g));
    }
    return g;
  };
  auto record = [&](const VectorXd& x) {
    const VectorXd e = x - opt_a;
    const double along = top.dot(e);
    tr.iterates.push_back(x);
    tr.objective_values.push_back(objective(x));
    tr.err_top.push_back(std::abs(along));
    tr.err_rest.push_back((e - along * top).norm());
  };

  record(a);
  for (int it = 0; it < opt.max_iter; ++it) {
    const VectorXd g = direction(a);
    if (g.norm() < opt.gradient_tol) break;
    a -= tr.step_size * g;
    record(a);
  }
  return tr;
}

/// Mean per-iteration log contraction ln(e_0 / e_k) / k, measured up to the
/// last iterate still above floor * e_0. Returns 0 if the error starts at 0.
inline double contraction_rate(const std::vector<double>& err,
                               double floor = 1e-12) {
  if (err.empty() || !(err.front() > 0.0)) return 0.0;
  const double e0 = err.front();
  std::size_t k = 0;
  for (std::size_t i = 1; i < err.size(); ++i) {
    if (!(err[i] > floor * e0)) break;
    k = i;
  }
  if (k == 0) {
    // collapsed below the floor in one step
    return err.size() > 1 ? -std::log(floor) : 0.0;
  }
  return std::log(e0 / err[k]) / static_cast<double>(k);
}

}  // namespace robustmv::oracle
