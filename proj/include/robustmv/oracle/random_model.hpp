#pragma once

#include <cmath>
#include <random>

#include "robustmv/nominal.hpp"

namespace robustmv::oracle {

/// Random model with eigenvalues log-uniform in [0.005, 0.5] (condition
/// number at most 100) and means 0.1 (1 + x_i), x_i standard normal.
template <class Rng>
MarketModel random_model(Rng& rng, int n, double gamma = 1.0) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  MatrixXd g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = normal(rng);
  const MatrixXd q = Eigen::HouseholderQR<MatrixXd>(g).householderQ();
  VectorXd lambda(n);
  for (int i = 0; i < n; ++i) {
    lambda[i] = 0.005 * std::pow(100.0, unit(rng));
  }
  MatrixXd sigma = q * lambda.asDiagonal() * q.transpose();
  sigma = 0.5 * (sigma + sigma.transpose());
  VectorXd mu(n);
  for (int i = 0; i < n; ++i) mu[i] = 0.1 * (1.0 + normal(rng));
  return MarketModel::create(mu, sigma, gamma);
}

/// Budget-feasible portfolio scattered around the equally weighted one.
template <class Rng>
Portfolio random_portfolio(Rng& rng, const MarketModel& model, double spread = 0.3) {
  std::normal_distribution<double> normal;
  const auto n = model.size();
  VectorXd a(n);
  for (Eigen::Index i = 0; i < n; ++i) a[i] = normal(rng);
  a.array() -= a.mean();
  a = VectorXd::Constant(n, 1.0 / static_cast<double>(n)) + spread * a;
  a.array() += (1.0 - a.sum()) / static_cast<double>(n);
  return make_portfolio(model, a);
}

}  // namespace robustmv::oracle
