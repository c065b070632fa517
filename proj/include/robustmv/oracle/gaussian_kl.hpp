#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <string>

#include "robustmv/error.hpp"

namespace robustmv::oracle {

/// KL(N(mu1, sigma1) || N(mu0, sigma0)) in nats.
inline double gaussian_kl(const Eigen::VectorXd& mu1, const Eigen::MatrixXd& sigma1,
                          const Eigen::VectorXd& mu0, const Eigen::MatrixXd& sigma0) {
  const auto n = mu0.size();
  if (mu1.size() != n || sigma0.rows() != n || sigma0.cols() != n ||
      sigma1.rows() != n || sigma1.cols() != n) {
    throw Error(ErrorCode::DimensionMismatch, "Gaussian KL operands differ in size");
  }
  const Eigen::LLT<Eigen::MatrixXd> l0(sigma0);
  const Eigen::LLT<Eigen::MatrixXd> l1(sigma1);
  if (l0.info() != Eigen::Success || l1.info() != Eigen::Success) {
    throw Error(ErrorCode::NotPositiveDefinite, "Gaussian KL needs SPD covariances");
  }
  auto logdet = [](const Eigen::LLT<Eigen::MatrixXd>& l) {
    return 2.0 * l.matrixLLT().diagonal().array().log().sum();
  };
  const Eigen::VectorXd d = mu0 - mu1;
  const double trace = l0.solve(sigma1).trace();
  const double quad = d.dot(l0.solve(d));
  return 0.5 * (trace + quad - static_cast<double>(n) + logdet(l0) - logdet(l1));
}

}  // namespace robustmv::oracle
