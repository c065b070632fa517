#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <string>
#include <utility>

#include "robustmv/error.hpp"

namespace robustmv {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Scalar summaries of the nominal model that every closed form is written in:
/// A = 1'S^-1 mu, B = mu'S^-1 mu, C = 1'S^-1 1, D = BC - A^2.
struct MertonConstants {
  double A = 0.0;
  double B = 0.0;
  double C = 0.0;
  double D = 0.0;
};

inline constexpr double kSymmetryTolerance = 1e-12;

/// Nominal Gaussian model X ~ N(mu, Sigma) with risk aversion gamma.
///
/// Instances only exist in validated form: the Cholesky factor of Sigma and
/// the Merton constants are computed once at construction and the object is
/// immutable afterwards, so it can be shared freely between threads.
class MarketModel {
 public:
  /// Validates the raw fields and caches the factorization.
  /// Throws Error with DimensionMismatch, DegenerateDimension,
  /// AsymmetricCovariance, NotPositiveDefinite or NonPositiveGamma.
  static MarketModel create(VectorXd mu, MatrixXd sigma, double gamma) {
    const Eigen::Index n = mu.size();
    if (sigma.rows() != sigma.cols()) {
      throw Error(ErrorCode::DimensionMismatch,
                  "covariance is " + std::to_string(sigma.rows()) + "x" +
                      std::to_string(sigma.cols()) + ", expected square");
    }
    if (sigma.rows() != n) {
      throw Error(ErrorCode::DimensionMismatch,
                  "mean has " + std::to_string(n) +
                      " entries but covariance is " +
                      std::to_string(sigma.rows()) + "x" +
                      std::to_string(sigma.cols()));
    }
    if (n < 2) {
      throw Error(ErrorCode::DegenerateDimension,
                  "at least two assets are required, got " + std::to_string(n));
    }
    if (!(gamma > 0.0) || !std::isfinite(gamma)) {
      throw Error(ErrorCode::NonPositiveGamma,
                  "risk aversion must be positive and finite, got " +
                      std::to_string(gamma));
    }
    if (!mu.allFinite() || !sigma.allFinite()) {
      throw Error(ErrorCode::InvalidSpec, "non-finite entry in mean or covariance");
    }
    const double asym = (sigma - sigma.transpose()).cwiseAbs().maxCoeff();
    if (asym > kSymmetryTolerance) {
      throw Error(ErrorCode::AsymmetricCovariance,
                  "max |S_ij - S_ji| = " + std::to_string(asym) +
                      " exceeds 1e-12");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!(sigma(i, i) > 0.0)) {
        throw Error(ErrorCode::NotPositiveDefinite,
                    "diagonal entry " + std::to_string(i) + " is not positive");
      }
    }
    MarketModel model;
    model.mu_ = std::move(mu);
    model.sigma_ = std::move(sigma);
    model.gamma_ = gamma;
    model.llt_.compute(model.sigma_);
    if (model.llt_.info() != Eigen::Success) {
      throw Error(ErrorCode::NotPositiveDefinite,
                  "Cholesky factorization failed (non-positive pivot)");
    }
    const MatrixXd& L = model.llt_.matrixLLT();
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!(L(i, i) > 0.0) || !std::isfinite(L(i, i))) {
        throw Error(ErrorCode::NotPositiveDefinite,
                    "Cholesky pivot " + std::to_string(i) + " is not positive");
      }
    }
    model.inv_sigma_mu_ = model.llt_.solve(model.mu_);
    model.inv_sigma_ones_ = model.llt_.solve(VectorXd::Ones(n));
    model.constants_ = compute_constants(model.mu_, model.inv_sigma_mu_,
                                         model.inv_sigma_ones_);
    return model;
  }

  Eigen::Index size() const { return mu_.size(); }
  const VectorXd& mu() const { return mu_; }
  const MatrixXd& sigma() const { return sigma_; }
  double gamma() const { return gamma_; }
  const MertonConstants& constants() const { return constants_; }

  /// Sigma^-1 mu and Sigma^-1 1, the two mutual funds before normalization.
  const VectorXd& inv_sigma_mu() const { return inv_sigma_mu_; }
  const VectorXd& inv_sigma_ones() const { return inv_sigma_ones_; }

  /// Sigma^-1 b through the cached Cholesky factor.
  VectorXd solve(const VectorXd& b) const { return llt_.solve(b); }
  const Eigen::LLT<MatrixXd>& cholesky() const { return llt_; }

  MarketModel with_gamma(double gamma) const {
    return create(mu_, sigma_, gamma);
  }

 private:
  MarketModel() = default;

  static MertonConstants compute_constants(const VectorXd& mu,
                                           const VectorXd& inv_mu,
                                           const VectorXd& inv_ones) {
    MertonConstants k;
    k.A = inv_ones.dot(mu);
    k.B = mu.dot(inv_mu);
    k.C = inv_ones.sum();
    const double d = k.B * k.C - k.A * k.A;
    // D >= 0 analytically; tiny negatives and tiny positives are roundoff.
    k.D = (std::abs(d) < 1e-12 * std::abs(k.B) * k.C) ? 0.0 : std::max(d, 0.0);
    return k;
  }

  VectorXd mu_;
  MatrixXd sigma_;
  double gamma_ = 1.0;
  Eigen::LLT<MatrixXd> llt_;
  VectorXd inv_sigma_mu_;
  VectorXd inv_sigma_ones_;
  MertonConstants constants_;
};

inline MarketModel validate_model(VectorXd mu, MatrixXd sigma, double gamma) {
  return MarketModel::create(std::move(mu), std::move(sigma), gamma);
}

inline const MertonConstants& merton_constants(const MarketModel& model) {
  return model.constants();
}

/// Equicorrelated model: every asset has mean mu_scalar, variance sigma2 and
/// pairwise correlation rho.
struct SymmetricModelSpec {
  int n = 2;
  double mu_scalar = 0.0;
  double sigma2 = 1.0;
  double rho = 0.0;
};

struct SymmetricEigenvalues {
  double lambda1;  ///< multiplicity 1, eigenvector 1/sqrt(n)
  double lambda2;  ///< multiplicity n-1
};

/// Eigenvalues of the n x n matrix with c on the diagonal and d elsewhere.
inline SymmetricEigenvalues symmetric_eigenvalues(double c, double d, int n) {
  if (n < 2) {
    throw Error(ErrorCode::DegenerateDimension, "n must be at least 2");
  }
  return {d * (n - 1) + c, c - d};
}

inline void check_symmetric_spec(const SymmetricModelSpec& spec) {
  if (spec.n < 2) {
    throw Error(ErrorCode::DegenerateDimension,
                "symmetric model needs n >= 2, got " + std::to_string(spec.n));
  }
  if (!(spec.sigma2 > 0.0) || !std::isfinite(spec.sigma2)) {
    throw Error(ErrorCode::InvalidSpec,
                "sigma2 must be positive, got " + std::to_string(spec.sigma2));
  }
  const double rho_min = -1.0 / (spec.n - 1);
  if (!(spec.rho > rho_min && spec.rho < 1.0)) {
    throw Error(ErrorCode::RhoOutOfRange,
                "rho = " + std::to_string(spec.rho) + " outside (" +
                    std::to_string(rho_min) + ", 1)");
  }
}

inline MatrixXd symmetric_covariance(const SymmetricModelSpec& spec) {
  check_symmetric_spec(spec);
  MatrixXd sigma = MatrixXd::Constant(spec.n, spec.n, spec.sigma2 * spec.rho);
  sigma.diagonal().setConstant(spec.sigma2);
  return sigma;
}

inline MarketModel expand_symmetric(const SymmetricModelSpec& spec,
                                    double gamma) {
  MatrixXd sigma = symmetric_covariance(spec);
  return MarketModel::create(VectorXd::Constant(spec.n, spec.mu_scalar),
                             std::move(sigma), gamma);
}

/// The ten-asset equicorrelated example used throughout the tests and samples.
inline SymmetricModelSpec reference_symmetric_spec() {
  return {10, 0.1, 0.3, 0.25};
}

}  // namespace robustmv
