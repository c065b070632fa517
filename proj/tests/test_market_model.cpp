#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace robustmv;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::Io;
}

}  // namespace

TEST(MarketModel, ConstantsMatchDenseInverse) {
  auto rng = testing_support::seeded(11);
  for (int n : {2, 5, 10}) {
    const MarketModel m = oracle::random_model(rng, n);
    const MatrixXd inv = testing_support::dense_inverse(m.sigma());
    const VectorXd ones = VectorXd::Ones(n);
    const auto& k = m.constants();
    EXPECT_NEAR(k.A, ones.dot(inv * m.mu()), 1e-10 * std::abs(k.A) + 1e-12);
    EXPECT_NEAR(k.B, m.mu().dot(inv * m.mu()), 1e-10 * k.B);
    EXPECT_NEAR(k.C, ones.dot(inv * ones), 1e-10 * k.C);
    EXPECT_NEAR(k.D, k.B * k.C - k.A * k.A, 1e-8 * k.B * k.C);
    EXPECT_GE(k.D, 0.0);
  }
}

TEST(MarketModel, ReferenceSymmetricModel) {
  const MarketModel m = expand_symmetric(reference_symmetric_spec(), 1.0);
  const auto& k = m.constants();
  EXPECT_NEAR(k.C, 10.0 / 0.975, 1e-12);
  EXPECT_NEAR(k.A, 0.1 * 10.0 / 0.975, 1e-12);
  EXPECT_EQ(k.D, 0.0);
  const auto ev = symmetric_eigenvalues(0.3, 0.075, 10);
  EXPECT_NEAR(ev.lambda1, 0.975, 1e-15);
  EXPECT_NEAR(ev.lambda2, 0.225, 1e-15);
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(m.sigma());
  EXPECT_NEAR(eig.eigenvalues()(9), 0.975, 1e-12);
  EXPECT_NEAR(eig.eigenvalues()(0), 0.225, 1e-12);
  EXPECT_NEAR(eig.eigenvalues()(8), 0.225, 1e-12);
}

TEST(MarketModel, ValidationErrors) {
  const VectorXd mu2 = VectorXd::Constant(2, 0.1);
  EXPECT_EQ(code_of([&] { MarketModel::create(mu2, MatrixXd::Identity(3, 3), 1.0); }),
            ErrorCode::DimensionMismatch);
  EXPECT_EQ(code_of([&] { MarketModel::create(mu2, MatrixXd::Identity(2, 3), 1.0); }),
            ErrorCode::DimensionMismatch);
  EXPECT_EQ(code_of([&] {
              MarketModel::create(VectorXd::Constant(1, 0.1), MatrixXd::Identity(1, 1), 1.0);
            }),
            ErrorCode::DegenerateDimension);
  EXPECT_EQ(code_of([&] { MarketModel::create(mu2, MatrixXd::Identity(2, 2), 0.0); }),
            ErrorCode::NonPositiveGamma);
  EXPECT_EQ(code_of([&] { MarketModel::create(mu2, MatrixXd::Identity(2, 2), -1.0); }),
            ErrorCode::NonPositiveGamma);
  MatrixXd asym = MatrixXd::Identity(2, 2);
  asym(0, 1) = 1e-9;
  EXPECT_EQ(code_of([&] { MarketModel::create(mu2, asym, 1.0); }),
            ErrorCode::AsymmetricCovariance);
  MatrixXd indefinite(2, 2);
  indefinite << 1.0, 2.0, 2.0, 1.0;
  EXPECT_EQ(code_of([&] { MarketModel::create(mu2, indefinite, 1.0); }),
            ErrorCode::NotPositiveDefinite);
  MatrixXd zero_diag = MatrixXd::Identity(2, 2);
  zero_diag(1, 1) = 0.0;
  EXPECT_EQ(code_of([&] { MarketModel::create(mu2, zero_diag, 1.0); }),
            ErrorCode::NotPositiveDefinite);
}

TEST(MarketModel, SymmetricSpecRanges) {
  EXPECT_EQ(code_of([] { expand_symmetric({10, 0.1, 0.3, -1.0 / 9.0}, 1.0); }),
            ErrorCode::RhoOutOfRange);
  EXPECT_EQ(code_of([] { expand_symmetric({10, 0.1, 0.3, 1.0}, 1.0); }),
            ErrorCode::RhoOutOfRange);
  EXPECT_EQ(code_of([] { expand_symmetric({10, 0.1, 0.0, 0.2}, 1.0); }),
            ErrorCode::InvalidSpec);
  EXPECT_EQ(code_of([] { expand_symmetric({1, 0.1, 0.3, 0.2}, 1.0); }),
            ErrorCode::DegenerateDimension);
  EXPECT_NO_THROW(expand_symmetric({10, 0.1, 0.3, -0.11}, 1.0));
}

TEST(MarketModel, SolveUsesFactorization) {
  auto rng = testing_support::seeded(3);
  const MarketModel m = oracle::random_model(rng, 5);
  const VectorXd b = VectorXd::LinSpaced(5, -1.0, 1.0);
  EXPECT_LT((m.sigma() * m.solve(b) - b).norm(), 1e-12);
  EXPECT_EQ(m.with_gamma(3.0).gamma(), 3.0);
}
