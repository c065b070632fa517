#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace robustmv;
using testing_support::seeded;

namespace {

MarketModel reference() { return expand_symmetric(reference_symmetric_spec(), 1.0); }

MarketModel identity_model(double mu0, double mu1, double gamma) {
  VectorXd mu(2);
  mu << mu0, mu1;
  return MarketModel::create(mu, MatrixXd::Identity(2, 2), gamma);
}

}  // namespace

TEST(ThetaMax, Examples) {
  const MarketModel id = identity_model(0.0, 0.0, 2.0);
  VectorXd e0(2);
  e0 << 1.0, 0.0;
  EXPECT_DOUBLE_EQ(theta_max(id, make_portfolio(id, e0)), 0.5);
  const MarketModel m = reference();
  EXPECT_NEAR(theta_max(m, nominal_portfolio(m)), 10.0 / 0.975, 1e-12);
  auto rng = seeded(5);
  const MarketModel r = oracle::random_model(rng, 5);
  EXPECT_NEAR(theta_max(r, min_variance_portfolio(r)), r.constants().C, 1e-10 * r.constants().C);
}

TEST(AlternativeModel, HandExample) {
  const MarketModel m = identity_model(0.3, -0.2, 1.0);
  const Portfolio a = make_portfolio(m, VectorXd::Constant(2, 0.5));
  const auto alt = alternative_model(m, 1.0, a);
  MatrixXd expected(2, 2);
  expected << 1.5, 0.5, 0.5, 1.5;
  EXPECT_LT((alt.sigma_tilde - expected).norm(), 1e-15);
  EXPECT_NEAR(alt.mu_tilde[0], 0.3 - 1.0, 1e-15);
  EXPECT_NEAR(alt.mu_tilde[1], -0.2 - 1.0, 1e-15);
}

TEST(AlternativeModel, ShermanMorrisonMatchesDenseInverse) {
  auto rng = seeded(17);
  std::uniform_real_distribution<double> u(-3.0, 0.95);
  for (int i = 0; i < 50; ++i) {
    const MarketModel m = oracle::random_model(rng, 2 + i % 9, 0.5 + i % 3);
    const Portfolio a = oracle::random_portfolio(rng, m);
    const double theta = u(rng) * theta_max(m, a);
    const auto alt = alternative_model(m, theta, a);
    const MatrixXd dense = testing_support::dense_tilted_covariance(m, theta, a.weights, m.gamma());
    EXPECT_LT((alt.sigma_tilde - dense).norm() / dense.norm(), 1e-10);
    EXPECT_LT((alt.mu_tilde - (m.mu() - theta * dense * a.weights)).norm(),
              1e-10 * (1.0 + m.mu().norm()));
    EXPECT_EQ(Eigen::LLT<MatrixXd>(alt.sigma_tilde).info(), Eigen::Success);
  }
}

TEST(AlternativeModel, ZeroThetaAndBoundary) {
  auto rng = seeded(2);
  const MarketModel m = oracle::random_model(rng, 4);
  const Portfolio a = nominal_portfolio(m);
  const auto alt = alternative_model(m, 0.0, a);
  EXPECT_EQ(alt.mu_tilde, m.mu());
  EXPECT_EQ(alt.sigma_tilde, m.sigma());
  try {
    alternative_model(m, theta_max(m, a), a);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ThetaOutOfDomain);
  }
}

TEST(LogMgf, Examples) {
  const MarketModel m = identity_model(0.0, 0.0, 1.0);
  VectorXd e0(2);
  e0 << 1.0, 0.0;
  const Portfolio a = make_portfolio(m, e0);
  EXPECT_EQ(log_mgf(m, 0.0, a), 0.0);
  EXPECT_NEAR(log_mgf(m, 0.5, a), 0.596573590279972654709, 1e-15);
  EXPECT_TRUE(std::isfinite(log_mgf(m, -1e6, a)));
  EXPECT_THROW(log_mgf(m, 1.0, a), Error);
}

TEST(Lagrangian, Examples) {
  const MarketModel m = reference();
  const Portfolio a = nominal_portfolio(m);
  EXPECT_NEAR(lagrangian(m, 1.0, a, 0.1), 0.105309914886165491875, 1e-14);
  EXPECT_NEAR(lagrangian(m, 1e-8, a, 0.0), nominal_risk_value(m, a), 1e-6);
  try {
    lagrangian(m, 0.0, a, 0.1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ThetaZero);
  }
}

TEST(Lagrangian, ConsistentWithLogMgf) {
  auto rng = seeded(31);
  std::uniform_real_distribution<double> u(-2.0, 0.99);
  std::uniform_real_distribution<double> eta(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const MarketModel m = oracle::random_model(rng, 2 + i % 9);
    const Portfolio a = oracle::random_portfolio(rng, m);
    double theta = u(rng) * theta_max(m, a);
    if (theta == 0.0) theta = 0.1;
    const double e = eta(rng);
    const double diff = lagrangian(m, theta, a, e) - e / theta - log_mgf(m, theta, a) / theta;
    EXPECT_LT(std::abs(diff), 1e-12 * (1.0 + std::abs(lagrangian(m, theta, a, e))));
  }
}

TEST(GammaEff, Examples) {
  EXPECT_EQ(gamma_eff(0.0975, 0.0, 1.7), 1.7);
  EXPECT_NEAR(gamma_eff(0.0975, 1.0, 1.0), 2.33577090415205530958, 1e-14);
  for (double theta = -10.0; theta < 0.0; theta += 0.25) {
    EXPECT_LT(gamma_eff(0.0975, theta, 1.0), 1.0);
  }
  EXPECT_GT(gamma_eff(0.0975, 0.5, 1.0), 1.0);
  try {
    gamma_eff(1.0, 2.0, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DomainViolation);
  }
}

TEST(SolveSStar, Examples) {
  const MarketModel m = reference();
  EXPECT_EQ(solve_S_star(m, 3.0), 1.0 / m.constants().C);
  auto rng = seeded(4);
  const MarketModel r = oracle::random_model(rng, 5);
  EXPECT_NEAR(solve_S_star(r, 0.0), nominal_portfolio(r).variance,
              1e-13 * nominal_portfolio(r).variance);

  const MarketModel id = identity_model(0.1, 0.2, 1.0);
  const double s = solve_S_star(id, 1.0);
  EXPECT_LT(std::abs(fixed_point_residual(id, 1.0, s)), 1e-12);
  EXPECT_GE(s, 0.5);
  EXPECT_LT(s, 1.0);
  EXPECT_LT(fixed_point_residual(id, 1.0, 0.5), 0.0);
  EXPECT_GT(fixed_point_residual(id, 1.0, 1.0 - 1e-9), 0.0);
  const Portfolio bf = oracle::brute_force_portfolio(id, 1.0, Variant::general, 1e-12);
  EXPECT_LT((worst_case_portfolio(id, 1.0).weights - bf.weights).lpNorm<Eigen::Infinity>(), 1e-8);
}

TEST(SolveSStar, SingleSignChangeOnRandomModels) {
  auto rng = seeded(44);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  for (int i = 0; i < 40; ++i) {
    const MarketModel m = oracle::random_model(rng, 2 + i % 9);
    const double c = m.constants().C;
    const double theta = u(rng) * c / m.gamma();
    const double lo = 1.0 / c, hi = (1.0 - 1e-12) / (theta * m.gamma());
    int changes = 0;
    double prev = fixed_point_residual(m, theta, lo);
    for (int k = 1; k <= 1000; ++k) {
      const double cur = fixed_point_residual(m, theta, lo + (hi - lo) * k / 1000.0);
      if ((cur > 0.0) != (prev > 0.0)) ++changes;
      prev = cur;
    }
    EXPECT_EQ(changes, 1);
  }
}

TEST(SolveSStar, InadmissibleTheta) {
  const MarketModel m = reference();
  try {
    solve_S_star(m, 1.01 * m.constants().C);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoBracket);
  }
}

TEST(WorstCasePortfolio, TwoFundAndVariance) {
  auto rng = seeded(9);
  std::uniform_real_distribution<double> u(-0.3, 0.95);
  for (int i = 0; i < 50; ++i) {
    const MarketModel m = oracle::random_model(rng, 2 + i % 9);
    const double theta = u(rng) * m.constants().C / m.gamma();
    Portfolio a;
    try {
      a = worst_case_portfolio(m, theta);
    } catch (const Error& e) {
      ASSERT_LT(theta, 0.0) << e.what();  // past the best-case fold
      continue;
    }
    const double s = solve_S_star(m, theta);
    EXPECT_NEAR(a.variance, s, 1e-10 * s);
    EXPECT_LT(theta * m.gamma() * a.variance, 1.0);
    // a = c1 Sigma^-1 mu + c2 Sigma^-1 1 with c1 = 1/Gamma
    const double gam = gamma_eff(s, theta, m.gamma());
    const VectorXd rest = a.weights - m.inv_sigma_mu() / gam;
    const VectorXd fund = m.inv_sigma_ones();
    const double c2 = rest.dot(fund) / fund.squaredNorm();
    EXPECT_LT((rest - c2 * fund).norm(), 1e-12 * (1.0 + a.weights.norm()));
    if (theta > 0.0) EXPECT_GT(gam, m.gamma());
    if (theta < 0.0) EXPECT_LT(gam, m.gamma());
  }
  const MarketModel sym = reference();
  EXPECT_EQ(worst_case_portfolio(sym, 0.0).weights, nominal_portfolio(sym).weights);
  for (double theta : {-0.5, 0.5, 5.0, 10.0}) {
    EXPECT_LT((worst_case_portfolio(sym, theta).weights - VectorXd::Constant(10, 0.1))
                  .lpNorm<Eigen::Infinity>(),
              1e-12);
  }
}

TEST(RelativeEntropy, Examples) {
  const MarketModel m = reference();
  const Portfolio a = nominal_portfolio(m);
  EXPECT_EQ(relative_entropy_at(m, 0.0, a), 0.0);
  EXPECT_NEAR(relative_entropy_at(m, 1.0, a), 0.0625755371898621629, 1e-14);
  EXPECT_NEAR(entropy_of_theta(m, 1.0), 0.0625755371898621629, 1e-14);
  EXPECT_GT(relative_entropy_at(m, theta_max(m, a) * (1.0 - 1e-6), a), 10.0);
  EXPECT_EQ(entropy_of_theta(m, 0.0), 0.0);
}

TEST(RelativeEntropy, EqualsGaussianKl) {
  auto rng = seeded(71);
  std::uniform_real_distribution<double> u(-3.0, 0.95);
  for (int i = 0; i < 200; ++i) {
    const MarketModel m = oracle::random_model(rng, 2 + i % 9);
    const Portfolio a = oracle::random_portfolio(rng, m);
    const Variant v = i % 2 ? Variant::general : Variant::fixed_mean;
    const double theta = u(rng) * theta_max(m, a, v);
    const auto alt = alternative_model(m, theta, a, v);
    const double kl = oracle::gaussian_kl(alt.mu_tilde, alt.sigma_tilde, m.mu(), m.sigma());
    EXPECT_NEAR(relative_entropy_at(m, theta, a, v), kl, 1e-10);
    EXPECT_GE(relative_entropy_at(m, theta, a, v), 0.0);
  }
}

TEST(RelativeEntropy, DerivativeIdentity) {
  auto rng = seeded(72);
  std::uniform_real_distribution<double> u(0.1, 0.8);
  for (int i = 0; i < 50; ++i) {
    const MarketModel m = oracle::random_model(rng, 2 + i % 9);
    const Portfolio a = oracle::random_portfolio(rng, m);
    const double tmax = theta_max(m, a);
    const double theta = (i % 2 ? 1.0 : -1.0) * u(rng) * tmax;
    const auto d = oracle::entropy_derivative_check(m, theta, a, 1e-5 * tmax);
    EXPECT_LT(std::abs(d.fd - d.analytic) / std::abs(d.analytic), 1e-5);
    EXPECT_EQ(d.fd > 0.0, theta > 0.0);
  }
}

TEST(RelativeEntropy, MonotoneInTheta) {
  auto rng = seeded(73);
  for (int i = 0; i < 10; ++i) {
    const MarketModel m = oracle::random_model(rng, 2 + i % 9);
    const double top = m.constants().C / m.gamma();
    double prev = 0.0;
    for (int k = 1; k < 100; ++k) {
      const double r = entropy_of_theta(m, top * k / 100.0);
      EXPECT_GT(r, prev);
      prev = r;
    }
  }
}

TEST(Lagrangian, MidpointConvexInsideDomain) {
  auto rng = seeded(74);
  std::uniform_real_distribution<double> u(0.05, 0.9);
  int checked = 0;
  while (checked < 100) {
    const MarketModel m = oracle::random_model(rng, 2 + checked % 9);
    const Portfolio a1 = oracle::random_portfolio(rng, m);
    const Portfolio a2 = oracle::random_portfolio(rng, m);
    const double theta = u(rng) * std::min(theta_max(m, a1), theta_max(m, a2));
    const Portfolio mid = make_portfolio(m, 0.5 * (a1.weights + a2.weights));
    const double l1 = lagrangian(m, theta, a1, 0.1);
    const double l2 = lagrangian(m, theta, a2, 0.1);
    EXPECT_LE(lagrangian(m, theta, mid, 0.1), 0.5 * (l1 + l2) + 1e-12);
    ++checked;
  }
}

TEST(RiskValue, TiltedValueEqualsMgfDerivative) {
  // E~[V] = d/dtheta ln E[exp(theta V)]
  auto rng = seeded(75);
  std::uniform_real_distribution<double> u(-1.0, 0.8);
  for (int i = 0; i < 50; ++i) {
    const MarketModel m = oracle::random_model(rng, 2 + i % 9);
    const Portfolio a = oracle::random_portfolio(rng, m);
    const double tmax = theta_max(m, a);
    const double theta = u(rng) * tmax;
    const double h = 1e-5 * tmax;
    for (Variant v : {Variant::general, Variant::fixed_mean, Variant::min_variance}) {
      const double fd = (log_mgf(m, theta + h, a, v) - log_mgf(m, theta - h, a, v)) / (2 * h);
      const double val = alternative_risk_value(m, theta, a, v);
      EXPECT_NEAR(val, fd, 1e-6 * (1.0 + std::abs(val)));
    }
  }
}

TEST(RiskValue, OrderedAroundNominal) {
  auto rng = seeded(76);
  for (int i = 0; i < 20; ++i) {
    const MarketModel m = oracle::random_model(rng, 2 + i % 9);
    const double nominal = nominal_risk_value(m, nominal_portfolio(m));
    EXPECT_EQ(worst_case_risk_value(m, 0.0), nominal);
    const double c = m.constants().C / m.gamma();
    for (double f : {0.1, 0.5, 0.9}) EXPECT_GE(worst_case_risk_value(m, f * c), nominal);
    for (double f : {0.001, 0.01}) {
      try {
        EXPECT_LE(worst_case_risk_value(m, -f * c), nominal);
      } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NoBracket);
      }
    }
  }
}

TEST(BestCase, BranchPointIsStationary) {
  auto rng = seeded(77);
  for (int i = 0; i < 20; ++i) {
    const MarketModel m = oracle::random_model(rng, 2 + i % 9);
    const double s_nom = nominal_variance(m);
    for (double f : {1.01, 1.5, 4.0, 50.0}) {
      const double s = 1.0 / m.constants().C + f * (s_nom - 1.0 / m.constants().C);
      const auto p = best_case_branch_point(m, s);
      EXPECT_LT(p.theta, 0.0);
      EXPECT_LT(std::abs(fixed_point_residual(m, p.theta, s)), 1e-10 * s);
    }
  }
}

TEST(BestCase, FoldEndsTheBranch) {
  auto rng = seeded(78);
  const MarketModel m = oracle::random_model(rng, 5);
  const double fold = best_case_theta_fold(m);
  EXPECT_LT(fold, 0.0);
  EXPECT_NO_THROW(solve_S_star(m, fold * (1.0 - 1e-6)));
  EXPECT_THROW(solve_S_star(m, fold * (1.0 + 1e-6)), Error);
}
