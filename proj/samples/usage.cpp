// Robust portfolio on the ten-asset equicorrelated model and on a perturbed
// copy with uneven means.
#include <cmath>
#include <cstdio>

#include "robustmv/robustmv.hpp"

using namespace robustmv;

static void report(const char* label, const MarketModel& model, double eta) {
  for (Direction d : {Direction::worst, Direction::best}) {
    const auto s = calibrate_theta({model, eta, Variant::fixed_mean, d});
    std::printf("%-12s %-5s theta* = %9.5f  R = %.10f  value = %.8f  a[0] = %.6f\n", label,
                to_string(d).data(), s.theta_star, s.entropy, s.risk_value_alternative,
                s.portfolio.weights[0]);
  }
}

int main() {
  const MarketModel sym = expand_symmetric(reference_symmetric_spec(), 1.0);
  report("symmetric", sym, 0.25);

  VectorXd mu = sym.mu();
  for (Eigen::Index i = 0; i < mu.size(); ++i) mu[i] *= 1.0 + 0.3 * std::sin(1.0 + i);
  const MarketModel skewed = MarketModel::create(mu, sym.sigma(), 1.0);
  report("uneven mean", skewed, 0.25);

  const auto pts = frontier(skewed, {0.0, 0.05, 0.1, 0.25}, Variant::fixed_mean, {});
  for (const auto& p : pts) {
    std::printf("eta %.2f  worst %.6f  best %.6f  nominal %.6f\n", p.eta, p.risk_worst,
                p.risk_best, p.risk_nominal);
  }
}
