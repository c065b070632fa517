#include "robustmv/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <random>
#include <sstream>

#include "robustmv/cli/csv.hpp"
#include "robustmv/oracle/brute_force.hpp"
#include "robustmv/oracle/gradient_descent.hpp"
#include "robustmv/oracle/monte_carlo.hpp"
#include "robustmv/oracle/quadratic_form.hpp"
#include "robustmv/oracle/random_model.hpp"

namespace robustmv::cli {

using nlohmann::json;

int exit_code_for(const Error& e) {
  if (e.code() == ErrorCode::Io) return kExitIo;
  if (is_validation_error(e.code()) || e.code() == ErrorCode::InvalidArgument) {
    return kExitConfig;
  }
  return kExitDomain;
}

namespace {

int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}

/// Runs write(os) against cfg.out, or against out when no path is set.
void emit(const RunConfig& cfg, std::ostream& out,
          const std::function<void(std::ostream&)>& write) {
  if (cfg.out.empty()) {
    write(out);
    out.flush();
    return;
  }
  std::ofstream file(cfg.out, std::ios::binary);
  if (!file) throw Error(ErrorCode::Io, "cannot open " + cfg.out + " for writing");
  write(file);
  file.flush();
  if (!file) throw Error(ErrorCode::Io, "write to " + cfg.out + " failed");
}

json to_json(const VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json to_json(const MatrixXd& m) {
  json a = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(to_json(VectorXd(m.row(i))));
  return a;
}

json to_json(const RobustSolution& s, Direction dir, double eta) {
  return {{"direction", std::string(to_string(dir))},
          {"eta", eta},
          {"theta_star", s.theta_star},
          {"gamma_eff", s.gamma_eff},
          {"weights", to_json(s.portfolio.weights)},
          {"variance", s.portfolio.variance},
          {"entropy", s.entropy},
          {"risk_value_alternative", s.risk_value_alternative},
          {"risk_value_nominal_at_robust", s.risk_value_nominal_at_robust},
          {"mu_tilde", to_json(s.alternative.mu_tilde)},
          {"sigma_tilde", to_json(s.alternative.sigma_tilde)}};
}

}  // namespace

int cmd_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (!cfg.eta) throw Error(ErrorCode::Config, "solve needs a single eta");
    const MarketModel model = build_model(cfg);
    const Directions dirs = parse_directions(cfg.direction.value_or("worst"));
    json doc = {{"variant", std::string(to_string(cfg.variant))},
                {"gamma", model.gamma()},
                {"nominal_weights", to_json(nominal_optimum(model, cfg.variant).weights)},
                {"risk_value_nominal", nominal_optimum_value(model, cfg.variant)}};
    json solutions = json::array();
    for (Direction d : {Direction::worst, Direction::best}) {
      if (d == Direction::worst ? !dirs.worst : !dirs.best) continue;
      const auto s = calibrate_theta({model, *cfg.eta, cfg.variant, d});
      solutions.push_back(to_json(s, d, *cfg.eta));
    }
    doc["solutions"] = solutions;
    emit(cfg, out, [&](std::ostream& os) { os << doc.dump(2) << '\n'; });
    return kExitOk;
  });
}

int cmd_frontier(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const MarketModel model = build_model(cfg);
    const Directions dirs = parse_directions(cfg.direction.value_or("both"));
    std::vector<FrontierPoint> points;
    if (!cfg.theta_grid.empty()) {
      points = frontier_theta_scan(model, cfg.theta_grid, cfg.variant, dirs);
    } else {
      std::vector<double> grid = cfg.eta_grid;
      if (grid.empty()) grid = cfg.eta ? std::vector<double>{*cfg.eta} : parse_grid("0:0.25:0.01");
      points = frontier(model, grid, cfg.variant, dirs);
    }
    emit(cfg, out, [&](std::ostream& os) {
      CsvWriter csv(os);
      csv.row({"eta", "theta", "risk_worst", "risk_best", "risk_nominal",
               "risk_nominal_at_robust", "risk_alt_at_nominal"});
      for (const auto& p : points) {
        const double theta = dirs.worst ? p.theta : p.theta_best;
        csv.row({format_number(p.eta), format_number(theta), format_number(p.risk_worst),
                 format_number(p.risk_best), format_number(p.risk_nominal),
                 format_number(p.risk_nominal_at_robust),
                 format_number(p.risk_alt_at_nominal_portfolio)});
      }
    });
    return kExitOk;
  });
}

int cmd_perturb(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (!cfg.model.symmetric || cfg.model.mu_noise_seed) {
      throw Error(ErrorCode::Config, "perturb needs a symmetric model without mean noise");
    }
    const MarketModel model = build_model(cfg);
    const std::vector<double> thetas =
        cfg.theta_grid.empty()
            ? perturbation_theta_grid(model, cfg.perturb_eta, cfg.theta_points)
            : cfg.theta_grid;
    const auto res = perturbation_scan(*cfg.model.symmetric, cfg.gamma, thetas,
                                       cfg.rho_range, cfg.k_range, cfg.perturb_points);
    emit(cfg, out, [&](std::ostream& os) {
      CsvWriter csv(os);
      csv.row({"curve", "param_value", "entropy", "risk_value"});
      for (const auto& r : res.rows) {
        csv.row({r.curve, format_number(r.param), format_number(r.entropy),
                 format_number(r.risk_value)});
      }
    });
    err << "joint curve max gap to the alternative model: " << format_number(res.joint_max_gap)
        << "\nrho-only gap at the high-risk end: " << format_number(res.rho_gap)
        << "\nk-only gap at the high-risk end: " << format_number(res.k_gap) << '\n';
    return kExitOk;
  });
}

namespace {

struct CheckRow {
  std::string name;
  double measured = 0.0;
  double threshold = 0.0;
  std::string status;
  std::string note;
};

void track(CheckRow& row, double value) {
  if (!std::isfinite(value)) value = INFINITY;
  row.measured = std::max(row.measured, value);
}

}  // namespace

int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    // a configured model is validated even though the suite draws its own
    if (cfg.model.mu || cfg.model.symmetric || !cfg.model.mu_csv.empty()) {
      (void)build_model(cfg);
    }
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    CheckRow calib{"ball_surface |R(theta*)-eta|", 0.0, 1e-10, "", ""};
    CheckRow brute{"brute_force max |a - a_bf|", 0.0, 1e-6, "", ""};
    CheckRow kl{"entropy vs gaussian_kl", 0.0, 1e-10, "", ""};
    CheckRow deriv{"dR/dtheta vs theta Var~(V) (rel)", 0.0, 1e-5, "", ""};
    CheckRow mc{"monte_carlo |z|", 0.0, 4.0, "", ""};
    CheckRow heavy{"monte_carlo near theta_max |z|", 0.0, 4.0, "", ""};
    const int ns[3] = {2, 5, 10};
    int mc_cases = 0;

    for (int c = 0; c < cfg.verify_cases; ++c) {
      const MarketModel model = oracle::random_model(rng, ns[c % 3], cfg.gamma);
      for (Variant v : {Variant::general, Variant::fixed_mean}) {
        for (Direction d : {Direction::worst, Direction::best}) {
          for (double eta : {0.01, 0.1, 0.25}) {
            try {
              track(calib, std::abs(calibrate_theta({model, eta, v, d}).entropy - eta));
            } catch (const Error& e) {
              track(calib, INFINITY);
              calib.note = e.what();
            }
          }
        }
      }
      for (Variant v : {Variant::general, Variant::fixed_mean, Variant::min_variance}) {
        const double theta = calibrate_theta({model, 0.1, v, Direction::worst}).theta_star;
        const VectorXd analytic = solve_at_theta(model, theta, v).portfolio.weights;
        try {
          const auto bf = oracle::brute_force_portfolio(model, theta, v, 1e-11);
          track(brute, (bf.weights - analytic).lpNorm<Eigen::Infinity>());
        } catch (const Error& e) {
          track(brute, INFINITY);
          brute.note = e.what();
        }
      }
      for (Variant v : {Variant::general, Variant::fixed_mean}) {
        const Portfolio a = oracle::random_portfolio(rng, model);
        const double tmax = theta_max(model, a, v);
        const double theta = (-2.0 + 2.9 * unit(rng)) * tmax;
        const auto alt = alternative_model(model, theta, a, v);
        track(kl, std::abs(relative_entropy_at(model, theta, a, v) -
                           oracle::gaussian_kl(alt.mu_tilde, alt.sigma_tilde,
                                               model.mu(), model.sigma())));
        const double u = 0.1 + 0.7 * unit(rng);
        const double td = (unit(rng) < 0.5 ? u : -u) * tmax;
        const auto dc = oracle::entropy_derivative_check(model, td, a, 1e-5 * tmax, v);
        track(deriv, std::abs(dc.fd - dc.analytic) / std::abs(dc.analytic));
      }
      if (mc_cases < 5) {
        ++mc_cases;
        const Portfolio a = oracle::random_portfolio(rng, model);
        const double x = 0.05 + 0.25 * unit(rng);
        const double theta = x / (model.gamma() * a.variance);
        oracle::MCConfig mcc{cfg.mc_samples, cfg.seed + static_cast<std::uint64_t>(c), true};
        try {
          const auto est = oracle::mc_worst_case_value(model, theta, a, mcc);
          track(mc, std::abs(est.estimate - alternative_risk_value(model, theta, a)) /
                        est.std_error);
        } catch (const Error& e) {
          track(mc, INFINITY);
          mc.note = e.what();
        }
        if (c == 0) {
          const double th = 0.95 * theta_max(model, a);
          oracle::MCConfig small{std::min<std::int64_t>(cfg.mc_samples, 10000), cfg.seed, false};
          try {
            const auto est = oracle::mc_worst_case_value(model, th, a, small);
            track(heavy, std::abs(est.estimate - alternative_risk_value(model, th, a)) /
                             est.std_error);
            heavy.note = "heavy-tailed weights; informational only";
          } catch (const Error& e) {
            if (e.code() != ErrorCode::DegenerateWeights) throw;
            heavy.note = e.what();
          }
          heavy.status = "SKIP";
        }
      }
    }

    std::vector<CheckRow*> rows = {&calib, &brute, &kl, &deriv, &mc, &heavy};
    bool ok = true;
    for (CheckRow* r : rows) {
      if (r->status.empty()) r->status = r->measured <= r->threshold ? "PASS" : "FAIL";
      ok = ok && r->status != "FAIL";
    }
    emit(cfg, out, [&](std::ostream& os) {
      os << std::left << std::setw(36) << "check" << std::setw(14) << "measured"
         << std::setw(12) << "threshold" << "status\n";
      for (const CheckRow* r : rows) {
        std::ostringstream m, t;
        m << std::setprecision(3) << r->measured;
        t << std::setprecision(3) << r->threshold;
        os << std::left << std::setw(36) << r->name << std::setw(14) << m.str()
           << std::setw(12) << t.str() << r->status;
        if (!r->note.empty()) os << "  (" << r->note << ")";
        os << '\n';
      }
    });
    if (heavy.status == "SKIP") {
      err << "warning: Monte Carlo near theta_max not scored: " << heavy.note << '\n';
    }
    return ok ? kExitOk : kExitVerify;
  });
}

int cmd_gd_demo(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const MarketModel model = build_model(cfg);
    oracle::GDOptions opt;
    opt.step = cfg.gd_step;
    opt.max_iter = cfg.gd_iterations;
    opt.seed = cfg.seed;
    opt.mode = cfg.gd_mode == "projected" ? oracle::GDMode::projected
                                          : oracle::GDMode::multiplier;
    if (cfg.gd_start_at_optimum) {
      opt.start = solve_at_theta(model, cfg.gd_theta, cfg.variant).portfolio.weights;
    }
    const auto tr = oracle::gd_trace(model, cfg.gd_theta, cfg.variant, opt);
    emit(cfg, out, [&](std::ostream& os) {
      CsvWriter csv(os);
      csv.row({"iter", "objective", "err_lambda1_subspace", "err_lambda2_subspace"});
      for (std::size_t i = 0; i < tr.iterates.size(); ++i) {
        csv.row({std::to_string(i), format_number(tr.objective_values[i]),
                 format_number(tr.err_top[i]), format_number(tr.err_rest[i])});
      }
    });
    const double r1 = oracle::contraction_rate(tr.err_top);
    const double r2 = oracle::contraction_rate(tr.err_rest);
    err << "step " << format_number(tr.step_size) << ", Hessian eigenvalues: top "
        << format_number(tr.lambda_top) << ", rest in [" << format_number(tr.lambda_rest_min)
        << ", " << format_number(tr.lambda_rest_max) << "]\n"
        << "log contraction per iteration: top " << format_number(r1) << ", rest "
        << format_number(r2) << '\n';
    return kExitOk;
  });
}

}  // namespace robustmv::cli
