#include "robustmv/cli/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include "robustmv/cli/csv.hpp"
#include "robustmv/oracle/monte_carlo.hpp"

namespace robustmv::cli {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& msg) { throw Error(ErrorCode::Config, msg); }

void reject_unknown(const json& obj, const std::set<std::string>& known,
                    const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!known.count(it.key())) fail("unknown key '" + it.key() + "' in " + where);
  }
}

double number(const json& j, const std::string& key) {
  if (!j.is_number()) fail("'" + key + "' must be a number");
  return j.get<double>();
}

std::int64_t integer(const json& j, const std::string& key) {
  if (!j.is_number_integer()) fail("'" + key + "' must be an integer");
  return j.get<std::int64_t>();
}

std::string text(const json& j, const std::string& key) {
  if (!j.is_string()) fail("'" + key + "' must be a string");
  return j.get<std::string>();
}

VectorXd vector_of(const json& j, const std::string& key) {
  if (!j.is_array() || j.empty()) fail("'" + key + "' must be a non-empty array");
  VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    v[i] = number(j[i], key + "[" + std::to_string(i) + "]");
  }
  return v;
}

MatrixXd matrix_of(const json& j, const std::string& key) {
  if (!j.is_array() || j.empty()) fail("'" + key + "' must be an array of rows");
  const std::size_t rows = j.size();
  std::size_t cols = 0;
  for (std::size_t i = 0; i < rows; ++i) {
    if (!j[i].is_array()) fail(key + " row " + std::to_string(i + 1) + " is not an array");
    if (i == 0) cols = j[i].size();
    if (j[i].size() != cols) {
      fail(key + " row " + std::to_string(i + 1) + " has " +
           std::to_string(j[i].size()) + " entries, expected " + std::to_string(cols));
    }
  }
  MatrixXd m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t k = 0; k < cols; ++k)
      m(i, k) = number(j[i][k], key + " row " + std::to_string(i + 1));
  return m;
}

std::vector<double> grid_of(const json& j, const std::string& key) {
  std::vector<double> out;
  if (j.is_string()) return parse_grid(j.get<std::string>());
  if (!j.is_array()) fail("'" + key + "' must be an array or 'start:stop:step'");
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], key));
  return out;
}

Interval interval_of(const json& j, const std::string& key) {
  if (!j.is_array() || j.size() != 2) fail("'" + key + "' must be [lo, hi]");
  const Interval r{number(j[0], key), number(j[1], key)};
  if (!(r.lo < r.hi)) fail("'" + key + "' must have lo < hi");
  return r;
}

std::string resolve(const std::string& path, const std::string& base_dir) {
  if (path.empty() || base_dir.empty()) return path;
  const std::filesystem::path p(path);
  if (p.is_absolute()) return path;
  return (std::filesystem::path(base_dir) / p).string();
}

void parse_model(const json& m, ModelSource& src, const std::string& base_dir) {
  if (!m.is_object()) fail("'model' must be an object");
  reject_unknown(m, {"mu", "sigma", "symmetric", "mu_csv", "sigma_csv"}, "model");
  const bool dense = m.contains("mu") || m.contains("sigma");
  const bool sym = m.contains("symmetric");
  const bool files = m.contains("mu_csv") || m.contains("sigma_csv");
  if (static_cast<int>(dense) + static_cast<int>(sym) + static_cast<int>(files) != 1) {
    fail("model needs exactly one source: {mu, sigma}, symmetric, or {mu_csv, sigma_csv}");
  }
  if (dense) {
    if (!m.contains("mu") || !m.contains("sigma")) fail("dense model needs both mu and sigma");
    src.mu = vector_of(m["mu"], "mu");
    src.sigma = matrix_of(m["sigma"], "sigma");
  } else if (sym) {
    const json& s = m["symmetric"];
    if (!s.is_object()) fail("'symmetric' must be an object");
    reject_unknown(s, {"n", "sigma2", "rho", "mu", "mu_noise_seed"}, "symmetric");
    for (const char* key : {"n", "sigma2", "rho", "mu"}) {
      if (!s.contains(key)) fail(std::string("symmetric spec is missing '") + key + "'");
    }
    SymmetricModelSpec spec;
    spec.n = static_cast<int>(integer(s["n"], "n"));
    spec.sigma2 = number(s["sigma2"], "sigma2");
    spec.rho = number(s["rho"], "rho");
    spec.mu_scalar = number(s["mu"], "mu");
    src.symmetric = spec;
    if (s.contains("mu_noise_seed")) {
      if (!s["mu_noise_seed"].is_number_unsigned()) {
        fail("'mu_noise_seed' must be a non-negative integer");
      }
      src.mu_noise_seed = s["mu_noise_seed"].get<std::uint64_t>();
    }
  } else {
    if (!m.contains("mu_csv") || !m.contains("sigma_csv")) {
      fail("file model needs both mu_csv and sigma_csv");
    }
    src.mu_csv = resolve(text(m["mu_csv"], "mu_csv"), base_dir);
    src.sigma_csv = resolve(text(m["sigma_csv"], "sigma_csv"), base_dir);
  }
}

}  // namespace

std::vector<double> parse_grid(const std::string& spec) {
  const auto c1 = spec.find(':');
  const auto c2 = c1 == std::string::npos ? c1 : spec.find(':', c1 + 1);
  if (c2 == std::string::npos) fail("grid '" + spec + "' is not start:stop:step");
  double v[3];
  const std::string parts[3] = {spec.substr(0, c1), spec.substr(c1 + 1, c2 - c1 - 1),
                                spec.substr(c2 + 1)};
  for (int i = 0; i < 3; ++i) {
    std::size_t used = 0;
    try {
      v[i] = std::stod(parts[i], &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != parts[i].size()) {
      fail("grid '" + spec + "': '" + parts[i] + "' is not a number");
    }
  }
  const double start = v[0], stop = v[1], step = v[2];
  if (!(step > 0.0) || !(stop >= start)) {
    fail("grid '" + spec + "' needs step > 0 and stop >= start");
  }
  const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
  if (count > 1000000) fail("grid '" + spec + "' is too long");
  std::vector<double> out;
  for (long i = 0; i < count; ++i) out.push_back(start + step * static_cast<double>(i));
  return out;
}

Directions parse_directions(const std::string& s) {
  if (s == "worst") return {true, false};
  if (s == "best") return {false, true};
  if (s == "both") return {true, true};
  fail("direction must be worst, best or both, got '" + s + "'");
}

RunConfig parse_config(const json& doc, const std::string& base_dir) {
  if (!doc.is_object()) fail("config must be a JSON object");
  reject_unknown(doc,
                 {"model", "gamma", "eta", "eta_grid", "theta_grid", "variant",
                  "direction", "out", "seed", "mc_samples", "verify_cases", "gd",
                  "perturb"},
                 "config");
  RunConfig cfg;
  if (!doc.contains("model")) fail("config has no 'model'");
  parse_model(doc["model"], cfg.model, base_dir);
  if (doc.contains("gamma")) cfg.gamma = number(doc["gamma"], "gamma");
  if (doc.contains("eta")) cfg.eta = number(doc["eta"], "eta");
  if (doc.contains("eta_grid")) {
    cfg.eta_grid = grid_of(doc["eta_grid"], "eta_grid");
    try {
      check_eta_grid(cfg.eta_grid);
    } catch (const Error& e) {
      fail(std::string("eta_grid: ") + e.what());
    }
  }
  if (doc.contains("theta_grid")) cfg.theta_grid = grid_of(doc["theta_grid"], "theta_grid");
  if (doc.contains("variant")) {
    const auto v = parse_variant(text(doc["variant"], "variant"));
    if (!v) fail("unknown variant '" + doc["variant"].get<std::string>() + "'");
    cfg.variant = *v;
  }
  if (doc.contains("direction")) {
    cfg.direction = text(doc["direction"], "direction");
    (void)parse_directions(*cfg.direction);
  }
  if (doc.contains("out")) cfg.out = resolve(text(doc["out"], "out"), base_dir);
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) fail("'seed' must be a non-negative integer");
    cfg.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("mc_samples")) cfg.mc_samples = integer(doc["mc_samples"], "mc_samples");
  if (doc.contains("verify_cases")) {
    cfg.verify_cases = static_cast<int>(integer(doc["verify_cases"], "verify_cases"));
  }
  if (doc.contains("gd")) {
    const json& g = doc["gd"];
    if (!g.is_object()) fail("'gd' must be an object");
    reject_unknown(g, {"theta", "step", "iterations", "mode", "start"}, "gd");
    if (g.contains("theta")) cfg.gd_theta = number(g["theta"], "gd.theta");
    if (g.contains("step")) cfg.gd_step = number(g["step"], "gd.step");
    if (g.contains("iterations")) {
      cfg.gd_iterations = static_cast<int>(integer(g["iterations"], "gd.iterations"));
    }
    if (g.contains("mode")) {
      cfg.gd_mode = text(g["mode"], "gd.mode");
      if (cfg.gd_mode != "multiplier" && cfg.gd_mode != "projected") {
        fail("gd.mode must be multiplier or projected");
      }
    }
    if (g.contains("start")) {
      const std::string s = text(g["start"], "gd.start");
      if (s != "optimum" && s != "random") fail("gd.start must be optimum or random");
      cfg.gd_start_at_optimum = s == "optimum";
    }
  }
  if (doc.contains("perturb")) {
    const json& p = doc["perturb"];
    if (!p.is_object()) fail("'perturb' must be an object");
    reject_unknown(p, {"rho_range", "k_range", "points", "theta_points", "eta"}, "perturb");
    if (p.contains("rho_range")) cfg.rho_range = interval_of(p["rho_range"], "rho_range");
    if (p.contains("k_range")) cfg.k_range = interval_of(p["k_range"], "k_range");
    if (p.contains("points")) cfg.perturb_points = static_cast<int>(integer(p["points"], "points"));
    if (p.contains("theta_points")) {
      cfg.theta_points = static_cast<int>(integer(p["theta_points"], "theta_points"));
    }
    if (p.contains("eta")) cfg.perturb_eta = number(p["eta"], "perturb.eta");
  }
  if (cfg.mc_samples < 2) fail("mc_samples must be at least 2");
  if (cfg.verify_cases < 1) fail("verify_cases must be positive");
  if (cfg.gd_iterations < 0) fail("gd.iterations must be non-negative");
  if (cfg.perturb_points < 2 || cfg.theta_points < 2) fail("scan point counts must be >= 2");
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open config " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    fail(path + ": " + e.what());
  }
  return parse_config(doc, std::filesystem::path(path).parent_path().string());
}

MarketModel build_model(const RunConfig& cfg) {
  const ModelSource& src = cfg.model;
  if (src.symmetric) {
    MatrixXd sigma = symmetric_covariance(*src.symmetric);
    VectorXd mu = VectorXd::Constant(src.symmetric->n, src.symmetric->mu_scalar);
    if (src.mu_noise_seed) {
      oracle::CounterRng rng(*src.mu_noise_seed, 0);
      std::normal_distribution<double> normal;
      for (Eigen::Index i = 0; i < mu.size(); ++i) mu[i] *= 1.0 + normal(rng);
    }
    return MarketModel::create(std::move(mu), std::move(sigma), cfg.gamma);
  }
  if (src.mu && src.sigma) return MarketModel::create(*src.mu, *src.sigma, cfg.gamma);
  if (!src.mu_csv.empty()) {
    const MatrixXd m = read_numeric_csv(src.mu_csv);
    if (m.rows() != 1 && m.cols() != 1) {
      fail(src.mu_csv + ": mean must be a single row or column");
    }
    VectorXd mu = m.reshaped();
    return MarketModel::create(std::move(mu), read_numeric_csv(src.sigma_csv), cfg.gamma);
  }
  fail("no model source");
}

json model_to_json(const MarketModel& model) {
  json sigma = json::array();
  for (Eigen::Index i = 0; i < model.size(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < model.size(); ++j) row.push_back(model.sigma()(i, j));
    sigma.push_back(std::move(row));
  }
  json mu = json::array();
  for (Eigen::Index i = 0; i < model.size(); ++i) mu.push_back(model.mu()[i]);
  return {{"model", {{"mu", mu}, {"sigma", sigma}}}, {"gamma", model.gamma()}};
}

MarketModel model_from_json(const json& doc) {
  RunConfig cfg = parse_config(doc);
  return build_model(cfg);
}

}  // namespace robustmv::cli
