#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "robustmv/calibration.hpp"

namespace robustmv::cli {

/// Exactly one of the three sources is set after parsing.
struct ModelSource {
  std::optional<VectorXd> mu;
  std::optional<MatrixXd> sigma;
  std::optional<SymmetricModelSpec> symmetric;
  std::optional<std::uint64_t> mu_noise_seed;  ///< mu_i = mu (1 + x_i), x_i ~ N(0,1)
  std::string mu_csv;
  std::string sigma_csv;
};

struct RunConfig {
  ModelSource model;
  double gamma = 1.0;
  std::optional<double> eta;
  std::vector<double> eta_grid;
  std::vector<double> theta_grid;
  Variant variant = Variant::general;
  std::optional<std::string> direction;  ///< worst, best or both
  std::string out;
  std::uint64_t seed = 20240101;

  std::int64_t mc_samples = 1000000;
  int verify_cases = 20;

  double gd_theta = 0.0;
  double gd_step = 0.0;
  int gd_iterations = 100;
  std::string gd_mode = "multiplier";
  bool gd_start_at_optimum = false;

  Interval rho_range{0.05, 0.45};
  Interval k_range{0.72, 1.32};
  int perturb_points = 41;
  int theta_points = 41;
  double perturb_eta = 0.25;
};

/// "start:stop:step", inclusive of stop up to rounding.
std::vector<double> parse_grid(const std::string& spec);

/// Relative CSV paths are resolved against base_dir.
RunConfig parse_config(const nlohmann::json& doc, const std::string& base_dir = "");
RunConfig load_config(const std::string& path);

MarketModel build_model(const RunConfig& cfg);

Directions parse_directions(const std::string& s);

/// Dense {mu, sigma, gamma} document; doubles are written with enough digits
/// to read back bit-identically.
nlohmann::json model_to_json(const MarketModel& model);
MarketModel model_from_json(const nlohmann::json& doc);

}  // namespace robustmv::cli
