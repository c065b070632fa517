#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "robustmv/cli/commands.hpp"

using namespace robustmv;

namespace {

struct Flags {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<double> eta;
  std::string eta_grid;
  std::string variant;
  std::string direction;
};

cli::RunConfig resolve_config(const Flags& f) {
  if (f.config.empty()) throw Error(ErrorCode::Config, "--config is required");
  cli::RunConfig cfg = cli::load_config(f.config);
  if (!f.out.empty()) cfg.out = f.out;
  if (f.seed) cfg.seed = *f.seed;
  if (f.eta) cfg.eta = *f.eta;
  if (!f.eta_grid.empty()) {
    cfg.eta_grid = cli::parse_grid(f.eta_grid);
    cfg.theta_grid.clear();
  }
  if (!f.variant.empty()) {
    const auto v = parse_variant(f.variant);
    if (!v) throw Error(ErrorCode::Config, "unknown variant '" + f.variant + "'");
    cfg.variant = *v;
  }
  if (!f.direction.empty()) {
    (void)cli::parse_directions(f.direction);
    cfg.direction = f.direction;
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust mean-variance portfolios under relative-entropy model risk"};
  app.footer(
      "Exit codes:\n"
      "  0  success\n"
      "  1  configuration or model validation error\n"
      "  2  domain error (theta or eta outside the admissible range, solver failure)\n"
      "  3  I/O error\n"
      "  4  verification failure (verify)");
  app.require_subcommand(1);
  app.fallthrough();

  Flags f;
  app.add_option("--config", f.config, "JSON run configuration");
  app.add_option("--out", f.out, "output file (default: stdout)");
  app.add_option("--seed", f.seed, "random seed");
  app.add_option("--eta", f.eta, "relative-entropy radius");
  app.add_option("--eta-grid", f.eta_grid, "eta grid as start:stop:step");
  app.add_option("--variant", f.variant, "general | fixed-mean | min-variance");
  app.add_option("--direction", f.direction, "worst | best | both");

  using Command = int (*)(const cli::RunConfig&, std::ostream&, std::ostream&);
  Command chosen = nullptr;
  auto add = [&](const char* name, const char* help, Command cmd) {
    app.add_subcommand(name, help)->callback([&chosen, cmd] { chosen = cmd; });
  };
  add("solve", "calibrate theta* for one eta and print the robust solution as JSON",
      cli::cmd_solve);
  add("frontier", "write the entropy/risk frontier as CSV", cli::cmd_frontier);
  add("perturb", "write the correlation/scale perturbation curves as CSV",
      cli::cmd_perturb);
  add("verify", "run the oracle cross-checks and print a pass/fail table",
      cli::cmd_verify);
  add("gd-demo", "write a gradient-descent trace split by Hessian eigenspace",
      cli::cmd_gd_demo);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::kExitConfig;
  }

  try {
    const cli::RunConfig cfg = resolve_config(f);
    return chosen(cfg, std::cout, std::cerr);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::exit_code_for(e);
  }
}
