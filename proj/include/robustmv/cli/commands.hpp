#pragma once

#include <ostream>

#include "robustmv/cli/config.hpp"

namespace robustmv::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 1,
  kExitDomain = 2,
  kExitIo = 3,
  kExitVerify = 4,
};

int exit_code_for(const Error& e);

// Each command writes its product to cfg.out (stdout when empty) and
// diagnostics to err. Library errors are mapped to exit codes here.
int cmd_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_frontier(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_perturb(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_gd_demo(const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace robustmv::cli
