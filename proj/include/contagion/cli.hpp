#pragma once

#include <ostream>

#include "contagion/network.hpp"

namespace contagion {

/// Process exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 1,
  kExitIo = 2,
  kExitQuery = 3,
};

/// Firms of the default 5-core, 19-periphery-per-core study: a core bank C,
/// a second core bank C', a periphery creditor P of C, a second periphery
/// creditor P'' of C and a periphery creditor P' of C'. 0-based.
struct StudyRoles {
  int core = 0;
  int other_core = 1;
  int periphery = 5;
  int sibling_periphery = 6;
  int other_periphery = 24;
};
StudyRoles study_roles(int n_core = 5, int n_periphery_per_core = 19);

/// Runs the tool as if invoked with argv; writes results to `out` and
/// diagnostics (a human-readable line plus a JSON error object) to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace contagion
