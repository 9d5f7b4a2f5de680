#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace uavsense {

/// Process exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,
  kExitValidation = 3,
  kExitInfeasible = 4,
  kExitInternal = 5,
};

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr const char* kScenarioDirEnv = "UAVSENSE_SCENARIO_DIR";

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace uavsense
