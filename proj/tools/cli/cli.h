#ifndef COGSPEECH_TOOLS_CLI_CLI_H_
#define COGSPEECH_TOOLS_CLI_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace cogspeech::cli {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitGateFailures = 2;
inline constexpr int kExitConfigError = 3;
inline constexpr int kExitInputError = 4;
inline constexpr int kExitAdapterFailure = 5;

// Runs one subcommand. `args` excludes the program name.
int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cogspeech::cli

#endif  // COGSPEECH_TOOLS_CLI_CLI_H_
