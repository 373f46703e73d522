#pragma once

#include <string>
#include <vector>

namespace ksm {

/// Exit codes of the command-line tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitValidation = 1,
    kExitNumerical = 2,
    kExitAudit = 3,
};

/// Entry point of the `ksm` tool. args excludes the program name.
/// Subcommands: run, sweep, relax, refine, check.
int cli_main(const std::vector<std::string>& args);

}  // namespace ksm
