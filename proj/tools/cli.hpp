#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace minkproj::cli {

enum ExitCode : int {
    ok = 0,
    failure = 1,      ///< other library errors
    usage = 2,        ///< bad flags
    invalid_spec = 3, ///< config or constraint validation
    io_error = 4,
    solver_error = 5,
};

/// Entry point of the `minkproj` tool. Subcommands: project, project-datafit,
/// solve-spg, video-decompose, sample, check, generate.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace minkproj::cli
