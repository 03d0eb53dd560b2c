#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "config.hpp"

namespace plshoot::cli {

/// Receives each artifact (file name, content) as soon as it is complete.
using Sink = std::function<void(const std::string& name, const std::string& content)>;

const std::vector<std::string>& subcommands();

/// Checks the configuration against the subcommand's needs; ConfigError on failure.
void validate(const std::string& command, const RunConfig& cfg);

/// Runs one subcommand, handing artifacts to sink. Returns a one-line summary.
std::string execute(const std::string& command, const RunConfig& cfg, const Sink& sink);

/// Process exit codes.
enum ExitCode : int { kOk = 0, kValidation = 2, kNumerical = 3, kSearch = 4 };

/// Full command-line entry: parsing, dispatch, artifact files and manifest.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace plshoot::cli
