#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace rdmatch::cli {

enum ExitCode : int {
  kOk = 0,
  kUnexpected = 1,
  kInputError = 2,
  kNumericError = 3,
  kBootstrapError = 4,
};

/// Runs the command line with `args` (args[0] is the program name). JSON goes
/// to `out`, one-line diagnostics to `err`. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Lowercase hex SHA-256 of a file's bytes.
std::string file_digest(const std::filesystem::path& path);

}  // namespace rdmatch::cli
