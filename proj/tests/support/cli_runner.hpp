#ifndef SMOKEKIT_TESTS_CLI_RUNNER_HPP
#define SMOKEKIT_TESTS_CLI_RUNNER_HPP

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#ifndef SMOKEKIT_CLI_PATH
#error "SMOKEKIT_CLI_PATH must point at the smokekit executable"
#endif

namespace testutil {

struct CliResult {
  int exit_code = -1;
  std::string output; ///< stdout and stderr interleaved
};

/// Runs `smokekit <args>` through the shell, capturing both streams.
inline CliResult run_cli(const std::string &args, const std::string &env = "") {
  static int counter = 0;
  const auto log = std::filesystem::temp_directory_path() /
                   ("smokekit_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++) + ".log");
  const std::string cmd = env + (env.empty() ? "" : " ") + "\"" + SMOKEKIT_CLI_PATH + "\" " + args + " > \"" +
                          log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  CliResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(log);
  std::ostringstream ss;
  ss << in.rdbuf();
  r.output = ss.str();
  std::filesystem::remove(log);
  return r;
}

inline std::string quoted(const std::filesystem::path &p) { return "\"" + p.string() + "\""; }

inline std::string slurp(const std::filesystem::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

} // namespace testutil

#endif // SMOKEKIT_TESTS_CLI_RUNNER_HPP
