#ifndef EFK_CLI_HPP
#define EFK_CLI_HPP

#include <string>
#include <vector>

#include "efk/config.hpp"

namespace efk {

// Exit code contract (scriptable acceptance gates).
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitSolverFailure = 2;
inline constexpr int kExitSeparationNotFound = 3;
inline constexpr int kExitTubeExit = 4;
inline constexpr int kExitUsage = 64;
inline constexpr int kExitFormat = 65;
inline constexpr int kExitNoInput = 66;

int cmd_hetero(const RunConfig& cfg);
int cmd_separation(const RunConfig& cfg);
int cmd_doublelayer(const RunConfig& cfg);
int cmd_verify(const RunConfig& cfg, const std::vector<std::string>& paths);
int cmd_report(const RunConfig& cfg, const std::vector<std::string>& paths);

// Full dispatch: efkl <command> [--config file] [--key value]... [paths...]
int run_cli(const std::vector<std::string>& args);

std::string usage_text();

}  // namespace efk

#endif  // EFK_CLI_HPP
