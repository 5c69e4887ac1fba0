#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "cli/config.hpp"

namespace memlb::cli {

struct CommandResult {
  bool passed = true;
  std::vector<std::filesystem::path> artifacts;
  std::string summary;
};

CommandResult cmd_gen(Json cfg, const Options& opts);
CommandResult cmd_run(Json cfg, const Options& opts);
CommandResult cmd_game(Json cfg, const Options& opts);
CommandResult cmd_verify(Json cfg, const Options& opts);
CommandResult cmd_encode(Json cfg, const Options& opts);
CommandResult cmd_frontier(Json cfg, const Options& opts);

/// Runs a command by name. Exit code 0 when every configured threshold
/// passes, 1 when a threshold fails, 2 on any error (message on stderr).
int dispatch(const std::string& command, const Options& opts);

}  // namespace memlb::cli
