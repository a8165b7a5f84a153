#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace gapbound {

// Contents of a `key = value` run file. Keys are flag names without the
// leading dashes; the reserved key `command` names the subcommand.
struct RunConfig {
  std::string command;
  std::vector<std::pair<std::string, std::string>> entries;

  // Blank lines and `#` comments are dropped; a repeated key keeps its first
  // position and its last value.
  static RunConfig parse(std::string_view text);
  std::string serialize() const;

  bool operator==(const RunConfig&) const = default;
};

// Exit codes: 0 ok, 1 verification failed, 2 bad flags or input,
// 3 numerical failure, 4 output path not writable.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gapbound
