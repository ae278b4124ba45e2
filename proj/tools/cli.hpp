#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "json.hpp"

namespace ringqubit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;

struct Flags {
  std::optional<std::string> output;  // overrides output_dir from the config
  bool validate_only = false;
  bool quiet = false;
};

// Validates the config, runs the subcommand, writes artifacts plus manifest.json.
// Errors go to `err` as one JSON object; the return value is the exit status.
int run(const nlohmann::json& config, const Flags& flags, std::ostream& out, std::ostream& err);

// Command-line front end: ringqubit [subcommand] --config FILE [--output DIR]
// [--validate-only] [--quiet]. A positional subcommand must agree with the config.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ringqubit::cli
