#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace eisenhart {

struct CliOverrides {
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
};

// Executes one JSON config end to end and writes artifacts plus
// run_manifest.json into the output directory.  Exit codes:
//   0 all requested checks pass, 1 check failure, 2 config error,
//   3 numerical failure (solver divergence, unexpected blow-up).
int run_config_file(const std::string& path, const CliOverrides& o, std::ostream& log);

// Schema validation only; 0 when the config is well-formed, 2 otherwise.
int validate_config_file(const std::string& path, std::ostream& log);

// Argument parsing for the `eisenhart` binary: run / validate / suite.
int run_cli(int argc, const char* const* argv);

}  // namespace eisenhart
