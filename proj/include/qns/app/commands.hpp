#pragma once

// CLI front end: config resolution, output files and manifests, exit codes.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "qns/app/experiments.hpp"

namespace qns::app {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;

struct Invocation {
  std::string command;
  std::optional<std::string> preset;
  std::optional<std::filesystem::path> config;
  std::optional<std::uint64_t> seed;
  std::filesystem::path out = "qns_out";
  std::optional<std::filesystem::path> dataset;  // reconstruct only
};

/// Preset, then the config file merged over it (RFC 7386 merge patch), then
/// --seed. The seed defaults to 1.
Json resolve_config(const Invocation& inv);

/// Runs one subcommand and writes its files plus manifest.json under inv.out.
/// Throws qns::Error; see exit_code().
void execute(const Invocation& inv);

/// Loads a dataset written by `simulate` (manifest.json + tomography.tsv).
Dataset load_dataset(const std::filesystem::path& dir);

/// Parses argv, runs, and maps failures to exit codes 2 (validation) or 3
/// (numerical). Messages go to stderr.
int run_cli(int argc, char** argv);

}  // namespace qns::app
