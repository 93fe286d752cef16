#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace promptshield::cli {

// Runtime configuration shared by the CLI commands. Loadable from a flat
// key=value file; command-line flags override file values.
struct AppConfig {
  std::string upstream_base_url;
  std::string upstream_model_name;
  std::string template_id = "p4";
  std::string ledger_path;
  double theta = 0.11;
  double gamma = 0.0;
  double alpha = 0.05;
  int rarity_threshold = 5;
  std::optional<std::uint64_t> seed;

  // Throws Error when values are out of range (alpha outside (0,1),
  // rarity_threshold < 1).
  void validate() const;
};

// Parses `key = value` lines; '#' starts a comment, blank lines are skipped.
// Unknown keys are an error.
AppConfig load_config(const std::filesystem::path& path);

// Applies file values onto an existing config (used before flag overrides).
void apply_config_file(AppConfig& config, const std::filesystem::path& path);

}  // namespace promptshield::cli
