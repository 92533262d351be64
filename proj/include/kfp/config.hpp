#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "kfp/solvers.hpp"

namespace kfp {

/// A configuration problem tied to one key (flag name without dashes).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error(key + ": " + message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

enum class CommandKind { run, convergence, compare, norms, kernel_check, poincare_check, nested_domains };

const char* to_string(CommandKind kind);

struct Command {
  CommandKind kind = CommandKind::run;
  std::vector<double> levels{1.0, 0.5, 0.25, 0.125};
  int trials = 1000;
  std::vector<double> t_grid;   // empty: 0, 0.25, ..., 5
  std::vector<double> scales{4.0, 6.0, 8.0, 10.0};
};

struct Invocation {
  RunConfig config;
  Command command;
  /// Set when --help was requested; holds the usage text.
  std::optional<std::string> help;
};

/// Apply one `key = value` setting. Throws ConfigError naming the key.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);

/// Parse a flat config file: `key = value` lines, `#` comments.
void apply_config_text(RunConfig& config, const std::string& text);
RunConfig read_config_file(const std::filesystem::path& path, RunConfig base = {});

/// Config file text that reparses to an identical RunConfig.
std::string serialize_config(const RunConfig& config);

/// Command line → configuration and command. Values from --config are applied
/// first; explicit flags override them. The result is validated.
Invocation parse_config(int argc, const char* const* argv);

std::vector<double> parse_real_list(const std::string& key, const std::string& text);

}  // namespace kfp
