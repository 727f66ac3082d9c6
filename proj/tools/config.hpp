#pragma once

#include <json.hpp>

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace holdercover::cli {

using Json = nlohmann::ordered_json;

enum class ValueType { integer, real, text };

struct KeySpec {
  std::string name;
  ValueType type = ValueType::text;
  std::string fallback;  // default, in the config-file spelling
  std::string help;
};

struct CommandSpec {
  std::string name;
  std::string summary;
  std::vector<KeySpec> keys;
  std::vector<std::string> csv_columns;
};

const std::vector<CommandSpec>& command_specs();
const CommandSpec* find_command(const std::string& name);

/// Configuration or usage problem; becomes exit status 1.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One raw assignment and where it came from ("file:line" or "--flag").
struct Assignment {
  std::string value;
  std::string origin;
};

struct RawConfig {
  std::optional<Assignment> command;
  std::map<std::string, Assignment> values;
};

/// Parses "key = value" lines; '#' starts a comment. Errors carry file:line.
RawConfig parse_config_text(const std::string& text, const std::string& source);
RawConfig read_config_file(const std::string& path);

/// Defaults, then `raw`, then the seed override; every value type-checked.
/// Returns the resolved config in schema key order.
Json resolve(const CommandSpec& spec, const RawConfig& raw, std::optional<std::string> seed_override);

/// Raw assignments from an embedded report config (for replay).
RawConfig from_json(const Json& config);

}  // namespace holdercover::cli
