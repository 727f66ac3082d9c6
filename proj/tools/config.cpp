#include "config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace holdercover::cli {
namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

Json typed_value(const KeySpec& key, const Assignment& a) {
  const std::string& v = a.value;
  const std::string where = a.origin + ": " + key.name + ": ";
  switch (key.type) {
    case ValueType::integer: {
      long long out = 0;
      auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
      if (v.empty() || ec != std::errc() || ptr != v.data() + v.size())
        throw ConfigError(where + "'" + v + "' is not an integer");
      return out;
    }
    case ValueType::real: {
      char* end = nullptr;
      const double out = std::strtod(v.c_str(), &end);
      if (v.empty() || end != v.c_str() + v.size() || !std::isfinite(out))
        throw ConfigError(where + "'" + v + "' is not a finite number");
      return out;
    }
    case ValueType::text:
      return v;
  }
  return nullptr;
}

}  // namespace

const std::vector<CommandSpec>& command_specs() {
  using enum ValueType;
  static const std::vector<CommandSpec> specs = {
      {"boxdim",
       "box-counting slope of a standard set",
       {{"set", text, "cantor1d:1/3", "set spec: cantor1d:r, corner_dust:d:r, dense_direction:d:J, grid:d:n"},
        {"depth", integer, "12", "construction depth of the set"},
        {"window", text, "4:12", "fit window first:last"}},
       {"level", "count"}},
      {"cover",
       "Hölder graph cover pipeline: pair families, exceptional directions, certificates",
       {{"set", text, "corner_dust:2:1/32", "set spec"},
        {"depth", integer, "3", "construction depth of the set"},
        {"k", integer, "1", "plane dimension"},
        {"t", real, "0.45", "dimension bound t"},
        {"w", real, "0.95", "content exponent w"},
        {"n0", integer, "4", "first level"},
        {"nmax", integer, "9", "last level"},
        {"mesh", real, "0.01", "Grassmannian net mesh"},
        {"window", text, "", "box-count window first:last (empty: n0:nmax)"},
        {"directions", integer, "20", "random unflagged planes to certify"},
        {"seed", integer, "1", "seed for the net and the plane draws"}},
       {"level", "pairs", "cells", "content", "tail_content"}},
      {"percolate",
       "fractal percolation experiments",
       {{"d", integer, "2", "ambient dimension"},
        {"t", real, "0.4", "target dimension, p = 2^(t-d)"},
        {"depth", integer, "11", "tree depth"},
        {"experiment", text, "slope", "slope | coverage | calibration"},
        {"seeds", integer, "20", "surviving seeds wanted (consecutive seeds for calibration)"},
        {"seed", integer, "1", "first seed"},
        {"window", text, "7:11", "slope resolutions first:last"},
        {"resolution", integer, "8", "coverage resolution m"},
        {"threshold", real, "0.99", "coverage threshold"},
        {"max_attempts", integer, "1000000", "seed budget for survivor rejection"}},
       {"seed", "level", "count"}},
      {"visibility",
       "tube exceptional viewpoints and polar graph covers",
       {{"set", text, "corner_dust:2:1/32", "set spec"},
        {"depth", integer, "3", "construction depth of the set"},
        {"t", real, "0.45", "dimension bound t"},
        {"w", real, "0.95", "content exponent w"},
        {"n0", integer, "4", "first level"},
        {"nmax", integer, "8", "last level"},
        {"S", real, "2", "viewpoint ball radius"},
        {"mesh", real, "0.01", "viewpoint grid mesh"},
        {"viewpoints", integer, "50", "random viewpoints to test"},
        {"seed", integer, "1", "seed for viewpoint draws"}},
       {"level", "tubes", "cells", "content"}},
      {"doubling",
       "thin digit set counts, mu(K) bound and doubling estimate",
       {{"n1", integer, "100", "first block length"},
        {"delta", text, "1/100", "digit weight delta (exact)"},
        {"L", integer, "5", "number of blocks"},
        {"dim", integer, "1", "product dimension"},
        {"depth", integer, "8", "doubling search depth (0 skips it)"}},
       {"blocks", "level", "count", "exponent"}},
      {"netaudit",
       "build and audit a Grassmannian net",
       {{"d", integer, "3", "ambient dimension"},
        {"k", integer, "1", "plane dimension"},
        {"epsilon", real, "0.1", "mesh"},
        {"samples", integer, "10000", "fresh audit planes"},
        {"seed", integer, "1", "seed"}},
       {"cells", "net_constant", "max_distance", "passed"}},
  };
  return specs;
}

const CommandSpec* find_command(const std::string& name) {
  for (const auto& s : command_specs())
    if (s.name == name) return &s;
  return nullptr;
}

RawConfig parse_config_text(const std::string& text, const std::string& source) {
  RawConfig raw;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  bool any = false;
  while (std::getline(in, line)) {
    ++number;
    const std::string origin = source + ":" + std::to_string(number);
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(origin + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(origin + ": missing key");
    any = true;
    if (key == "command") {
      if (raw.command) throw ConfigError(origin + ": duplicate key 'command'");
      raw.command = Assignment{value, origin};
      continue;
    }
    if (raw.values.count(key)) throw ConfigError(origin + ": duplicate key '" + key + "'");
    raw.values[key] = Assignment{value, origin};
  }
  if (!any) throw ConfigError(source + ":" + std::to_string(std::max(number, 1)) + ": empty config");
  return raw;
}

RawConfig read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

Json resolve(const CommandSpec& spec, const RawConfig& raw, std::optional<std::string> seed_override) {
  if (raw.command && raw.command->value != spec.name)
    throw ConfigError(raw.command->origin + ": command '" + raw.command->value + "' does not match '" +
                      spec.name + "'");
  for (const auto& [key, a] : raw.values) {
    bool known = false;
    for (const auto& k : spec.keys) known = known || k.name == key;
    if (!known) throw ConfigError(a.origin + ": unknown key '" + key + "' for " + spec.name);
  }
  Json out = Json::object();
  for (const auto& key : spec.keys) {
    Assignment a{key.fallback, "default"};
    if (auto it = raw.values.find(key.name); it != raw.values.end()) a = it->second;
    if (key.name == "seed" && seed_override) a = Assignment{*seed_override, "HOLDERCOVER_SEED"};
    out[key.name] = typed_value(key, a);
  }
  return out;
}

RawConfig from_json(const Json& config) {
  if (!config.is_object()) throw ConfigError("report: config is not an object");
  RawConfig raw;
  for (const auto& [key, value] : config.items()) {
    std::string text;
    if (value.is_string()) {
      text = value.get<std::string>();
    } else if (value.is_number_integer()) {
      text = std::to_string(value.get<long long>());
    } else if (value.is_number_float()) {
      // Shortest round-trip spelling, same as the report.
      text = value.dump();
    } else {
      throw ConfigError("report: config key '" + key + "' has an unsupported type");
    }
    raw.values[key] = Assignment{text, "report config"};
  }
  return raw;
}

}  // namespace holdercover::cli
