#include "commands.hpp"
#include "config.hpp"

#include "holdercover/errors.hpp"
#include "holdercover/exec.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

using namespace holdercover;
using namespace holdercover::cli;

namespace {

constexpr int kSchema = 1;

struct Output {
  std::string path;  // empty: stdout
  std::string format = "json";
};

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

const char* type_name(ValueType t) {
  switch (t) {
    case ValueType::integer: return "integer";
    case ValueType::real: return "real";
    case ValueType::text: return "text";
  }
  return "?";
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) out += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return out + "\"";
}

std::string render(const CommandSpec& spec, const Json& config, const Outcome& outcome, const std::string& format) {
  Json report;
  report["schema"] = kSchema;
  report["command"] = spec.name;
  report["config"] = config;
  if (format == "csv") {
    report["status"] = outcome.certificate_failed ? "certificate_failed" : "ok";
    report["timestamp"] = utc_timestamp();
    std::ostringstream out;
    out << "# " << report.dump() << "\n";
    for (std::size_t i = 0; i < spec.csv_columns.size(); ++i) out << (i ? "," : "") << spec.csv_columns[i];
    out << "\n";
    for (const auto& row : outcome.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_field(row[i]);
      out << "\n";
    }
    return out.str();
  }
  report["result"] = outcome.result;
  report["status"] = outcome.certificate_failed ? "certificate_failed" : "ok";
  if (outcome.certificate_failed) report["failure"] = outcome.failure;
  report["timestamp"] = utc_timestamp();
  return report.dump(2) + "\n";
}

void emit(const std::string& text, const Output& out) {
  if (out.path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream file(out.path, std::ios::binary);
  if (!file) throw ConfigError(out.path + ": cannot write report");
  file << text;
}

int execute(const CommandSpec& spec, const Json& config, const Output& out) {
  const Outcome outcome = run_command(spec.name, config);
  emit(render(spec, config, outcome, out.format), out);
  if (outcome.certificate_failed) {
    std::cerr << "certificate failure: " << outcome.failure << "\n";
    return 2;
  }
  return 0;
}

std::optional<std::string> seed_from_environment() {
  if (const char* s = std::getenv("HOLDERCOVER_SEED"); s && *s) return std::string(s);
  return std::nullopt;
}

void describe(std::ostream& os, const std::string& only) {
  os << "report schema " << kSchema
     << ": JSON object {schema, command, config, result, status, [failure], timestamp}.\n"
        "CSV reports start with one '# {schema, command, config, status, timestamp}' line.\n"
        "Config files hold 'key = value' lines; '#' starts a comment; 'command = NAME' selects the\n"
        "command for 'run'. HOLDERCOVER_SEED overrides the seed key. Exit status: 0 ok, 1 usage or\n"
        "config error, 2 certificate failure.\n";
  for (const auto& spec : command_specs()) {
    if (!only.empty() && spec.name != only) continue;
    os << "\n" << spec.name << ": " << spec.summary << "\n  csv columns:";
    for (const auto& c : spec.csv_columns) os << " " << c;
    os << "\n";
    for (const auto& k : spec.keys)
      os << "  " << k.name << " (" << type_name(k.type) << ", default '" << k.fallback << "'): " << k.help << "\n";
  }
}

// Blanks the timestamp value so two renderings of one run compare equal.
std::string without_timestamp(std::string text) {
  const auto key = text.rfind("\"timestamp\"");
  if (key == std::string::npos) return text;
  const auto open = text.find('"', text.find(':', key));
  const auto close = text.find('"', open + 1);
  if (open == std::string::npos || close == std::string::npos) return text;
  return text.erase(open + 1, close - open - 1);
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ": cannot open");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-scale Hölder graph cover, percolation, visibility and doubling experiments"};
  app.require_subcommand(1);
  Output out;
  int jobs = 0;
  app.add_option("--out", out.path, "report path (default stdout)");
  app.add_option("--format", out.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--jobs", jobs, "worker threads (results never depend on it)")->check(CLI::NonNegativeNumber);

  std::map<std::string, std::map<std::string, std::string>> flag_values;
  std::map<std::string, std::string> config_paths;
  std::map<std::string, CLI::App*> subs;
  for (const auto& spec : command_specs()) {
    auto* sub = app.add_subcommand(spec.name, spec.summary);
    sub->fallthrough();
    sub->add_option("--config", config_paths[spec.name], "key = value config file");
    for (const auto& key : spec.keys)
      sub->add_option("--" + key.name, flag_values[spec.name][key.name], key.help);
    subs[spec.name] = sub;
  }
  std::string run_path;
  auto* run = app.add_subcommand("run", "run the command named in a config file");
  run->fallthrough();
  run->add_option("config", run_path, "config file")->required();
  std::string replay_path;
  bool check = false;
  auto* replay = app.add_subcommand("replay", "re-run a JSON or CSV report from its embedded config");
  replay->fallthrough();
  replay->add_option("report", replay_path, "JSON report")->required();
  replay->add_flag("--check", check, "exit 2 unless the new report matches byte for byte, timestamp aside");
  std::string describe_only;
  auto* desc = app.add_subcommand("describe", "document config keys and CSV columns");
  desc->add_option("command", describe_only, "limit to one command");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }
  set_worker_count(jobs);

  try {
    if (desc->parsed()) {
      describe(std::cout, describe_only);
      return 0;
    }
    if (run->parsed()) {
      RawConfig raw = read_config_file(run_path);
      if (!raw.command) throw ConfigError(run_path + ": missing 'command = NAME'");
      const CommandSpec* spec = find_command(raw.command->value);
      if (!spec) throw ConfigError(raw.command->origin + ": unknown command '" + raw.command->value + "'");
      return execute(*spec, resolve(*spec, raw, seed_from_environment()), out);
    }
    if (replay->parsed()) {
      const std::string original = read_text(replay_path);
      const bool csv = original.rfind("# ", 0) == 0;
      const Json report = Json::parse(csv ? original.substr(2, original.find('\n') - 2) : original);
      if (report.value("schema", 0) != kSchema) throw ConfigError(replay_path + ": unsupported report schema");
      const CommandSpec* spec = find_command(report.at("command").get<std::string>());
      if (!spec) throw ConfigError(replay_path + ": unknown command in report");
      const Json config = resolve(*spec, from_json(report.at("config")), std::nullopt);
      const Outcome outcome = run_command(spec->name, config);
      const std::string fresh = render(*spec, config, outcome, csv ? "csv" : "json");
      emit(fresh, out);
      if (check && without_timestamp(fresh) != without_timestamp(original)) {
        std::cerr << "replay differs from " << replay_path << "\n";
        return 2;
      }
      return outcome.certificate_failed ? 2 : 0;
    }
    for (const auto& spec : command_specs()) {
      if (!subs[spec.name]->parsed()) continue;
      RawConfig raw;
      if (!config_paths[spec.name].empty()) raw = read_config_file(config_paths[spec.name]);
      for (const auto& key : spec.keys) {
        auto* opt = subs[spec.name]->get_option("--" + key.name);
        if (opt->count() > 0) raw.values[key.name] = Assignment{flag_values[spec.name][key.name], "--" + key.name};
      }
      return execute(spec, resolve(spec, raw, seed_from_environment()), out);
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const Json::exception& e) {
    std::cerr << "error: malformed report: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
