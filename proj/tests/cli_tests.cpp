#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

fs::path scratch() {
  static const fs::path dir = [] {
    char pattern[] = "/tmp/holdercover-cli-XXXXXX";
    return fs::path(mkdtemp(pattern));
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

Run cli(const std::string& args, const std::string& env = "env -u HOLDERCOVER_SEED") {
  const auto out = scratch() / "stdout", err = scratch() / "stderr";
  const std::string cmd = env + " " + HOLDERCOVER_CLI + " " + args + " >" + out.string() + " 2>" + err.string();
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

}  // namespace

TEST_CASE("usage errors exit 1") {
  CHECK(cli("").code == 1);
  CHECK(cli("boxdim --no-such-flag 1").code == 1);
  CHECK(cli("--format xml boxdim").code == 1);
  auto bad_value = cli("boxdim --depth twelve");
  CHECK(bad_value.code == 1);
  CHECK(bad_value.err.find("--depth") != std::string::npos);
  CHECK(cli("boxdim --set moon:1").code == 1);
  CHECK(cli("percolate --experiment sideways --depth 3").code == 1);
}

TEST_CASE("config files: precedence, comments and line-numbered errors") {
  const auto cfg = scratch() / "boxdim.cfg";
  write(cfg, "# Cantor set\ncommand = boxdim\nset = cantor1d:1/3   # trailing comment\ndepth = 8\nwindow = 2:8\n");
  auto from_file = cli("run " + cfg.string());
  REQUIRE(from_file.code == 0);
  auto report = Json::parse(from_file.out);
  CHECK(report["config"]["depth"] == 8);
  CHECK(report["config"]["window"] == "2:8");

  auto flag_wins = cli("boxdim --config " + cfg.string() + " --depth 6 --window 2:6");
  REQUIRE(flag_wins.code == 0);
  CHECK(Json::parse(flag_wins.out)["config"]["depth"] == 6);

  const auto empty = scratch() / "empty.cfg";
  write(empty, "# nothing\n\n");
  auto e = cli("run " + empty.string());
  CHECK(e.code == 1);
  CHECK(e.err.find(empty.string() + ":2: empty config") != std::string::npos);

  const auto broken = scratch() / "broken.cfg";
  write(broken, "command = boxdim\ndepth = 8\nthis line has no equals sign\n");
  auto b = cli("run " + broken.string());
  CHECK(b.code == 1);
  CHECK(b.err.find(broken.string() + ":3") != std::string::npos);

  const auto unknown = scratch() / "unknown.cfg";
  write(unknown, "command = boxdim\nflavour = 3\n");
  auto u = cli("run " + unknown.string());
  CHECK(u.code == 1);
  CHECK(u.err.find(":2") != std::string::npos);
  CHECK(u.err.find("flavour") != std::string::npos);

  const auto typed = scratch() / "typed.cfg";
  write(typed, "command = boxdim\ndepth = 2.5\n");
  CHECK(cli("run " + typed.string()).code == 1);
  CHECK(cli("run " + (scratch() / "missing.cfg").string()).code == 1);
}

TEST_CASE("boxdim reports the Cantor slope") {
  auto r = cli("boxdim");
  REQUIRE(r.code == 0);
  auto report = Json::parse(r.out);
  CHECK(report["schema"] == 1);
  CHECK(report["command"] == "boxdim");
  CHECK(report["status"] == "ok");
  CHECK(report["result"]["slope"].get<double>() == doctest::Approx(0.6309).epsilon(0.001));
  CHECK(report.items().begin().key() == "schema");
  CHECK(std::prev(report.end()).key() == "timestamp");
  CHECK(r.out.back() == '\n');
}

TEST_CASE("doubling reports the exact block count and the analytic bound") {
  auto r = cli("doubling --L 2 --depth 4");
  REQUIRE(r.code == 0);
  const auto text = r.out;
  CHECK(text.find("\"1313601\"") != std::string::npos);
  CHECK(Json::parse(text)["result"]["analytic_bound"].get<double>() == doctest::Approx(0.1531).epsilon(1e-3));
}

TEST_CASE("seed environment variable overrides the config, replay ignores it") {
  auto r = cli("percolate --experiment coverage --t 0.8 --depth 6 --resolution 5 --seeds 2 --seed 5", "env HOLDERCOVER_SEED=1000");
  REQUIRE(r.code == 0);
  auto report = Json::parse(r.out);
  CHECK(report["config"]["seed"] == 1000);
  const auto saved = scratch() / "seeded.json";
  write(saved, r.out);
  auto again = cli("replay --check " + saved.string(), "env HOLDERCOVER_SEED=7");
  CHECK(again.code == 0);
  CHECK(Json::parse(again.out)["config"]["seed"] == 1000);
  CHECK(cli("percolate --depth 4 --seeds 1", "env HOLDERCOVER_SEED=abc").code == 1);
}

TEST_CASE("replay --check detects a tampered report") {
  const auto path = scratch() / "boxdim.json";
  REQUIRE(cli("--out " + path.string() + " boxdim --depth 8 --window 2:8").code == 0);
  CHECK(cli("replay --check " + path.string()).code == 0);
  CHECK(cli("--jobs 3 replay --check " + path.string()).code == 0);
  std::string text = slurp(path);
  const auto at = text.find("\"slope\": ");
  REQUIRE(at != std::string::npos);
  text.insert(at + 9, "1");
  write(path, text);
  auto tampered = cli("replay --check " + path.string());
  CHECK(tampered.code == 2);
  CHECK(tampered.err.find("differs") != std::string::npos);
  write(path, "{ not json");
  CHECK(cli("replay " + path.string()).code == 1);
}

TEST_CASE("csv reports carry the config and the declared columns") {
  const auto path = scratch() / "box.csv";
  REQUIRE(cli("--format csv --out " + path.string() + " boxdim --depth 6 --window 2:6").code == 0);
  std::istringstream in(slurp(path));
  std::string meta, header, row;
  std::getline(in, meta);
  std::getline(in, header);
  std::getline(in, row);
  REQUIRE(meta.rfind("# ", 0) == 0);
  auto head = Json::parse(meta.substr(2));
  CHECK(head["command"] == "boxdim");
  CHECK(head["config"]["depth"] == 6);
  CHECK(header == "level,count");
  CHECK(row == "2,4");
  CHECK(cli("replay --check " + path.string()).code == 0);
}

TEST_CASE("describe documents every command") {
  auto r = cli("describe");
  CHECK(r.code == 0);
  for (const char* name : {"boxdim", "cover", "percolate", "visibility", "doubling", "netaudit"})
    CHECK(r.out.find(std::string("\n") + name + ":") != std::string::npos);
  auto one = cli("describe doubling");
  CHECK(one.out.find("n1 (integer") != std::string::npos);
  CHECK(one.out.find("percolate:") == std::string::npos);
}

TEST_CASE("jobs never changes a report") {
  auto a = cli("--jobs 1 netaudit --d 2 --epsilon 0.1 --samples 500");
  auto b = cli("--jobs 4 netaudit --d 2 --epsilon 0.1 --samples 500");
  REQUIRE(a.code == 0);
  REQUIRE(b.code == 0);
  auto ja = Json::parse(a.out), jb = Json::parse(b.out);
  ja.erase("timestamp");
  jb.erase("timestamp");
  CHECK(ja == jb);
  CHECK(!ja["config"].contains("jobs"));
}
