#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "doctest.h"
#include "jm/al_miner.hpp"
#include "jm/pm_miner.hpp"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "jm");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = jm::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& f) const { return (path / f).string(); }
};

void write(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

}  // namespace

TEST_CASE("stats") {
  TempDir d("jm_cli_stats");
  write(d / "log.jsonl", "{\"trace\":[\"a\",\"b\"],\"count\":2}\n{\"trace\":[\"a\"]}\n");
  const auto r = run({"stats", "--log", d / "log.jsonl"});
  CHECK(r.code == 0);
  CHECK(r.out.find("size 3") != std::string::npos);
  CHECK(r.out.find("variants 2") != std::string::npos);
}

TEST_CASE("error exit codes") {
  TempDir d("jm_cli_err");
  CHECK(run({"stats", "--log", d / "missing.csv"}).code == 3);
  write(d / "bad.csv", "case,activity\nc1,a\n");
  CHECK(run({"stats", "--log", d / "bad.csv"}).code == 1);
  CHECK(run({"learn", "--log", d / "bad.csv"}).code != 0);  // --out missing
}

TEST_CASE("learn pm-long and al delegate to the miners") {
  TempDir d("jm_cli_learn");
  write(d / "log.jsonl", "{\"trace\":[\"a\",\"b\",\"a\"],\"count\":3}\n{\"trace\":[\"a\",\"c\"],\"count\":2}\n");
  const auto log = jm::read_log_file(d / "log.jsonl", jm::LogFormat::jsonl);

  REQUIRE(run({"learn", "--log", d / "log.jsonl", "--engine", "pm-long", "--out", d / "long"}).code == 0);
  const auto c = jm::pm::long_candidate();
  CHECK(jm::from_model_json(slurp(d / "long/model.json")) == jm::pm::build_dfs(log, c.prefix, c.suffix));
  CHECK(fs::exists(d / "long/model.dot"));
  const auto rec = nlohmann::json::parse(slurp(d / "long/run.json"));
  CHECK(rec["command"] == "learn");
  CHECK(rec["inputs"][0]["sha256"].get<std::string>().size() == 64);

  REQUIRE(run({"learn", "--log", d / "log.jsonl", "--engine", "al", "--alpha", "0.9", "--out", d / "al"}).code == 0);
  CHECK(jm::from_model_json(slurp(d / "al/model.json")) == jm::al::mine_al(log, jm::al::AlSetup::fixed(0.9)).model);
  CHECK(fs::exists(d / "al/chain.json"));
}

TEST_CASE("hybrid decision on a small log with a large alphabet") {
  TempDir d("jm_cli_hybrid");
  std::string text;
  for (int i = 0; i < 10; ++i)
    text += "{\"trace\":[\"e" + std::to_string(2 * i) + "\",\"e" + std::to_string(2 * i + 1) + "\"]}\n";
  write(d / "log.jsonl", text);
  REQUIRE(run({"learn", "--log", d / "log.jsonl", "--out", d / "h"}).code == 0);
  const auto decision = nlohmann::json::parse(slurp(d / "h/decision.json"));
  CHECK(decision["chosen"] == "pm");
}

TEST_CASE("evaluate identical models and determinism") {
  TempDir d("jm_cli_eval");
  write(d / "log.jsonl", "{\"trace\":[\"a\",\"b\",\"a\"],\"count\":3}\n{\"trace\":[\"a\",\"c\"],\"count\":2}\n");
  REQUIRE(run({"learn", "--log", d / "log.jsonl", "--engine", "pm-dfg", "--out", d / "m"}).code == 0);
  REQUIRE(run({"--seed", "3", "evaluate", "--sul", d / "m/model.json", "--model", d / "m/model.json", "--out", d / "e1"}).code == 0);
  REQUIRE(run({"--seed", "3", "evaluate", "--sul", d / "m/model.json", "--model", d / "m/model.json", "--out", d / "e2"}).code == 0);
  const auto report = nlohmann::json::parse(slurp(d / "e1/report.json"));
  CHECK(report["f_measure"] == 1.0);
  CHECK(slurp(d / "e1/report.json") == slurp(d / "e2/report.json"));
}

TEST_CASE("export is deterministic") {
  TempDir d("jm_cli_export");
  write(d / "log.jsonl", "{\"trace\":[\"a\",\"b\"]}\n");
  REQUIRE(run({"learn", "--log", d / "log.jsonl", "--engine", "pm-dfg", "--out", d / "m"}).code == 0);
  const auto a = run({"export", "--model", d / "m/model.json", "--dot"});
  const auto b = run({"export", "--model", d / "m/model.json", "--dot"});
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.find("digraph") != std::string::npos);
}

TEST_CASE("config file and environment seed") {
  TempDir d("jm_cli_config");
  write(d / "log.jsonl", "{\"trace\":[\"a\",\"b\"]}\n{\"trace\":[\"a\"]}\n");
  write(d / "cfg.json", "{\"seed\": 5, \"learn\": {\"engine\": \"al\", \"alpha\": \"0.9\"}}");
  REQUIRE(run({"--config", d / "cfg.json", "learn", "--log", d / "log.jsonl", "--out", d / "o"}).code == 0);
  const auto rec = nlohmann::json::parse(slurp(d / "o/run.json"));
  CHECK(rec["seed"] == 5);
  CHECK(fs::exists(d / "o/chain.json"));
}

TEST_CASE("benchmark desk manifest") {
  TempDir d("jm_cli_bench");
  REQUIRE(run({"benchmark", "--desk", "--out", d / "b"}).code == 0);
  const auto manifest = nlohmann::json::parse(slurp(d / "b/manifest.json"));
  CHECK(manifest["total_logs"] == 84);
  CHECK(manifest["entries"].size() == 14);
}
