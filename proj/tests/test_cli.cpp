#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "graphnav/cli.hpp"

using namespace graphnav;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::path("cli_test_tmp") / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all("cli_test_tmp"); }
  std::string str(const std::string& sub) const { return (path / sub).string(); }
};

}  // namespace

TEST_CASE("cli: usage errors exit 1, missing data exits 2") {
  CHECK(run_command({"no-such-command"}) == kExitUsage);
  CHECK(run_command({}) == kExitUsage);
  CHECK(run_command({"gen-world", "--kind", "pentagon"}) == kExitData);
  CHECK(run_command({"collect", "--world", "/nonexistent/dir"}) == kExitData);
  CHECK(run_command({"eval", "--world", "/nonexistent/dir"}) == kExitData);
}

TEST_CASE("cli: gen-world artifacts are reproducible byte for byte") {
  TempDir tmp("genworld");
  CHECK(run_command({"gen-world", "--kind", "tee", "--seed", "9", "--out", tmp.str("a")}) ==
        kExitOk);
  CHECK(run_command({"gen-world", "--kind", "tee", "--seed", "9", "--out", tmp.str("b")}) ==
        kExitOk);
  CHECK(slurp(tmp.path / "a/world.json") == slurp(tmp.path / "b/world.json"));
  CHECK(slurp(tmp.path / "a/map.json") == slurp(tmp.path / "b/map.json"));
  CHECK(slurp(tmp.path / "a/manifest.json") == slurp(tmp.path / "b/manifest.json"));

  CHECK(run_command({"gen-world", "--kind", "tee", "--seed", "10", "--out", tmp.str("c")}) ==
        kExitOk);
  CHECK(slurp(tmp.path / "a/world.json") != slurp(tmp.path / "c/world.json"));
}

TEST_CASE("cli: config file supplies defaults, flags win") {
  TempDir tmp("config");
  {
    std::ofstream cfg(tmp.path / "cfg.json");
    cfg << R"({"kind": "loop", "seed": 21})";
  }
  CHECK(run_command({"gen-world", "--config", tmp.str("cfg.json"), "--out", tmp.str("a")}) ==
        kExitOk);
  CHECK(run_command({"gen-world", "--kind", "loop", "--seed", "21", "--out", tmp.str("b")}) ==
        kExitOk);
  CHECK(slurp(tmp.path / "a/world.json") == slurp(tmp.path / "b/world.json"));

  // Explicit flag overrides the config value.
  CHECK(run_command({"gen-world", "--config", tmp.str("cfg.json"), "--seed", "22", "--out",
                     tmp.str("c")}) == kExitOk);
  CHECK(slurp(tmp.path / "a/world.json") != slurp(tmp.path / "c/world.json"));
}

TEST_CASE("cli: the pipeline runs end to end and strict-repro is bit-stable") {
  TempDir tmp("pipeline");
  CHECK(run_command({"gen-world", "--kind", "corridor", "--seed", "7", "--out",
                     tmp.str("world")}) == kExitOk);

  auto pipeline = [&](const std::string& tag) {
    CHECK(run_command({"collect", "--world", tmp.str("world"), "--tasks", "5", "--seed", "3",
                       "--strict-repro", "--out", tmp.str(tag + "/data")}) == kExitOk);
    CHECK(run_command({"train-gln", "--data", tmp.str(tag + "/data"), "--epochs", "1",
                       "--dim", "12", "--seed", "3", "--strict-repro", "--out",
                       tmp.str(tag + "/gln.json")}) == kExitOk);
    CHECK(run_command({"train-behaviors", "--data", tmp.str(tag + "/data"), "--behavior",
                       "cf,fd", "--epochs", "1", "--seed", "3", "--strict-repro", "--out",
                       tmp.str(tag + "/policies")}) == kExitOk);
    CHECK(run_command({"eval", "--world", tmp.str("world"), "--tasks", "3", "--variant",
                       "gtl", "--policies", "oracle", "--seed", "5", "--strict-repro",
                       "--out", tmp.str(tag + "/eval")}) == kExitOk);
    CHECK(run_command({"report", "--world", tmp.str("world"), "--runs",
                       tmp.str(tag + "/eval/runs.jsonl"), "--out",
                       tmp.str(tag + "/report")}) == kExitOk);
  };
  pipeline("run1");
  pipeline("run2");

  // Manifest-tracked artifacts are byte-identical across the two runs.
  for (const std::string& rel :
       {std::string("data/dataset.json"), std::string("data/trajectories/0000.jsonl"),
        std::string("data/manifest.json"), std::string("gln.json"),
        std::string("policies/behavior_cf.json"), std::string("eval/runs.jsonl"),
        std::string("eval/report.json"), std::string("eval/manifest.json"),
        std::string("report/report.txt")}) {
    CHECK(slurp(tmp.path / ("run1/" + rel)) == slurp(tmp.path / ("run2/" + rel)));
  }

  // The eval report exists and carries the expected row.
  std::string table = slurp(tmp.path / "run1/eval/report.txt");
  CHECK(table.find("gtl+oracle") != std::string::npos);

  // Learned-policy eval consumes the trained checkpoints.
  CHECK(run_command({"eval", "--world", tmp.str("world"), "--tasks", "2", "--variant",
                     "graphnav", "--policies", "oracle", "--gln", tmp.str("run1/gln.json"),
                     "--seed", "5", "--out", tmp.str("run1/eval2")}) == kExitOk);

  // Missing checkpoint for a learned variant is a data error.
  CHECK(run_command({"eval", "--world", tmp.str("world"), "--tasks", "2", "--variant",
                     "graphnav", "--policies", "oracle", "--seed", "5", "--out",
                     tmp.str("run1/eval3")}) == kExitData);
}
