#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kRoot = fs::path(GREEDYMASS_WORK_DIR) / "unit_cli";

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path put_config(const std::string& name, const json& j) {
  fs::create_directories(kRoot);
  const fs::path p = kRoot / (name + ".json");
  std::ofstream(p) << j.dump(1);
  return p;
}

int run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + "\"" + GREEDYMASS_CLI_PATH + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string out_dir(const std::string& name) {
  const fs::path p = kRoot / name;
  fs::remove_all(p);
  return p.string();
}

json lln_config() {
  return {{"experiment", "estimate"},
          {"seed", 77},
          {"process", {{"kind", "poisson"}, {"dim", 2}, {"lambda", 1.0}, {"marks", {{"kind", "constant"}, {"c", 1.0}}}}},
          {"task", {{"kind", "lln"}, {"mode", "path"}, {"norm", 2}, {"ell_grid", {1.0, 2.0, 3.0}}, {"replicas", 60}}}};
}

}  // namespace

TEST_CASE("verify on an empty environment passes vacuously") {
  const json cfg = {{"experiment", "verify"},
                    {"seed", 1},
                    {"process", {{"kind", "empty"}, {"dim", 2}}},
                    {"task", {{"checks", {{{"kind", "suite"}, {"family", "poisson"}, {"instances", 20}}}}}}};
  const auto out = out_dir("empty");
  CHECK(run("verify --config " + put_config("empty", cfg).string() + " --out " + out) == 0);
  const json report = json::parse(slurp(fs::path(out) / "report.json"));
  CHECK(report["pass"] == true);
  CHECK(fs::exists(fs::path(out) / "manifest.json"));
  CHECK(fs::exists(fs::path(out) / "tables" / "checks.csv"));
}

TEST_CASE("estimate lln writes a table with l, mean and interval columns") {
  const auto out = out_dir("lln");
  REQUIRE(run("estimate --config " + put_config("lln", lln_config()).string() + " --out " + out) == 0);
  const std::string csv = slurp(fs::path(out) / "tables" / "lln.csv");
  std::istringstream lines(csv);
  std::string header;
  std::getline(lines, header);
  CHECK(header.rfind("ell,mean,ci_half_width", 0) == 0);
  int rows = 0;
  for (std::string line; std::getline(lines, line);) ++rows;
  CHECK(rows == 3);
  CHECK(fs::exists(fs::path(out) / "plots" / "lln.svg"));
  const json report = json::parse(slurp(fs::path(out) / "report.json"));
  CHECK(report["seed"] == 77);
  CHECK(report["lln"]["grid"].size() == 3);
}

TEST_CASE("schema errors exit with 2") {
  json cfg = lln_config();
  cfg.erase("seed");
  CHECK(run("estimate --config " + put_config("noseed", cfg).string() + " --out " + out_dir("noseed")) == 2);
  // a seed on the command line fills the gap
  CHECK(run("estimate --config " + put_config("noseed", cfg).string() + " --seed 5 --out " + out_dir("noseed")) == 0);

  cfg = lln_config();
  cfg["task"]["colour"] = "blue";
  CHECK(run("estimate --config " + put_config("unknown", cfg).string() + " --out " + out_dir("unknown")) == 2);

  cfg = lln_config();
  cfg["task"]["replicas"] = 10;
  CHECK(run("estimate --config " + put_config("few", cfg).string() + " --out " + out_dir("few")) == 2);

  cfg = lln_config();
  CHECK(run("verify --config " + put_config("mismatch", cfg).string() + " --out " + out_dir("mismatch")) == 2);
  CHECK(run("estimate --config " + (kRoot / "absent.json").string()) == 2);
  CHECK(run("estimate --config " + put_config("jobs", lln_config()).string() + " --out " + out_dir("jobs"),
            "GREEDYMASS_JOBS=zero") == 2);
}

TEST_CASE("unproven solves under require_proof exit with 3") {
  const json cfg = {{"experiment", "solve"},
                    {"seed", 3},
                    {"node_budget", 5},
                    {"require_proof", true},
                    {"process", {{"kind", "poisson"}, {"dim", 2}, {"lambda", 2.0}}},
                    {"task", {{"sample", {{"reach", 3.0}}}, {"query", {{"family", "path"}, {"ell", 3.0}}}}}};
  CHECK(run("solve --config " + put_config("budget", cfg).string() + " --out " + out_dir("budget")) == 3);
  json relaxed = cfg;
  relaxed["require_proof"] = false;
  CHECK(run("solve --config " + put_config("budget_relaxed", relaxed).string() + " --out " + out_dir("budget_relaxed")) == 0);
}

TEST_CASE("replay") {
  const auto out = out_dir("replay_src");
  REQUIRE(run("estimate --config " + put_config("replay", lln_config()).string() + " --jobs 1 --out " + out) == 0);
  const std::string manifest = (fs::path(out) / "manifest.json").string();
  CHECK(run("replay " + manifest + " --out " + out_dir("replay_same")) == 0);
  CHECK(slurp(fs::path(out) / "report.json") == slurp(kRoot / "replay_same" / "report.json"));
  CHECK(run("replay " + manifest + " --jobs 8 --out " + out_dir("replay_jobs")) == 0);
  CHECK(run("replay " + manifest + " --seed 78 --out " + out_dir("replay_seed")) == 1);
  CHECK(run("replay " + (kRoot / "nowhere" / "manifest.json").string()) == 2);
}

TEST_CASE("thread count does not change artifacts") {
  const auto a = out_dir("jobs1");
  const auto b = out_dir("jobs8");
  const auto cfg = put_config("jobs_cmp", lln_config()).string();
  REQUIRE(run("estimate --config " + cfg + " --jobs 1 --out " + a) == 0);
  REQUIRE(run("estimate --config " + cfg + " --out " + b, "GREEDYMASS_JOBS=8") == 0);
  CHECK(slurp(fs::path(a) / "report.json") == slurp(fs::path(b) / "report.json"));
  CHECK(slurp(fs::path(a) / "tables" / "lln.csv") == slurp(fs::path(b) / "tables" / "lln.csv"));
  const json m1 = json::parse(slurp(fs::path(a) / "manifest.json"));
  const json m8 = json::parse(slurp(fs::path(b) / "manifest.json"));
  CHECK(m1["jobs"] == 1);
  CHECK(m8["jobs"] == 8);
  CHECK(m1["report_hash"] == m8["report_hash"]);
}
