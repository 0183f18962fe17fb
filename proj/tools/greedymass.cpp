#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "greedy/experiment.hpp"
#include "greedy/json_io.hpp"

using nlohmann::json;

namespace {

// --jobs, then GREEDYMASS_JOBS, then the config, then 1.
int resolve_jobs(const std::optional<int>& flag, const json* config) {
  if (flag) {
    if (*flag < 1) throw greedy::SchemaError("--jobs must be positive");
    return *flag;
  }
  if (const char* env = std::getenv("GREEDYMASS_JOBS"); env && *env) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1 || v > 4096) throw greedy::SchemaError("GREEDYMASS_JOBS must be a positive integer");
    return static_cast<int>(v);
  }
  if (config && config->is_object() && config->contains("jobs")) {
    const auto& j = (*config)["jobs"];
    if (!j.is_number_integer() || j.get<long long>() < 1) throw greedy::SchemaError("/jobs: must be a positive integer");
    return j.get<int>();
  }
  return 1;
}

json load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw greedy::SchemaError("cannot read config " + path);
  try {
    return json::parse(f);
  } catch (const json::exception& e) {
    throw greedy::SchemaError(path + ": invalid JSON: " + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"greedymass: greedy lattice animals and paths in random environments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", greedy::kToolVersion);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::optional<std::string> out;
  std::string manifest_path;

  for (const char* name : {"generate", "solve", "estimate", "verify"}) {
    auto* sub = app.add_subcommand(name, std::string("run a ") + name + " experiment");
    sub->add_option("--config", config_path, "JSON config")->required();
    sub->add_option("--seed", seed, "master seed, overrides the config");
    sub->add_option("--jobs", jobs, "worker threads (default: GREEDYMASS_JOBS, then config, then 1)");
    sub->add_option("--out", out, "output directory");
  }
  auto* rp = app.add_subcommand("replay", "re-run a manifest and compare report.json");
  rp->add_option("manifest", manifest_path, "manifest.json of an earlier run")->required();
  rp->add_option("--seed", seed, "seed override (a changed seed is reported as a mismatch)");
  rp->add_option("--jobs", jobs, "worker threads");
  rp->add_option("--out", out, "directory for the replayed artifacts");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const std::string sub = app.get_subcommands().front()->get_name();
  try {
    if (sub == "replay") {
      std::optional<json> recorded;
      if (std::ifstream f(manifest_path); f) {
        try {
          recorded = json::parse(f);
        } catch (const json::exception&) {
        }
      }
      if (!recorded) {
        std::cerr << "replay: cannot read manifest " << manifest_path << "\n";
        return 2;
      }
      const json* cfg = recorded->contains("config") ? &(*recorded)["config"] : nullptr;
      int n = resolve_jobs(jobs, cfg);
      if (!jobs && !std::getenv("GREEDYMASS_JOBS") && recorded->contains("jobs") &&
          (*recorded)["jobs"].is_number_integer()) {
        n = std::max(1, (*recorded)["jobs"].get<int>());
      }
      const auto r = greedy::replay(manifest_path, n, seed, out);
      (r.exit_code == 0 ? std::cout : std::cerr) << "replay: " << r.message << "\n";
      return r.exit_code;
    }

    const json config = load_config(config_path);
    const int n = resolve_jobs(jobs, &config);
    std::string dir = "out";
    if (out) {
      dir = *out;
    } else if (config.is_object() && config.contains("out") && config["out"].is_string()) {
      dir = config["out"].get<std::string>();
    }
    const auto outcome = greedy::run_experiment(config, sub, seed, n);
    greedy::write_artifacts(dir, outcome, config, sub, n);
    std::cout << sub << ": exit " << outcome.exit_code << ", artifacts in " << dir << "\n";
    return outcome.exit_code;
  } catch (const greedy::SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
