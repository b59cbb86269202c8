// cspgeo: run, validate and replay experiment configs.
//
// Exit status: 0 when every trial succeeded (run), the config is valid (validate) or
// the replay matched byte for byte (replay); 1 on trial failures or replay mismatch;
// 2 on unusable input.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "cspgeo/errors.hpp"
#include "cspgeo/harness.hpp"

namespace {

using namespace cspgeo;

int cmd_validate(const std::string& path) {
  const auto config = load_config(path);
  const auto issues = validate_config(config);
  if (issues.empty()) {
    std::cout << "ok: " << to_string(config.experiment) << " " << to_string(config.ensemble) << " n=" << config.n
              << " k=" << config.k << " hash " << config_hash(config) << "\n";
    return 0;
  }
  for (const auto& i : issues) {
    std::cout << "error: " << i.field << ": " << i.message << "\n";
  }
  return 2;
}

int cmd_run(const std::string& path, const std::string& out_override, unsigned workers) {
  const auto config = load_config(path);
  const auto issues = validate_config(config);
  if (!issues.empty()) {
    for (const auto& i : issues) {
      std::cerr << "error: " << i.field << ": " << i.message << "\n";
    }
    return 2;
  }
  const auto record = run_experiment(config, workers);
  const std::filesystem::path dir = out_override.empty() ? config.output_dir : out_override;
  write_record(record, dir);
  std::cout << "wrote " << record.tables.size() << " tables to " << dir.string() << " (config " << record.config_hash
            << ")\n";
  if (const auto* s = record.table("summary")) {
    std::cout << s->csv();
  }
  for (const auto& f : record.failures) {
    std::cerr << "trial failed: density_index=" << f.density_index;
    if (f.trial) {
      std::cerr << " trial=" << *f.trial;
    }
    std::cerr << " seed=" << f.seed << ": " << f.message << "\n";
  }
  return record.ok() ? 0 : 1;
}

int cmd_replay(const std::string& path, unsigned workers) {
  std::ifstream in(path);
  if (!in) {
    throw ParameterError("cannot open record " + path);
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParameterError(std::string("record is not valid JSON: ") + e.what());
  }
  const auto stored = record_from_json(j);
  if (stored.artifact_version != kArtifactVersion || stored.rng_version != kRngVersion) {
    std::cerr << "record was made by " << stored.artifact_version << " / " << stored.rng_version << ", this is "
              << kArtifactVersion << " / " << kRngVersion << "; replay is not comparable\n";
    return 2;
  }
  if (config_hash(stored.config) != stored.config_hash) {
    std::cerr << "stored config hash " << stored.config_hash << " does not match its config\n";
    return 2;
  }
  const auto fresh = run_experiment(stored.config, workers);
  const std::string a = record_to_json(stored).dump();
  const std::string b = record_to_json(fresh).dump();
  if (a == b) {
    std::cout << "replay identical: " << fresh.tables.size() << " tables, config " << fresh.config_hash << "\n";
    return 0;
  }
  for (const auto& t : fresh.tables) {
    const auto* old = stored.table(t.name);
    if (old == nullptr) {
      std::cout << "table " << t.name << ": missing from the stored record\n";
    } else if (old->csv() != t.csv()) {
      std::cout << "table " << t.name << ": differs\n";
    }
  }
  if (stored.failures.size() != fresh.failures.size()) {
    std::cout << "failure manifest differs\n";
  }
  std::cout << "replay mismatch\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Desk-scale solution-space geometry of random CSPs"};
  app.require_subcommand(1);
  unsigned workers = 0;
  app.add_option("-j,--workers", workers, "worker threads (default: CSPGEO_WORKERS or all cores)");

  std::string run_path, out_dir;
  auto* run = app.add_subcommand("run", "run an experiment config and write its result record");
  run->add_option("config", run_path, "config file")->required();
  run->add_option("-o,--out", out_dir, "output directory (default: the config's output_dir)");

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "check a config without running it");
  validate->add_option("config", validate_path, "config file")->required();

  std::string replay_path;
  auto* replay = app.add_subcommand("replay", "re-run a record's config and compare byte for byte");
  replay->add_option("record", replay_path, "record.json")->required();

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) {
      return cmd_run(run_path, out_dir, workers);
    }
    if (*validate) {
      return cmd_validate(validate_path);
    }
    return cmd_replay(replay_path, workers);
  } catch (const ParameterError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
