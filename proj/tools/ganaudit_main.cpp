#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>

#include "ganaudit/errors.hpp"
#include "ganaudit/runner.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitDiverged = 3;
constexpr int kExitIo = 4;

int guarded(const std::function<void()>& body) {
  try {
    body();
    return kExitOk;
  } catch (const ganaudit::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ganaudit::TrainingDivergedError& e) {
    std::cerr << "training diverged: " << e.what() << "\n";
    return kExitDiverged;
  } catch (const ganaudit::LoadError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ganaudit::CheckpointError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ganaudit::FormatError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

void print_artifacts(const ganaudit::StageResult& result) {
  for (const auto& a : result.artifacts) std::cout << "wrote " << a << "\n";
  std::cout << "done in " << result.wall_seconds << " s\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Train biometric-style GANs and audit their membership/identity leakage"};
  app.require_subcommand(1);

  std::string config_path;
  std::string split_name;
  std::string out_override;
  std::optional<uint64_t> seed;
  bool force = false;

  auto add_common = [&](CLI::App* cmd, bool needs_split) {
    cmd->add_option("--config", config_path, "experiment config (JSON)")
        ->required();
    if (needs_split)
      cmd->add_option("--split", split_name, "split name from the config")
          ->required();
    cmd->add_option("--seed", seed, "override the master seed");
    cmd->add_option("--out", out_override, "override the output directory");
  };

  CLI::App* gen = app.add_subcommand("gen-data", "write the synthetic corpus");
  add_common(gen, false);
  gen->add_flag("--force", force, "overwrite a non-empty corpus directory");

  CLI::App* train = app.add_subcommand("train-target",
                                       "train the target GAN on one split");
  add_common(train, true);

  CLI::App* attack = app.add_subcommand(
      "attack", "train the shadow pair and write MIA/IIA reports");
  add_common(attack, true);

  CLI::App* evaluate = app.add_subcommand(
      "evaluate", "re-evaluate an existing shadow checkpoint");
  add_common(evaluate, true);

  CLI::App* report = app.add_subcommand("report",
                                        "render the consolidated result table");
  report->add_option("--out", out_override, "results directory to scan");
  std::string report_config;
  report->add_option("--config", report_config,
                     "config whose out_dir should be scanned");
  std::string report_csv;
  report->add_option("--csv", report_csv, "also write the table as CSV here");

  CLI11_PARSE(app, argc, argv);

  auto load_config = [&]() {
    ganaudit::ExperimentConfig config =
        ganaudit::load_experiment_config(config_path);
    if (seed) config.master_seed = *seed;
    if (!out_override.empty()) config.out_dir = out_override;
    return config;
  };

  if (gen->parsed())
    return guarded([&] { print_artifacts(ganaudit::run_gen_data(load_config(), force)); });
  if (train->parsed())
    return guarded([&] {
      print_artifacts(ganaudit::run_train_target(load_config(), split_name));
    });
  if (attack->parsed())
    return guarded([&] {
      print_artifacts(ganaudit::run_attack(load_config(), split_name, seed));
    });
  if (evaluate->parsed())
    return guarded([&] {
      print_artifacts(ganaudit::run_evaluate(load_config(), split_name, seed));
    });
  if (report->parsed())
    return guarded([&] {
      std::string dir = out_override;
      if (dir.empty() && !report_config.empty())
        dir = ganaudit::load_experiment_config(report_config).out_dir;
      if (dir.empty())
        throw ganaudit::ConfigError("report needs --out or --config");
      ganaudit::ReportTable table = ganaudit::collect_reports(dir);
      std::cout << ganaudit::render_report_table(table);
      if (!report_csv.empty()) {
        std::ofstream out(report_csv);
        if (!out)
          throw ganaudit::LoadError("cannot write csv: " + report_csv);
        out << ganaudit::render_report_csv(table);
      }
    });
  return kExitOk;
}
