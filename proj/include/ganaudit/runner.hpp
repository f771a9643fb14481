#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ganaudit/classifier.hpp"
#include "ganaudit/dataset.hpp"
#include "ganaudit/evaluation.hpp"
#include "ganaudit/gan.hpp"
#include "ganaudit/shadow.hpp"

namespace ganaudit {

struct SyntheticCorpusSpec {
  int n_subjects = 100;
  int n_fingers = 8;
  int n_impressions = 5;
  int side = 32;
};

struct SplitSpec {
  std::string name;
  SplitConfig config;  // seed filled from the master seed at run time
};

struct ExperimentConfig {
  // Corpus source: "synthetic" generates into corpus_path, "directory"
  // expects an existing tree there.
  std::string corpus_kind = "synthetic";
  SyntheticCorpusSpec synthetic;
  std::string corpus_path;
  std::string corpus_format = "png";

  std::vector<SplitSpec> splits;
  GanConfig target;
  ShadowConfig shadow;
  ClassifierConfig classifier;
  std::vector<int> metric_ks{20, 200};
  int is_n_batches = 10;
  int is_batch_size = 128;
  // "sampled": score the target through its own sampling surface (default);
  // "real": score the split's training images instead (diagnostic only).
  std::string is_target_source = "sampled";
  std::string out_dir;
  uint64_t master_seed = 1;

  void validate() const;
  const SplitSpec& split(const std::string& name) const;
};

ExperimentConfig load_experiment_config(const std::string& path);
std::string config_hash(const ExperimentConfig& config);

// Derived per-stage seeds; every stage re-derives from the master seed so
// runs are reproducible stage by stage.
uint64_t stage_seed(const ExperimentConfig& config, const std::string& stage,
                    const std::string& split_name);

struct StageResult {
  std::vector<std::string> artifacts;
  double wall_seconds = 0.0;
};

// CLI stage entry points. Each writes its artifacts under
// out_dir/<split>/ and updates manifest.json there.
StageResult run_gen_data(const ExperimentConfig& config, bool force);
StageResult run_train_target(const ExperimentConfig& config,
                             const std::string& split_name);
StageResult run_attack(const ExperimentConfig& config,
                       const std::string& split_name,
                       std::optional<uint64_t> seed_override = {});
StageResult run_evaluate(const ExperimentConfig& config,
                         const std::string& split_name,
                         std::optional<uint64_t> seed_override = {});

struct ReportRow {
  std::string split;
  std::string mode;
  std::pair<int, int> top20{0, 0};
  std::pair<int, int> top200{0, 0};
  std::pair<int, int> top_half{0, 0};
  double baseline20 = 0.0;
  double baseline200 = 0.0;
  double baseline_half = 0.0;
  bool is_matched = false;
};

struct ReportTable {
  std::vector<ReportRow> rows;
  std::vector<std::string> warnings;
};

// Collects report_*.json files under out_dir/*/ into one table.
ReportTable collect_reports(const std::string& out_dir);
std::string render_report_table(const ReportTable& table);
std::string render_report_csv(const ReportTable& table);

}  // namespace ganaudit
