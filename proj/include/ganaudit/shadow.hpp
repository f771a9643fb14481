#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ganaudit/classifier.hpp"
#include "ganaudit/gan.hpp"

namespace ganaudit {

struct ShadowConfig {
  GanConfig base;  // attacker's architecture guess and hyperparameters
  double gen_width_multiplier = 1.5;  // widens the deepest generator layer
  int extra_disc_blocks = 1;
  double is_match_tolerance = 0.05;  // relative
  int is_check_interval = 1;         // epochs
  int max_epochs = 50;

  // Target-sample supply. Streaming draws a fresh batch of samples every
  // epoch; pool mode pre-generates a fixed buffer and reshuffles it.
  bool use_sample_pool = false;
  int samples_per_epoch = 1280;
  int pool_size = 5120;

  // Score-check protocol.
  int is_n_batches = 10;
  int is_batch_size = 128;

  void validate() const;
};

struct ShadowPair {
  Net generator;
  Net discriminator;
  ShadowConfig config;
  std::vector<std::pair<int, double>> is_history;  // (epoch, score mean)
  std::optional<int> stop_epoch;
  TrainingMeta meta;

  bool is_matched() const { return stop_epoch.has_value(); }
};

// Relative score match: |shadow - target| / target <= tol.
bool should_stop(double is_shadow, double is_target, double tol);

// Adversarial training where the "real" batches come exclusively from the
// target's sampling surface. Stops early once the shadow generator's score
// matches is_target, otherwise runs to max_epochs with stop_epoch unset.
ShadowPair train_shadow(const Sampler& target_sampler,
                        const ShadowConfig& config,
                        const Classifier& classifier, double is_target,
                        uint64_t seed);

// Shadow-discriminator confidence per query image, order preserved.
std::vector<double> score_queries(const ShadowPair& shadow,
                                  const Tensor& query_images);

// Indices sorted by score descending, ties by ascending index.
std::vector<int> rank_queries(const std::vector<double>& scores);

// Checkpoint plus a JSON sidecar `{is_history, stop_epoch, is_matched}`.
void save_shadow(const ShadowPair& shadow, const std::string& checkpoint_path,
                 const std::string& sidecar_path);
ShadowPair load_shadow(const std::string& checkpoint_path,
                       const std::string& sidecar_path);

}  // namespace ganaudit
