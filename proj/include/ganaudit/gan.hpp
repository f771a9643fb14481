#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ganaudit/nn.hpp"
#include "ganaudit/tensor.hpp"

namespace ganaudit {

struct GanConfig {
  int latent_dim = 100;
  int side = 32;
  int gen_base_width = 16;   // channels of the last hidden generator layer
  int disc_depth = 3;        // conv blocks before the scalar head
  double leaky_slope = 0.2;
  double label_smoothing_eps = 0.2;
  double learning_rate = 2e-4;
  double adam_beta1 = 0.5;
  int batch_size = 64;
  int max_epochs = 50;
  uint64_t seed = 1;

  void validate() const;
  // Number of stride-2 stages between the 4x4 base grid and `side`.
  int upsample_stages() const;
};

struct TrainingMeta {
  int epochs_run = 0;
  std::vector<double> d_loss;
  std::vector<double> g_loss;
  std::vector<double> d_accuracy;  // real>0.5 and fake<0.5, per epoch

  double final_d_loss() const { return d_loss.empty() ? 0.0 : d_loss.back(); }
  double final_g_loss() const { return g_loss.empty() ? 0.0 : g_loss.back(); }
  double final_d_accuracy() const {
    return d_accuracy.empty() ? 0.0 : d_accuracy.back();
  }
};

struct TargetModel {
  Net generator;
  Net discriminator;
  GanConfig config;
  TrainingMeta meta;
};

// The one surface the attack side is allowed to touch: n seeded samples.
using Sampler = std::function<Tensor(int n, uint64_t seed)>;

// Hidden generator widths, deepest (4x4) layer first.
std::vector<int> generator_widths(const GanConfig& config);

// DCGAN-style stacks. Hidden activations are LeakyReLU; the generator ends
// in tanh, the discriminator head emits a logit (callers apply sigmoid).
// Batch norm follows the usual convention: all generator hidden blocks,
// every discriminator block except the input one.
template <typename T = float>
NetT<T> build_generator_net(const GanConfig& config,
                            const std::vector<int>& hidden_widths,
                            uint64_t init_seed);
template <typename T = float>
NetT<T> build_discriminator_net(const GanConfig& config, int depth,
                                uint64_t init_seed);

Net build_generator(const GanConfig& config);
Net build_discriminator(const GanConfig& config);

// Symmetric smoothing y(1-eps) + eps/2.
std::vector<double> smooth_labels(const std::vector<double>& labels,
                                  double eps);
double smooth_label(double label, double eps);

// One epoch's worth of real batches. Must be deterministic in `epoch`.
using BatchSource = std::function<std::vector<Tensor>(int epoch)>;
// Return false to stop before max_epochs.
using EpochCallback = std::function<bool(int epoch, const TrainingMeta& meta)>;

// Alternating discriminator/generator steps on smoothed binary
// cross-entropy, Adam on both players. Shared by target and shadow training.
void adversarial_train(Net& generator, Net& discriminator,
                       const GanConfig& hyper, const BatchSource& source,
                       TrainingMeta& meta, const EpochCallback& callback = {});

TargetModel train_gan(const BatchSource& source, const GanConfig& config,
                      const EpochCallback& callback = {});

// Generator output for n seeded standard-normal latent vectors.
Tensor sample(const TargetModel& model, int n, uint64_t seed);
Tensor sample_net(Net& generator, const GanConfig& config, int n,
                  uint64_t seed);

// Sigmoid confidences of a discriminator net on an image batch.
std::vector<double> discriminator_confidence(Net& discriminator,
                                             const Tensor& images);

// Wraps a trained model into the black-box sampling surface. The closure
// owns a copy of the generator only; the discriminator is not captured.
Sampler make_sampler(TargetModel&& model);

void save_checkpoint(const TargetModel& model, const std::string& path);
TargetModel load_checkpoint(const std::string& path);

}  // namespace ganaudit
