#include "ganaudit/gan.hpp"

#include <cmath>
#include <memory>

#include <nlohmann/json.hpp>

#include "ganaudit/checkpoint.hpp"
#include "ganaudit/errors.hpp"
#include "ganaudit/rng.hpp"

using nlohmann::json;

namespace ganaudit {

namespace {
constexpr int kBaseSpatial = 4;
constexpr int kSampleChunk = 256;
}  // namespace

int GanConfig::upsample_stages() const {
  int s = side, stages = 0;
  while (s > kBaseSpatial && s % 2 == 0) {
    s /= 2;
    ++stages;
  }
  return s == kBaseSpatial ? stages : -1;
}

void GanConfig::validate() const {
  if (latent_dim < 1) throw ConfigError("latent_dim must be >= 1");
  if (gen_base_width < 1) throw ConfigError("gen_base_width must be >= 1");
  int stages = upsample_stages();
  if (stages < 1)
    throw ConfigError("side must be " + std::to_string(kBaseSpatial) +
                      " * 2^k with k >= 1, got " + std::to_string(side));
  if (disc_depth < stages)
    throw ConfigError("disc_depth must be >= " + std::to_string(stages) +
                      " for side " + std::to_string(side));
  if (label_smoothing_eps < 0.0 || label_smoothing_eps >= 1.0)
    throw ConfigError("label_smoothing_eps must be in [0, 1)");
  if (leaky_slope < 0.0 || leaky_slope >= 1.0)
    throw ConfigError("leaky_slope must be in [0, 1)");
  if (learning_rate <= 0.0) throw ConfigError("learning_rate must be positive");
  if (adam_beta1 < 0.0 || adam_beta1 >= 1.0)
    throw ConfigError("adam_beta1 must be in [0, 1)");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (max_epochs < 1) throw ConfigError("max_epochs must be >= 1");
}

std::vector<int> generator_widths(const GanConfig& config) {
  int stages = config.upsample_stages();
  std::vector<int> widths;
  for (int i = stages - 1; i >= 0; --i)
    widths.push_back(config.gen_base_width << i);
  return widths;
}

template <typename T>
NetT<T> build_generator_net(const GanConfig& config,
                            const std::vector<int>& hidden_widths,
                            uint64_t init_seed) {
  config.validate();
  int stages = config.upsample_stages();
  if (static_cast<int>(hidden_widths.size()) != stages)
    throw ConfigError("generator widths must have one entry per stage");

  NetT<T> net;
  int ch = hidden_widths[0];
  net.add("project", std::make_unique<ConvTranspose2dT<T>>(config.latent_dim,
                                                           ch, 4, 1, 0));
  net.add("project_bn", std::make_unique<BatchNorm2dT<T>>(ch));
  net.add("project_act", std::make_unique<LeakyReLUT<T>>(config.leaky_slope));
  for (int i = 1; i < stages; ++i) {
    int next = hidden_widths[i];
    std::string tag = "up" + std::to_string(i);
    net.add(tag, std::make_unique<ConvTranspose2dT<T>>(ch, next, 4, 2, 1));
    net.add(tag + "_bn", std::make_unique<BatchNorm2dT<T>>(next));
    net.add(tag + "_act", std::make_unique<LeakyReLUT<T>>(config.leaky_slope));
    ch = next;
  }
  net.add("to_image", std::make_unique<ConvTranspose2dT<T>>(ch, 1, 4, 2, 1));
  net.add("tanh", std::make_unique<TanhT<T>>());
  net.init(init_seed);
  return net;
}

template <typename T>
NetT<T> build_discriminator_net(const GanConfig& config, int depth,
                                uint64_t init_seed) {
  config.validate();
  int stages = config.upsample_stages();
  if (depth < stages)
    throw ConfigError("disc depth must be >= " + std::to_string(stages));

  NetT<T> net;
  int ch = config.gen_base_width;
  net.add("down0", std::make_unique<Conv2dT<T>>(1, ch, 4, 2, 1));
  net.add("down0_act", std::make_unique<LeakyReLUT<T>>(config.leaky_slope));
  for (int i = 1; i < stages; ++i) {
    int next = ch * 2;
    std::string tag = "down" + std::to_string(i);
    net.add(tag, std::make_unique<Conv2dT<T>>(ch, next, 4, 2, 1));
    net.add(tag + "_bn", std::make_unique<BatchNorm2dT<T>>(next));
    net.add(tag + "_act", std::make_unique<LeakyReLUT<T>>(config.leaky_slope));
    ch = next;
  }
  for (int i = 0; i < depth - stages; ++i) {
    std::string tag = "extra" + std::to_string(i);
    net.add(tag, std::make_unique<Conv2dT<T>>(ch, ch, 3, 1, 1));
    net.add(tag + "_bn", std::make_unique<BatchNorm2dT<T>>(ch));
    net.add(tag + "_act", std::make_unique<LeakyReLUT<T>>(config.leaky_slope));
  }
  net.add("head", std::make_unique<Conv2dT<T>>(ch, 1, kBaseSpatial, 1, 0));
  net.init(init_seed);
  return net;
}

template NetT<float> build_generator_net<float>(const GanConfig&,
                                                const std::vector<int>&,
                                                uint64_t);
template NetT<double> build_generator_net<double>(const GanConfig&,
                                                  const std::vector<int>&,
                                                  uint64_t);
template NetT<float> build_discriminator_net<float>(const GanConfig&, int,
                                                    uint64_t);
template NetT<double> build_discriminator_net<double>(const GanConfig&, int,
                                                      uint64_t);

Net build_generator(const GanConfig& config) {
  return build_generator_net<float>(config, generator_widths(config),
                                    derive_seed(config.seed, "gen_init"));
}

Net build_discriminator(const GanConfig& config) {
  return build_discriminator_net<float>(config, config.disc_depth,
                                        derive_seed(config.seed, "disc_init"));
}

double smooth_label(double label, double eps) {
  if (eps < 0.0 || eps >= 1.0)
    throw std::invalid_argument("smoothing eps must be in [0, 1)");
  return label * (1.0 - eps) + eps / 2.0;
}

std::vector<double> smooth_labels(const std::vector<double>& labels,
                                  double eps) {
  if (eps < 0.0 || eps >= 1.0)
    throw std::invalid_argument("smoothing eps must be in [0, 1)");
  std::vector<double> out(labels.size());
  for (size_t i = 0; i < labels.size(); ++i)
    out[i] = labels[i] * (1.0 - eps) + eps / 2.0;
  return out;
}

namespace {

Tensor draw_latents(Rng& rng, int n, int latent_dim) {
  Tensor z(n, latent_dim, 1, 1);
  for (auto& v : z.data) v = rng.normal_float();
  return z;
}

}  // namespace

void adversarial_train(Net& generator, Net& discriminator,
                       const GanConfig& hyper, const BatchSource& source,
                       TrainingMeta& meta, const EpochCallback& callback) {
  hyper.validate();

  Adam opt_g(generator.params("g"), hyper.adam_beta1);
  Adam opt_d(discriminator.params("d"), hyper.adam_beta1);
  Rng latent_rng(derive_seed(hyper.seed, "latent"));

  const double y_real = smooth_label(1.0, hyper.label_smoothing_eps);
  const double y_fake = smooth_label(0.0, hyper.label_smoothing_eps);

  for (int epoch = 0; epoch < hyper.max_epochs; ++epoch) {
    std::vector<Tensor> batches = source(epoch);
    if (batches.empty())
      throw std::invalid_argument("batch source yielded no batches");

    double d_loss_sum = 0.0, g_loss_sum = 0.0;
    long correct = 0, scored = 0;
    for (const Tensor& real : batches) {
      const int b = real.n;

      // Discriminator step: real at the smoothed positive label, generated
      // at the smoothed negative one, each pass weighted 1/2.
      discriminator.zero_grads();
      Tensor z = draw_latents(latent_rng, b, hyper.latent_dim);
      Tensor fake = generator.forward(std::move(z), true);

      Tensor grad;
      Tensor logits_r = discriminator.forward(real, true);
      double loss_r = bce_with_logits(logits_r, y_real, 0.5, grad);
      discriminator.backward(std::move(grad));
      Tensor logits_f = discriminator.forward(fake, true);
      double loss_f = bce_with_logits(logits_f, y_fake, 0.5, grad);
      discriminator.backward(std::move(grad));
      opt_d.step(hyper.learning_rate);

      for (size_t i = 0; i < logits_r.size(); ++i)
        correct += logits_r.data[i] > 0 ? 1 : 0;
      for (size_t i = 0; i < logits_f.size(); ++i)
        correct += logits_f.data[i] < 0 ? 1 : 0;
      scored += 2 * b;

      // Generator step: push D's verdict on fresh samples toward "real".
      generator.zero_grads();
      discriminator.zero_grads();
      Tensor z2 = draw_latents(latent_rng, b, hyper.latent_dim);
      Tensor fake2 = generator.forward(std::move(z2), true);
      Tensor logits_g = discriminator.forward(fake2, true);
      double loss_g = bce_with_logits(logits_g, y_real, 1.0, grad);
      Tensor dfake = discriminator.backward(std::move(grad));
      generator.backward(std::move(dfake));
      opt_g.step(hyper.learning_rate);

      double d_loss = loss_r + loss_f;
      if (!std::isfinite(d_loss) || !std::isfinite(loss_g))
        throw TrainingDivergedError(
            "non-finite loss at epoch " + std::to_string(epoch), epoch);
      d_loss_sum += d_loss;
      g_loss_sum += loss_g;
    }

    meta.epochs_run = epoch + 1;
    meta.d_loss.push_back(d_loss_sum / batches.size());
    meta.g_loss.push_back(g_loss_sum / batches.size());
    meta.d_accuracy.push_back(scored ? static_cast<double>(correct) / scored
                                     : 0.0);
    if (callback && !callback(epoch, meta)) break;
  }
}

TargetModel train_gan(const BatchSource& source, const GanConfig& config,
                      const EpochCallback& callback) {
  TargetModel model;
  model.config = config;
  model.generator = build_generator(config);
  model.discriminator = build_discriminator(config);
  adversarial_train(model.generator, model.discriminator, config, source,
                    model.meta, callback);
  return model;
}

Tensor sample_net(Net& generator, const GanConfig& config, int n,
                  uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample count must be >= 1");
  Rng rng(seed);
  std::vector<Tensor> chunks;
  int done = 0;
  while (done < n) {
    int b = std::min(kSampleChunk, n - done);
    Tensor z = draw_latents(rng, b, config.latent_dim);
    chunks.push_back(generator.forward(std::move(z), false));
    done += b;
  }
  return Tensor::stack(chunks);
}

Tensor sample(const TargetModel& model, int n, uint64_t seed) {
  // Eval-mode forwards mutate nothing but layer scratch space; the public
  // contract stays const.
  return sample_net(const_cast<Net&>(model.generator), model.config, n, seed);
}

std::vector<double> discriminator_confidence(Net& discriminator,
                                             const Tensor& images) {
  std::vector<double> out;
  out.reserve(images.n);
  int done = 0;
  while (done < images.n) {
    int b = std::min(kSampleChunk, images.n - done);
    Tensor chunk(b, images.c, images.h, images.w);
    std::copy(images.data.begin() + done * images.per_sample(),
              images.data.begin() + (done + b) * images.per_sample(),
              chunk.data.begin());
    Tensor logits = discriminator.forward(std::move(chunk), false);
    for (size_t i = 0; i < logits.size(); ++i) {
      double p = sigmoid(logits.data[i]);
      out.push_back(std::clamp(p, 1e-12, 1.0 - 1e-12));
    }
    done += b;
  }
  return out;
}

Sampler make_sampler(TargetModel&& model) {
  GanConfig config = model.config;
  auto generator = std::make_shared<Net>(std::move(model.generator));
  return [generator, config](int n, uint64_t seed) {
    return sample_net(*generator, config, n, seed);
  };
}

namespace {

json config_to_json(const GanConfig& c) {
  return json{{"latent_dim", c.latent_dim},
              {"side", c.side},
              {"gen_base_width", c.gen_base_width},
              {"disc_depth", c.disc_depth},
              {"leaky_slope", c.leaky_slope},
              {"label_smoothing_eps", c.label_smoothing_eps},
              {"learning_rate", c.learning_rate},
              {"adam_beta1", c.adam_beta1},
              {"batch_size", c.batch_size},
              {"max_epochs", c.max_epochs},
              {"seed", c.seed}};
}

GanConfig config_from_json(const json& j) {
  GanConfig c;
  c.latent_dim = j.at("latent_dim").get<int>();
  c.side = j.at("side").get<int>();
  c.gen_base_width = j.at("gen_base_width").get<int>();
  c.disc_depth = j.at("disc_depth").get<int>();
  c.leaky_slope = j.at("leaky_slope").get<double>();
  c.label_smoothing_eps = j.at("label_smoothing_eps").get<double>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.adam_beta1 = j.at("adam_beta1").get<double>();
  c.batch_size = j.at("batch_size").get<int>();
  c.max_epochs = j.at("max_epochs").get<int>();
  c.seed = j.at("seed").get<uint64_t>();
  return c;
}

}  // namespace

void save_checkpoint(const TargetModel& model, const std::string& path) {
  json meta;
  meta["kind"] = "gan";
  meta["config"] = config_to_json(model.config);
  meta["epochs_run"] = model.meta.epochs_run;
  meta["final_d_loss"] = model.meta.final_d_loss();
  meta["final_g_loss"] = model.meta.final_g_loss();
  meta["final_d_accuracy"] = model.meta.final_d_accuracy();

  std::vector<NamedArray> arrays;
  auto& m = const_cast<TargetModel&>(model);
  snapshot_params(m.generator.params("g"), arrays);
  snapshot_params(m.discriminator.params("d"), arrays);
  write_array_container(path, meta.dump(), arrays);
}

TargetModel load_checkpoint(const std::string& path) {
  ArrayContainer container = read_array_container(path);
  json meta;
  try {
    meta = json::parse(container.meta_json);
  } catch (const json::exception& e) {
    throw CheckpointError("bad checkpoint metadata in " + path + ": " +
                          e.what());
  }
  if (meta.value("kind", "") != "gan")
    throw CheckpointError("not a GAN checkpoint: " + path);

  TargetModel model;
  try {
    // The stored config wins over whatever the caller expected.
    model.config = config_from_json(meta.at("config"));
  } catch (const json::exception& e) {
    throw CheckpointError("bad checkpoint config in " + path + ": " + e.what());
  }
  model.generator = build_generator(model.config);
  model.discriminator = build_discriminator(model.config);
  restore_params(model.generator.params("g"), container);
  restore_params(model.discriminator.params("d"), container);
  model.meta.epochs_run = meta.value("epochs_run", 0);
  model.meta.d_loss = {meta.value("final_d_loss", 0.0)};
  model.meta.g_loss = {meta.value("final_g_loss", 0.0)};
  model.meta.d_accuracy = {meta.value("final_d_accuracy", 0.0)};
  return model;
}

}  // namespace ganaudit
