#include "ganaudit/shadow.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "ganaudit/checkpoint.hpp"
#include "ganaudit/errors.hpp"
#include "ganaudit/inception.hpp"
#include "ganaudit/rng.hpp"

using nlohmann::json;

namespace ganaudit {

void ShadowConfig::validate() const {
  base.validate();
  if (gen_width_multiplier < 1.0)
    throw ConfigError("gen_width_multiplier must be >= 1");
  if (extra_disc_blocks < 0)
    throw ConfigError("extra_disc_blocks must be >= 0");
  if (is_match_tolerance <= 0.0)
    throw ConfigError("is_match_tolerance must be positive");
  if (is_check_interval < 1)
    throw ConfigError("is_check_interval must be >= 1");
  if (max_epochs < 1) throw ConfigError("shadow max_epochs must be >= 1");
  if (samples_per_epoch < 1)
    throw ConfigError("samples_per_epoch must be >= 1");
  if (pool_size < 1) throw ConfigError("pool_size must be >= 1");
  if (is_n_batches < 2) throw ConfigError("is_n_batches must be >= 2");
  if (is_batch_size < 1) throw ConfigError("is_batch_size must be >= 1");
}

bool should_stop(double is_shadow, double is_target, double tol) {
  if (!(is_target > 0.0))
    throw std::invalid_argument("should_stop: is_target must be positive");
  if (!(tol > 0.0))
    throw std::invalid_argument("should_stop: tolerance must be positive");
  return std::abs(is_shadow - is_target) / is_target <= tol;
}

namespace {

std::vector<int> shadow_generator_widths(const ShadowConfig& cfg) {
  std::vector<int> widths = generator_widths(cfg.base);
  widths[0] = static_cast<int>(
      std::ceil(cfg.gen_width_multiplier * static_cast<double>(widths[0])));
  return widths;
}

std::vector<Tensor> slice_batches(const Tensor& images, int batch_size) {
  std::vector<Tensor> batches;
  int done = 0;
  while (done < images.n) {
    int b = std::min(batch_size, images.n - done);
    Tensor batch(b, images.c, images.h, images.w);
    std::copy(images.data.begin() + done * images.per_sample(),
              images.data.begin() + (done + b) * images.per_sample(),
              batch.data.begin());
    batches.push_back(std::move(batch));
    done += b;
  }
  return batches;
}

}  // namespace

ShadowPair train_shadow(const Sampler& target_sampler,
                        const ShadowConfig& config,
                        const Classifier& classifier, double is_target,
                        uint64_t seed) {
  config.validate();
  if (!(is_target > 0.0))
    throw std::invalid_argument("train_shadow: is_target must be positive");

  GanConfig hyper = config.base;
  hyper.seed = seed;

  ShadowPair shadow;
  shadow.config = config;
  shadow.generator = build_generator_net<float>(
      hyper, shadow_generator_widths(config), derive_seed(seed, "gen_init"));
  shadow.discriminator = build_discriminator_net<float>(
      hyper, hyper.disc_depth + config.extra_disc_blocks,
      derive_seed(seed, "disc_init"));

  // Pre-generated pool, only used in pool mode.
  Tensor pool;
  if (config.use_sample_pool)
    pool = target_sampler(config.pool_size, derive_seed(seed, "pool"));

  uint64_t order_seed = derive_seed(seed, "shadow_order");
  BatchSource source = [&](int epoch) {
    if (config.use_sample_pool) {
      std::vector<int> order(pool.n);
      for (int i = 0; i < pool.n; ++i) order[i] = i;
      Rng rng(derive_seed(order_seed, "epoch", static_cast<uint64_t>(epoch)));
      rng.shuffle(order);
      Tensor shuffled(pool.n, pool.c, pool.h, pool.w);
      for (int i = 0; i < pool.n; ++i)
        std::copy(pool.data.begin() + order[i] * pool.per_sample(),
                  pool.data.begin() + (order[i] + 1) * pool.per_sample(),
                  shuffled.data.begin() + static_cast<size_t>(i) * pool.per_sample());
      return slice_batches(shuffled, hyper.batch_size);
    }
    Tensor fresh = target_sampler(
        config.samples_per_epoch,
        derive_seed(seed, "stream", static_cast<uint64_t>(epoch)));
    return slice_batches(fresh, hyper.batch_size);
  };

  uint64_t is_seed = derive_seed(seed, "is_check");
  EpochCallback callback = [&](int epoch, const TrainingMeta&) {
    if ((epoch + 1) % config.is_check_interval != 0) return true;
    Sampler shadow_sampler = [&](int n, uint64_t s) {
      return sample_net(shadow.generator, hyper, n, s);
    };
    IsReport report = is_stats(shadow_sampler, classifier, config.is_n_batches,
                               config.is_batch_size, is_seed);
    shadow.is_history.emplace_back(epoch, report.mean);
    if (should_stop(report.mean, is_target, config.is_match_tolerance)) {
      shadow.stop_epoch = epoch;
      return false;
    }
    return true;
  };

  GanConfig loop = hyper;
  loop.max_epochs = config.max_epochs;
  adversarial_train(shadow.generator, shadow.discriminator, loop, source,
                    shadow.meta, callback);
  return shadow;
}

std::vector<double> score_queries(const ShadowPair& shadow,
                                  const Tensor& query_images) {
  if (query_images.n < 1)
    throw std::invalid_argument("score_queries: empty query batch");
  if (query_images.h != shadow.config.base.side ||
      query_images.w != shadow.config.base.side || query_images.c != 1)
    throw std::invalid_argument("score_queries: image shape mismatch");
  // Eval-mode forwards leave the net untouched; the pair stays shareable.
  return discriminator_confidence(const_cast<Net&>(shadow.discriminator),
                                  query_images);
}

std::vector<int> rank_queries(const std::vector<double>& scores) {
  for (double s : scores)
    if (!std::isfinite(s))
      throw std::invalid_argument("rank_queries: non-finite score");
  std::vector<int> idx(scores.size());
  for (size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  });
  return idx;
}

namespace {

json shadow_config_json(const ShadowConfig& c) {
  return json{{"base",
               {{"latent_dim", c.base.latent_dim},
                {"side", c.base.side},
                {"gen_base_width", c.base.gen_base_width},
                {"disc_depth", c.base.disc_depth},
                {"leaky_slope", c.base.leaky_slope},
                {"label_smoothing_eps", c.base.label_smoothing_eps},
                {"learning_rate", c.base.learning_rate},
                {"adam_beta1", c.base.adam_beta1},
                {"batch_size", c.base.batch_size},
                {"max_epochs", c.base.max_epochs},
                {"seed", c.base.seed}}},
              {"gen_width_multiplier", c.gen_width_multiplier},
              {"extra_disc_blocks", c.extra_disc_blocks},
              {"is_match_tolerance", c.is_match_tolerance},
              {"is_check_interval", c.is_check_interval},
              {"max_epochs", c.max_epochs},
              {"use_sample_pool", c.use_sample_pool},
              {"samples_per_epoch", c.samples_per_epoch},
              {"pool_size", c.pool_size},
              {"is_n_batches", c.is_n_batches},
              {"is_batch_size", c.is_batch_size}};
}

ShadowConfig shadow_config_from_json(const json& j) {
  ShadowConfig c;
  const json& b = j.at("base");
  c.base.latent_dim = b.at("latent_dim").get<int>();
  c.base.side = b.at("side").get<int>();
  c.base.gen_base_width = b.at("gen_base_width").get<int>();
  c.base.disc_depth = b.at("disc_depth").get<int>();
  c.base.leaky_slope = b.at("leaky_slope").get<double>();
  c.base.label_smoothing_eps = b.at("label_smoothing_eps").get<double>();
  c.base.learning_rate = b.at("learning_rate").get<double>();
  c.base.adam_beta1 = b.at("adam_beta1").get<double>();
  c.base.batch_size = b.at("batch_size").get<int>();
  c.base.max_epochs = b.at("max_epochs").get<int>();
  c.base.seed = b.at("seed").get<uint64_t>();
  c.gen_width_multiplier = j.at("gen_width_multiplier").get<double>();
  c.extra_disc_blocks = j.at("extra_disc_blocks").get<int>();
  c.is_match_tolerance = j.at("is_match_tolerance").get<double>();
  c.is_check_interval = j.at("is_check_interval").get<int>();
  c.max_epochs = j.at("max_epochs").get<int>();
  c.use_sample_pool = j.at("use_sample_pool").get<bool>();
  c.samples_per_epoch = j.at("samples_per_epoch").get<int>();
  c.pool_size = j.at("pool_size").get<int>();
  c.is_n_batches = j.at("is_n_batches").get<int>();
  c.is_batch_size = j.at("is_batch_size").get<int>();
  return c;
}

}  // namespace

void save_shadow(const ShadowPair& shadow, const std::string& checkpoint_path,
                 const std::string& sidecar_path) {
  json meta;
  meta["kind"] = "shadow";
  meta["config"] = shadow_config_json(shadow.config);
  std::vector<NamedArray> arrays;
  auto& s = const_cast<ShadowPair&>(shadow);
  snapshot_params(s.generator.params("g"), arrays);
  snapshot_params(s.discriminator.params("d"), arrays);
  write_array_container(checkpoint_path, meta.dump(), arrays);

  json side;
  side["is_history"] = json::array();
  for (const auto& [epoch, score] : shadow.is_history)
    side["is_history"].push_back({epoch, score});
  side["stop_epoch"] =
      shadow.stop_epoch ? json(*shadow.stop_epoch) : json(nullptr);
  side["is_matched"] = shadow.is_matched();
  std::ofstream out(sidecar_path);
  if (!out) throw LoadError("cannot write shadow sidecar: " + sidecar_path);
  out << side.dump(2) << "\n";
}

ShadowPair load_shadow(const std::string& checkpoint_path,
                       const std::string& sidecar_path) {
  ArrayContainer container = read_array_container(checkpoint_path);
  json meta;
  try {
    meta = json::parse(container.meta_json);
  } catch (const json::exception& e) {
    throw CheckpointError("bad shadow metadata in " + checkpoint_path + ": " +
                          e.what());
  }
  if (meta.value("kind", "") != "shadow")
    throw CheckpointError("not a shadow checkpoint: " + checkpoint_path);

  ShadowPair shadow;
  try {
    shadow.config = shadow_config_from_json(meta.at("config"));
  } catch (const json::exception& e) {
    throw CheckpointError("bad shadow config in " + checkpoint_path + ": " +
                          e.what());
  }
  shadow.generator = build_generator_net<float>(
      shadow.config.base, shadow_generator_widths(shadow.config), 0);
  shadow.discriminator = build_discriminator_net<float>(
      shadow.config.base,
      shadow.config.base.disc_depth + shadow.config.extra_disc_blocks, 0);
  restore_params(shadow.generator.params("g"), container);
  restore_params(shadow.discriminator.params("d"), container);

  std::ifstream in(sidecar_path);
  if (!in) throw LoadError("cannot read shadow sidecar: " + sidecar_path);
  json side;
  try {
    in >> side;
    for (const auto& entry : side.at("is_history"))
      shadow.is_history.emplace_back(entry.at(0).get<int>(),
                                     entry.at(1).get<double>());
    if (!side.at("stop_epoch").is_null())
      shadow.stop_epoch = side.at("stop_epoch").get<int>();
  } catch (const json::exception& e) {
    throw FormatError("bad shadow sidecar " + sidecar_path + ": " + e.what());
  }
  return shadow;
}

}  // namespace ganaudit
