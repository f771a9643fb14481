#include "ganaudit/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <nlohmann/json.hpp>

#include "ganaudit/checkpoint.hpp"
#include "ganaudit/errors.hpp"
#include "ganaudit/rng.hpp"

using nlohmann::json;

namespace ganaudit {

void ClassifierConfig::validate() const {
  if (max_classes < 1) throw ConfigError("classifier max_classes must be >= 1");
  if (base_width < 1) throw ConfigError("classifier base_width must be >= 1");
  if (learning_rate <= 0) throw ConfigError("classifier learning_rate must be positive");
  if (batch_size < 1) throw ConfigError("classifier batch_size must be >= 1");
  if (epochs < 1) throw ConfigError("classifier epochs must be >= 1");
}

Net ConvClassifier::build_net(int side, int num_classes,
                              const ClassifierConfig& cfg, uint64_t init_seed) {
  if (side % 8 != 0 || side < 16)
    throw ConfigError("classifier expects side to be a multiple of 8, >= 16");
  Net net;
  int w = cfg.base_width;
  net.add("conv0", std::make_unique<Conv2dT<float>>(1, w, 3, 2, 1));
  net.add("conv0_act", std::make_unique<LeakyReLUT<float>>(cfg.leaky_slope));
  net.add("conv1", std::make_unique<Conv2dT<float>>(w, 2 * w, 3, 2, 1));
  net.add("conv1_act", std::make_unique<LeakyReLUT<float>>(cfg.leaky_slope));
  net.add("conv2", std::make_unique<Conv2dT<float>>(2 * w, 4 * w, 3, 2, 1));
  net.add("conv2_act", std::make_unique<LeakyReLUT<float>>(cfg.leaky_slope));
  int flat = 4 * w * (side / 8) * (side / 8);
  net.add("logits", std::make_unique<DenseT<float>>(flat, num_classes));
  net.init(init_seed);
  return net;
}

ConvClassifier ConvClassifier::train(
    const std::vector<ImpressionRecord>& records,
    const ClassifierConfig& config) {
  config.validate();
  if (records.empty())
    throw std::invalid_argument("classifier training set is empty");

  std::map<std::pair<int, int>, int> finger_class;
  for (const auto& rec : records) {
    std::pair<int, int> key{rec.subject_id, rec.finger_index};
    if (!finger_class.count(key)) finger_class[key] = 0;
  }
  int next = 0;
  for (auto& [key, cls] : finger_class) {
    cls = next < config.max_classes ? next : -1;
    ++next;
  }

  std::vector<const ImpressionRecord*> kept;
  std::vector<int> labels;
  for (const auto& rec : records) {
    int cls = finger_class[{rec.subject_id, rec.finger_index}];
    if (cls < 0) continue;
    kept.push_back(&rec);
    labels.push_back(cls);
  }
  const int k = std::min<int>(config.max_classes,
                              static_cast<int>(finger_class.size()));
  const int side = kept.front()->side();

  ConvClassifier clf;
  clf.config_ = config;
  clf.num_classes_ = k;
  clf.side_ = side;
  clf.net_ = build_net(side, k, config, derive_seed(config.seed, "clf_init"));

  Adam opt(clf.net_.params("clf"), 0.9);
  Rng order_rng(derive_seed(config.seed, "clf_order"));
  std::vector<int> order(kept.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);

  double accuracy = 0.0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    order_rng.shuffle(order);
    long correct = 0;
    for (size_t start = 0; start < order.size();
         start += static_cast<size_t>(config.batch_size)) {
      size_t end = std::min(order.size(),
                            start + static_cast<size_t>(config.batch_size));
      int b = static_cast<int>(end - start);
      Tensor batch(b, 1, side, side);
      std::vector<int> batch_labels(b);
      for (int i = 0; i < b; ++i) {
        const auto& img = kept[order[start + i]]->image;
        std::copy(img.data.begin(), img.data.end(),
                  batch.data.begin() + static_cast<size_t>(i) * batch.per_sample());
        batch_labels[i] = labels[order[start + i]];
      }
      clf.net_.zero_grads();
      Tensor logits = clf.net_.forward(std::move(batch), true);
      Tensor grad;
      softmax_cross_entropy(logits, batch_labels, grad);
      clf.net_.backward(std::move(grad));
      opt.step(config.learning_rate);

      for (int i = 0; i < b; ++i) {
        const float* row = logits.data.data() + static_cast<size_t>(i) * k;
        int arg = 0;
        for (int j = 1; j < k; ++j)
          if (row[j] > row[arg]) arg = j;
        correct += arg == batch_labels[i];
      }
    }
    accuracy = static_cast<double>(correct) / kept.size();
  }
  clf.train_accuracy_ = accuracy;
  return clf;
}

Eigen::MatrixXd ConvClassifier::predict(const Tensor& images) const {
  if (images.n == 0) return Eigen::MatrixXd(0, num_classes_);
  if (images.h != side_ || images.w != side_)
    throw std::invalid_argument("classifier side mismatch");
  Eigen::MatrixXd out(images.n, num_classes_);
  constexpr int kChunk = 256;
  int done = 0;
  while (done < images.n) {
    int b = std::min(kChunk, images.n - done);
    Tensor chunk(b, images.c, images.h, images.w);
    std::copy(images.data.begin() + done * images.per_sample(),
              images.data.begin() + (done + b) * images.per_sample(),
              chunk.data.begin());
    Tensor logits = net_.forward(std::move(chunk), false);
    for (int i = 0; i < b; ++i) {
      const float* row =
          logits.data.data() + static_cast<size_t>(i) * num_classes_;
      double mx = row[0];
      for (int j = 1; j < num_classes_; ++j) mx = std::max<double>(mx, row[j]);
      double denom = 0.0;
      for (int j = 0; j < num_classes_; ++j) denom += std::exp(row[j] - mx);
      for (int j = 0; j < num_classes_; ++j)
        out(done + i, j) = std::exp(row[j] - mx) / denom;
    }
    done += b;
  }
  return out;
}

void ConvClassifier::save(const std::string& path) const {
  json meta;
  meta["kind"] = "classifier";
  meta["num_classes"] = num_classes_;
  meta["side"] = side_;
  meta["train_accuracy"] = train_accuracy_;
  meta["config"] = {{"max_classes", config_.max_classes},
                    {"base_width", config_.base_width},
                    {"leaky_slope", config_.leaky_slope},
                    {"learning_rate", config_.learning_rate},
                    {"batch_size", config_.batch_size},
                    {"epochs", config_.epochs},
                    {"seed", config_.seed}};
  std::vector<NamedArray> arrays;
  snapshot_params(net_.params("clf"), arrays);
  write_array_container(path, meta.dump(), arrays);
}

ConvClassifier ConvClassifier::load(const std::string& path) {
  ArrayContainer container = read_array_container(path);
  json meta;
  try {
    meta = json::parse(container.meta_json);
  } catch (const json::exception& e) {
    throw CheckpointError("bad classifier metadata in " + path + ": " +
                          e.what());
  }
  if (meta.value("kind", "") != "classifier")
    throw CheckpointError("not a classifier checkpoint: " + path);

  ConvClassifier clf;
  try {
    const json& c = meta.at("config");
    clf.config_.max_classes = c.at("max_classes").get<int>();
    clf.config_.base_width = c.at("base_width").get<int>();
    clf.config_.leaky_slope = c.at("leaky_slope").get<double>();
    clf.config_.learning_rate = c.at("learning_rate").get<double>();
    clf.config_.batch_size = c.at("batch_size").get<int>();
    clf.config_.epochs = c.at("epochs").get<int>();
    clf.config_.seed = c.at("seed").get<uint64_t>();
    clf.num_classes_ = meta.at("num_classes").get<int>();
    clf.side_ = meta.at("side").get<int>();
    clf.train_accuracy_ = meta.value("train_accuracy", 0.0);
  } catch (const json::exception& e) {
    throw CheckpointError("bad classifier config in " + path + ": " + e.what());
  }
  clf.net_ = build_net(clf.side_, clf.num_classes_, clf.config_,
                       derive_seed(clf.config_.seed, "clf_init"));
  restore_params(clf.net_.params("clf"), container);
  return clf;
}

}  // namespace ganaudit
