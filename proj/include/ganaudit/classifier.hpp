#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "ganaudit/dataset.hpp"
#include "ganaudit/nn.hpp"

namespace ganaudit {

// Image -> class-posterior map used by the score metric. The reference
// setup plugs in a large pretrained classifier; at desk scale we train a
// small conv net on finger-identity labels instead.
class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual int num_classes() const = 0;
  // One row of class probabilities per image.
  virtual Eigen::MatrixXd predict(const Tensor& images) const = 0;
};

struct ClassifierConfig {
  int max_classes = 64;
  int base_width = 8;
  double leaky_slope = 0.2;
  double learning_rate = 1e-3;
  int batch_size = 64;
  int epochs = 40;
  uint64_t seed = 1;

  void validate() const;
};

class ConvClassifier : public Classifier {
 public:
  int num_classes() const override { return num_classes_; }
  Eigen::MatrixXd predict(const Tensor& images) const override;

  int side() const { return side_; }
  double final_train_accuracy() const { return train_accuracy_; }

  // Finger identities (subject, finger) become class labels, ordered and
  // capped at max_classes; records of dropped fingers are ignored.
  static ConvClassifier train(const std::vector<ImpressionRecord>& records,
                              const ClassifierConfig& config);

  void save(const std::string& path) const;
  static ConvClassifier load(const std::string& path);

 private:
  ConvClassifier() = default;
  static Net build_net(int side, int num_classes, const ClassifierConfig& cfg,
                       uint64_t init_seed);

  mutable Net net_;  // eval-mode forwards are stateless
  ClassifierConfig config_;
  int num_classes_ = 0;
  int side_ = 0;
  double train_accuracy_ = 0.0;
};

// Fixed uniform posterior; handy as the degenerate metric plug.
class UniformClassifier : public Classifier {
 public:
  explicit UniformClassifier(int k) : k_(k) {}
  int num_classes() const override { return k_; }
  Eigen::MatrixXd predict(const Tensor& images) const override {
    return Eigen::MatrixXd::Constant(images.n, k_, 1.0 / k_);
  }

 private:
  int k_;
};

}  // namespace ganaudit
