#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ganaudit/tensor.hpp"

namespace ganaudit {

// One grayscale impression tied to its identity coordinates. Images are
// (1, 1, side, side) tensors with values in [-1, 1].
struct ImpressionRecord {
  int subject_id = 0;
  int finger_index = 0;
  int impression_index = 0;
  Tensor image;

  int side() const { return image.h; }
};

struct SplitConfig {
  int n_users = 0;
  int n_fingers = 8;
  int n_train_impressions = 3;
  int n_total_impressions = 5;
  int positive_cap = 2000;
  uint64_t seed = 0;

  void validate() const;
};

struct DatasetSplit {
  std::vector<ImpressionRecord> training;
  std::vector<ImpressionRecord> identity_holdout;
  std::vector<ImpressionRecord> non_member;
  SplitConfig config;
};

// Synthetic stand-in corpus: each (subject, finger) pair owns a seeded
// oriented-sinusoid ridge field; impressions of one finger differ only by a
// small rotation (max +-10 degrees) and a contrast factor.
std::vector<ImpressionRecord> generate_synthetic_corpus(int n_subjects,
                                                        int n_fingers,
                                                        int n_impressions,
                                                        int side,
                                                        uint64_t seed);

// Reads `<root>/subject_SSS/finger_F/impression_I.(png|pgm)`. Non-square
// images are resampled to squares; all sides must agree across the corpus.
std::vector<ImpressionRecord> load_corpus(const std::string& root);

// Writes the same layout (format: "png" or "pgm").
void write_corpus(const std::vector<ImpressionRecord>& corpus,
                  const std::string& root, const std::string& format = "png");

long split_size(int n_users, int n_fingers, int n_fingerprints);

DatasetSplit make_split(const std::vector<ImpressionRecord>& corpus,
                        const SplitConfig& config);

// Split manifest JSON round-trip, `{config, training: [[s,f,i],...], ...}`.
void save_split_manifest(const DatasetSplit& split, const std::string& path);
DatasetSplit load_split_manifest(const std::string& path,
                                 const std::vector<ImpressionRecord>& corpus);

// Stacks record images into one (n, 1, side, side) batch.
Tensor stack_images(const std::vector<ImpressionRecord>& records);

}  // namespace ganaudit
