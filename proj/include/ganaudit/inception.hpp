#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "ganaudit/classifier.hpp"
#include "ganaudit/gan.hpp"

namespace ganaudit {

// KL(p || q) = sum p_i ln(p_i / q_i), with 0 ln(0/q) := 0 and +inf whenever
// some q_i = 0 < p_i. Both arguments must be probability vectors of equal
// length.
double kl_divergence(const std::vector<double>& p,
                     const std::vector<double>& q);

// Row-stochastic matrix of per-image class posteriors.
struct PosteriorMatrix {
  Eigen::MatrixXd values;

  int n() const { return static_cast<int>(values.rows()); }
  int k() const { return static_cast<int>(values.cols()); }
};

// Runs the classifier and validates its contract: rows with entries >= 0
// whose sums are within 1e-4 of one (then renormalized exactly).
PosteriorMatrix class_posteriors(const Classifier& classifier,
                                 const Tensor& images);

// exp of the mean KL between each row and the column-mean marginal.
double inception_score(const PosteriorMatrix& posteriors);

struct IsReport {
  double mean = 0.0;
  double std = 0.0;
  int n_batches = 0;
  int batch_size = 0;
};

// Per-batch score with mean and population std across batches. Batch b
// draws its images with seed ^ b.
IsReport is_stats(const Sampler& sampler, const Classifier& classifier,
                  int n_batches, int batch_size, uint64_t seed);

}  // namespace ganaudit
