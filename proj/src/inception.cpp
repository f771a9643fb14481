#include "ganaudit/inception.hpp"

#include <cmath>
#include <limits>

#include "ganaudit/errors.hpp"

namespace ganaudit {

namespace {

constexpr double kDistributionTol = 1e-6;

void check_distribution(const std::vector<double>& p, const char* name) {
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= 0.0))
      throw std::invalid_argument(std::string(name) +
                                  " has a negative or NaN entry");
    sum += v;
  }
  if (std::abs(sum - 1.0) > kDistributionTol)
    throw std::invalid_argument(std::string(name) +
                                " does not sum to 1: " + std::to_string(sum));
}

}  // namespace

double kl_divergence(const std::vector<double>& p,
                     const std::vector<double>& q) {
  if (p.size() != q.size())
    throw std::invalid_argument("kl_divergence: length mismatch");
  if (p.empty()) throw std::invalid_argument("kl_divergence: empty input");
  check_distribution(p, "p");
  check_distribution(q, "q");

  double kl = 0.0;
  for (size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0) return std::numeric_limits<double>::infinity();
    kl += p[i] * std::log(p[i] / q[i]);
  }
  return std::max(kl, 0.0);
}

PosteriorMatrix class_posteriors(const Classifier& classifier,
                                 const Tensor& images) {
  Eigen::MatrixXd raw = classifier.predict(images);
  if (images.n > 0 && raw.cols() != classifier.num_classes())
    throw ClassifierContractError("classifier column count changed");
  PosteriorMatrix out;
  out.values = Eigen::MatrixXd(raw.rows(), raw.cols());
  for (Eigen::Index i = 0; i < raw.rows(); ++i) {
    double sum = 0.0;
    for (Eigen::Index j = 0; j < raw.cols(); ++j) {
      double v = raw(i, j);
      if (!(v >= 0.0))
        throw ClassifierContractError(
            "classifier produced a negative or NaN probability at row " +
            std::to_string(i));
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-4)
      throw ClassifierContractError("classifier row " + std::to_string(i) +
                                    " sums to " + std::to_string(sum));
    for (Eigen::Index j = 0; j < raw.cols(); ++j)
      out.values(i, j) = raw(i, j) / sum;
  }
  return out;
}

double inception_score(const PosteriorMatrix& posteriors) {
  const int n = posteriors.n(), k = posteriors.k();
  if (n < 1) throw std::invalid_argument("inception_score: empty posterior matrix");

  Eigen::VectorXd marginal = posteriors.values.colwise().mean();
  double mean_kl = 0.0;
  for (int i = 0; i < n; ++i) {
    double kl = 0.0;
    for (int j = 0; j < k; ++j) {
      double pij = posteriors.values(i, j);
      if (pij == 0.0) continue;
      // marginal(j) >= pij / n > 0 here, so the log is finite.
      kl += pij * std::log(pij / marginal(j));
    }
    mean_kl += std::max(kl, 0.0);
  }
  mean_kl /= n;
  return std::exp(mean_kl);
}

IsReport is_stats(const Sampler& sampler, const Classifier& classifier,
                  int n_batches, int batch_size, uint64_t seed) {
  if (n_batches < 2)
    throw std::invalid_argument("is_stats needs n_batches >= 2");
  if (batch_size < 1)
    throw std::invalid_argument("is_stats needs batch_size >= 1");

  std::vector<double> scores(n_batches);
  for (int b = 0; b < n_batches; ++b) {
    Tensor images = sampler(batch_size, seed ^ static_cast<uint64_t>(b));
    scores[b] = inception_score(class_posteriors(classifier, images));
  }

  IsReport report;
  report.n_batches = n_batches;
  report.batch_size = batch_size;
  for (double s : scores) report.mean += s;
  report.mean /= n_batches;
  double var = 0.0;
  for (double s : scores) var += (s - report.mean) * (s - report.mean);
  report.std = std::sqrt(var / n_batches);
  return report;
}

}  // namespace ganaudit
