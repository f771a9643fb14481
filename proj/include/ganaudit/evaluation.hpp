#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ganaudit/dataset.hpp"
#include "ganaudit/shadow.hpp"

namespace ganaudit {

enum class QueryLabel { member_sample, member_identity, non_member };
enum class QueryMode { mia, iia };

const char* to_string(QueryLabel label);
const char* to_string(QueryMode mode);

// Balanced, shuffled set of positives and negatives. Images are stacked
// into one (n, 1, side, side) tensor; labels run parallel to samples.
struct QueryDataset {
  Tensor images;
  std::vector<QueryLabel> labels;
  QueryMode mode = QueryMode::mia;
  int positives = 0;
  int negatives = 0;

  int size() const { return images.n; }
};

// MIA positives: training records themselves. The positive count follows
// the holdout pairing rule, min(cap, |training|, |holdout| when present),
// so MIA and IIA queries of one split are size-comparable.
QueryDataset build_mia_query(const DatasetSplit& split, int cap,
                             uint64_t seed);

// IIA positives: held-out impressions of training fingers, min(cap,
// |holdout|). Negatives for both modes are drawn from the same seeded
// non-member pool.
QueryDataset build_iia_query(const DatasetSplit& split, int cap,
                             uint64_t seed);

// Positives among the first k ranked items.
int topk_positive_count(const std::vector<int>& ranking,
                        const std::vector<QueryLabel>& labels, int k);

// (positives within the first floor(fraction*N) items, window size).
std::pair<int, int> top_fraction_positive(const std::vector<int>& ranking,
                                          const std::vector<QueryLabel>& labels,
                                          double fraction);

// Expected positives in the top k under a uniformly random ranking.
double random_baseline(int k, int positives, int negatives);

struct AttackReport {
  QueryMode mode = QueryMode::mia;
  std::map<int, std::pair<int, int>> topk_counts;  // k -> (positives, k)
  std::pair<int, int> top_fraction{0, 0};          // (positives, half size)
  std::map<int, double> baselines;
  double top_fraction_baseline = 0.0;
  std::map<std::string, std::vector<double>> score_groups;  // label -> scores
  bool is_matched = false;
  uint64_t seed = 0;
};

using ScoreFn =
    std::function<std::vector<double>(const ShadowPair&, const Tensor&)>;

// Scores, ranks, and counts one query set. MIA and IIA go through this one
// path; only the query construction differs. `scorer` defaults to
// score_queries and exists so tests can interpose oracles.
AttackReport attack_report(const ShadowPair& shadow, const QueryDataset& query,
                           const std::vector<int>& ks, uint64_t seed = 0,
                           const ScoreFn& scorer = {});

std::string report_to_json(const AttackReport& report);
AttackReport report_from_json(const std::string& text);

// 64-bin histograms over [0,1] plus Gaussian-KDE curves at 256 points
// (Silverman bandwidth), one block per group, shared bin edges. Returns a
// warning line per skipped empty group.
std::vector<std::string> export_score_distributions(
    const std::vector<std::pair<std::string, std::vector<double>>>& groups,
    const std::string& csv_path);

}  // namespace ganaudit
