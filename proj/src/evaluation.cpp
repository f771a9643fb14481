#include "ganaudit/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "ganaudit/errors.hpp"
#include "ganaudit/rng.hpp"

using nlohmann::json;

namespace ganaudit {

const char* to_string(QueryLabel label) {
  switch (label) {
    case QueryLabel::member_sample: return "member_sample";
    case QueryLabel::member_identity: return "member_identity";
    case QueryLabel::non_member: return "non_member";
  }
  return "?";
}

const char* to_string(QueryMode mode) {
  return mode == QueryMode::mia ? "mia" : "iia";
}

namespace {

bool is_positive(QueryLabel label) { return label != QueryLabel::non_member; }

// First `count` entries of a seeded permutation of [0, n).
std::vector<int> seeded_subsample(int n, int count, uint64_t seed) {
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  Rng rng(seed);
  rng.shuffle(idx);
  idx.resize(count);
  return idx;
}

QueryDataset assemble_query(const std::vector<const ImpressionRecord*>& pos,
                            QueryLabel pos_label,
                            const std::vector<const ImpressionRecord*>& neg,
                            QueryMode mode, uint64_t seed) {
  const int n = static_cast<int>(pos.size() + neg.size());
  const int side = pos.front()->side();

  std::vector<std::pair<const ImpressionRecord*, QueryLabel>> items;
  items.reserve(n);
  for (const auto* r : pos) items.emplace_back(r, pos_label);
  for (const auto* r : neg) items.emplace_back(r, QueryLabel::non_member);
  Rng rng(derive_seed(seed, "query_shuffle"));
  rng.shuffle(items);

  QueryDataset query;
  query.mode = mode;
  query.positives = static_cast<int>(pos.size());
  query.negatives = static_cast<int>(neg.size());
  query.images = Tensor(n, 1, side, side);
  query.labels.resize(n);
  for (int i = 0; i < n; ++i) {
    const auto& img = items[i].first->image;
    std::copy(img.data.begin(), img.data.end(),
              query.images.data.begin() +
                  static_cast<size_t>(i) * query.images.per_sample());
    query.labels[i] = items[i].second;
  }
  return query;
}

std::vector<const ImpressionRecord*> pick_negatives(const DatasetSplit& split,
                                                    int count, uint64_t seed) {
  if (static_cast<int>(split.non_member.size()) < count)
    throw ConstructionError(
        "not enough non-member records for a balanced query: need " +
        std::to_string(count) + ", have " +
        std::to_string(split.non_member.size()));
  // Derived only from `seed`, so MIA and IIA built with the same seed share
  // their negative pool.
  std::vector<int> idx = seeded_subsample(
      static_cast<int>(split.non_member.size()), count,
      derive_seed(seed, "negatives"));
  std::vector<const ImpressionRecord*> out;
  out.reserve(count);
  for (int i : idx) out.push_back(&split.non_member[i]);
  return out;
}

}  // namespace

QueryDataset build_mia_query(const DatasetSplit& split, int cap,
                             uint64_t seed) {
  if (cap < 1) throw std::invalid_argument("cap must be >= 1");
  if (split.training.empty())
    throw ConstructionError("cannot build MIA query: empty training set");

  int p = std::min<int>(cap, static_cast<int>(split.training.size()));
  if (!split.identity_holdout.empty())
    p = std::min<int>(p, static_cast<int>(split.identity_holdout.size()));

  std::vector<int> idx =
      seeded_subsample(static_cast<int>(split.training.size()), p,
                       derive_seed(seed, "mia_positives"));
  std::vector<const ImpressionRecord*> pos;
  pos.reserve(p);
  for (int i : idx) pos.push_back(&split.training[i]);

  auto neg = pick_negatives(split, p, seed);
  return assemble_query(pos, QueryLabel::member_sample, neg, QueryMode::mia,
                        derive_seed(seed, "mia"));
}

QueryDataset build_iia_query(const DatasetSplit& split, int cap,
                             uint64_t seed) {
  if (cap < 1) throw std::invalid_argument("cap must be >= 1");
  if (split.identity_holdout.empty())
    throw ConstructionError("cannot build IIA query: empty identity holdout");

  int p = std::min<int>(cap, static_cast<int>(split.identity_holdout.size()));
  std::vector<int> idx =
      seeded_subsample(static_cast<int>(split.identity_holdout.size()), p,
                       derive_seed(seed, "iia_positives"));
  std::vector<const ImpressionRecord*> pos;
  pos.reserve(p);
  for (int i : idx) pos.push_back(&split.identity_holdout[i]);

  std::set<std::tuple<int, int, int>> training_triples;
  for (const auto& r : split.training)
    training_triples.insert({r.subject_id, r.finger_index, r.impression_index});
  for (const auto* r : pos)
    if (training_triples.count(
            {r->subject_id, r->finger_index, r->impression_index}))
      throw ConstructionError("IIA positive collides with a training triple");

  auto neg = pick_negatives(split, p, seed);
  return assemble_query(pos, QueryLabel::member_identity, neg, QueryMode::iia,
                        derive_seed(seed, "iia"));
}

int topk_positive_count(const std::vector<int>& ranking,
                        const std::vector<QueryLabel>& labels, int k) {
  if (ranking.size() != labels.size())
    throw std::invalid_argument("ranking and labels differ in length");
  if (k < 0 || k > static_cast<int>(labels.size()))
    throw std::invalid_argument("k out of range");
  int count = 0;
  for (int i = 0; i < k; ++i) count += is_positive(labels[ranking[i]]);
  return count;
}

std::pair<int, int> top_fraction_positive(const std::vector<int>& ranking,
                                          const std::vector<QueryLabel>& labels,
                                          double fraction) {
  if (!(fraction > 0.0) || fraction > 1.0)
    throw std::invalid_argument("fraction must be in (0, 1]");
  int window = static_cast<int>(std::floor(fraction * labels.size()));
  return {topk_positive_count(ranking, labels, window), window};
}

double random_baseline(int k, int positives, int negatives) {
  if (positives < 0 || negatives < 0)
    throw std::invalid_argument("negative counts");
  if (k < 0 || k > positives + negatives)
    throw std::invalid_argument("k out of range");
  if (positives + negatives == 0) return 0.0;
  return static_cast<double>(k) * positives / (positives + negatives);
}

AttackReport attack_report(const ShadowPair& shadow, const QueryDataset& query,
                           const std::vector<int>& ks, uint64_t seed,
                           const ScoreFn& scorer) {
  if (query.size() < 1)
    throw std::invalid_argument("attack_report: empty query dataset");

  std::vector<double> scores = scorer
                                   ? scorer(shadow, query.images)
                                   : score_queries(shadow, query.images);
  std::vector<int> ranking = rank_queries(scores);

  AttackReport report;
  report.mode = query.mode;
  report.seed = seed;
  report.is_matched = shadow.is_matched();
  for (int k : ks) {
    report.topk_counts[k] = {topk_positive_count(ranking, query.labels, k), k};
    report.baselines[k] = random_baseline(k, query.positives, query.negatives);
  }
  report.top_fraction = top_fraction_positive(ranking, query.labels, 0.5);
  report.top_fraction_baseline =
      random_baseline(report.top_fraction.second, query.positives,
                      query.negatives);
  for (size_t i = 0; i < scores.size(); ++i)
    report.score_groups[to_string(query.labels[i])].push_back(scores[i]);
  return report;
}

std::string report_to_json(const AttackReport& report) {
  json counts, baselines;
  for (const auto& [k, v] : report.topk_counts) {
    counts[std::to_string(k)] = {v.first, v.second};
    baselines[std::to_string(k)] = report.baselines.at(k);
  }
  counts["top50"] = {report.top_fraction.first, report.top_fraction.second};
  baselines["top50"] = report.top_fraction_baseline;
  json j{{"mode", to_string(report.mode)},
         {"counts", counts},
         {"baselines", baselines},
         {"is_matched", report.is_matched},
         {"seed", report.seed}};
  return j.dump(2) + "\n";
}

AttackReport report_from_json(const std::string& text) {
  AttackReport report;
  json j;
  try {
    j = json::parse(text);
    report.mode =
        j.at("mode").get<std::string>() == "iia" ? QueryMode::iia
                                                 : QueryMode::mia;
    for (const auto& [key, value] : j.at("counts").items()) {
      std::pair<int, int> entry{value.at(0).get<int>(), value.at(1).get<int>()};
      if (key == "top50") {
        report.top_fraction = entry;
        report.top_fraction_baseline = j.at("baselines").at(key).get<double>();
      } else {
        int k = std::stoi(key);
        report.topk_counts[k] = entry;
        report.baselines[k] = j.at("baselines").at(key).get<double>();
      }
    }
    report.is_matched = j.at("is_matched").get<bool>();
    report.seed = j.at("seed").get<uint64_t>();
  } catch (const std::exception& e) {
    throw FormatError(std::string("bad attack report: ") + e.what());
  }
  return report;
}

namespace {

constexpr int kHistogramBins = 64;
constexpr int kKdePoints = 256;

double silverman_bandwidth(std::vector<double> values) {
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  double sd = std::sqrt(var / n);

  std::sort(values.begin(), values.end());
  auto quantile = [&](double q) {
    double pos = q * (n - 1);
    size_t lo = static_cast<size_t>(pos);
    size_t hi = std::min(lo + 1, values.size() - 1);
    double f = pos - lo;
    return values[lo] * (1 - f) + values[hi] * f;
  };
  double iqr = quantile(0.75) - quantile(0.25);

  double spread = sd;
  if (iqr > 0) spread = std::min(spread, iqr / 1.34);
  double h = 0.9 * spread * std::pow(n, -0.2);
  return std::max(h, 1e-3);  // keep the kernel finite on degenerate groups
}

}  // namespace

std::vector<std::string> export_score_distributions(
    const std::vector<std::pair<std::string, std::vector<double>>>& groups,
    const std::string& csv_path) {
  if (groups.empty())
    throw std::invalid_argument("export_score_distributions: no groups");

  std::ofstream out(csv_path);
  if (!out) throw LoadError("cannot write distribution csv: " + csv_path);
  std::vector<std::string> warnings;

  out << "group,bin_low,bin_high,count\n";
  for (const auto& [name, scores] : groups) {
    if (scores.empty()) {
      warnings.push_back("group '" + name + "' is empty, skipped");
      continue;
    }
    std::vector<long> bins(kHistogramBins, 0);
    for (double s : scores) {
      int b = static_cast<int>(s * kHistogramBins);
      b = std::clamp(b, 0, kHistogramBins - 1);
      ++bins[b];
    }
    for (int b = 0; b < kHistogramBins; ++b) {
      out << name << "," << static_cast<double>(b) / kHistogramBins << ","
          << static_cast<double>(b + 1) / kHistogramBins << "," << bins[b]
          << "\n";
    }
  }

  out << "group,x,kde\n";
  for (const auto& [name, scores] : groups) {
    if (scores.empty()) continue;
    double h = silverman_bandwidth(scores);
    const double norm =
        1.0 / (scores.size() * h * std::sqrt(2.0 * 3.14159265358979323846));
    for (int i = 0; i < kKdePoints; ++i) {
      double x = static_cast<double>(i) / (kKdePoints - 1);
      double density = 0.0;
      for (double s : scores) {
        double u = (x - s) / h;
        density += std::exp(-0.5 * u * u);
      }
      out << name << "," << x << "," << density * norm << "\n";
    }
  }
  if (!out) throw LoadError("short write: " + csv_path);
  return warnings;
}

}  // namespace ganaudit
