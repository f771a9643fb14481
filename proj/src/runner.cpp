#include "ganaudit/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ganaudit/errors.hpp"
#include "ganaudit/inception.hpp"
#include "ganaudit/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace ganaudit {

namespace {

constexpr const char* kToolVersion = "ganaudit 0.1.0";

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

json config_as_json(const ExperimentConfig& c) {
  json j;
  j["corpus"] = {{"kind", c.corpus_kind},
                 {"path", c.corpus_path},
                 {"format", c.corpus_format},
                 {"n_subjects", c.synthetic.n_subjects},
                 {"n_fingers", c.synthetic.n_fingers},
                 {"n_impressions", c.synthetic.n_impressions},
                 {"side", c.synthetic.side}};
  j["splits"] = json::array();
  for (const auto& s : c.splits)
    j["splits"].push_back({{"name", s.name},
                           {"n_users", s.config.n_users},
                           {"n_fingers", s.config.n_fingers},
                           {"n_train_impressions", s.config.n_train_impressions},
                           {"n_total_impressions", s.config.n_total_impressions},
                           {"positive_cap", s.config.positive_cap}});
  j["target"] = {{"latent_dim", c.target.latent_dim},
                 {"side", c.target.side},
                 {"gen_base_width", c.target.gen_base_width},
                 {"disc_depth", c.target.disc_depth},
                 {"leaky_slope", c.target.leaky_slope},
                 {"label_smoothing_eps", c.target.label_smoothing_eps},
                 {"learning_rate", c.target.learning_rate},
                 {"adam_beta1", c.target.adam_beta1},
                 {"batch_size", c.target.batch_size},
                 {"max_epochs", c.target.max_epochs}};
  j["shadow"] = {{"gen_width_multiplier", c.shadow.gen_width_multiplier},
                 {"extra_disc_blocks", c.shadow.extra_disc_blocks},
                 {"is_match_tolerance", c.shadow.is_match_tolerance},
                 {"is_check_interval", c.shadow.is_check_interval},
                 {"max_epochs", c.shadow.max_epochs},
                 {"use_sample_pool", c.shadow.use_sample_pool},
                 {"samples_per_epoch", c.shadow.samples_per_epoch},
                 {"pool_size", c.shadow.pool_size},
                 {"is_n_batches", c.shadow.is_n_batches},
                 {"is_batch_size", c.shadow.is_batch_size},
                 {"base",
                  {{"latent_dim", c.shadow.base.latent_dim},
                   {"gen_base_width", c.shadow.base.gen_base_width},
                   {"disc_depth", c.shadow.base.disc_depth},
                   {"learning_rate", c.shadow.base.learning_rate},
                   {"adam_beta1", c.shadow.base.adam_beta1},
                   {"batch_size", c.shadow.base.batch_size},
                   {"label_smoothing_eps", c.shadow.base.label_smoothing_eps},
                   {"leaky_slope", c.shadow.base.leaky_slope}}}};
  j["classifier"] = {{"max_classes", c.classifier.max_classes},
                     {"base_width", c.classifier.base_width},
                     {"leaky_slope", c.classifier.leaky_slope},
                     {"learning_rate", c.classifier.learning_rate},
                     {"batch_size", c.classifier.batch_size},
                     {"epochs", c.classifier.epochs}};
  j["metric_ks"] = c.metric_ks;
  j["is_n_batches"] = c.is_n_batches;
  j["is_batch_size"] = c.is_batch_size;
  j["is_target_source"] = c.is_target_source;
  j["out_dir"] = c.out_dir;
  j["master_seed"] = c.master_seed;
  return j;
}

fs::path split_dir(const ExperimentConfig& config, const std::string& name) {
  return fs::path(config.out_dir) / name;
}

void update_manifest(const ExperimentConfig& config, const std::string& split,
                     const std::string& stage, const json& entry) {
  fs::path dir = split_dir(config, split);
  fs::create_directories(dir);
  fs::path path = dir / "manifest.json";
  json manifest;
  if (fs::exists(path)) {
    std::ifstream in(path);
    try {
      in >> manifest;
    } catch (const json::exception&) {
      manifest = json::object();
    }
  }
  manifest["config_hash"] = config_hash(config);
  manifest["tool_version"] = kToolVersion;
  manifest["stages"][stage] = entry;
  std::ofstream out(path);
  if (!out) throw LoadError("cannot write manifest: " + path.string());
  out << manifest.dump(2) << "\n";
}

uint64_t corpus_fingerprint(const std::vector<ImpressionRecord>& corpus) {
  uint64_t h = 1469598103934665603ULL;
  auto mix = [&](uint64_t v) { h = splitmix64(h ^ splitmix64(v)); };
  for (const auto& rec : corpus) {
    mix(static_cast<uint64_t>(rec.subject_id));
    mix(static_cast<uint64_t>(rec.finger_index));
    mix(static_cast<uint64_t>(rec.impression_index));
    uint64_t img = 1469598103934665603ULL;
    for (float v : rec.image.data) {
      uint32_t bits;
      std::memcpy(&bits, &v, 4);
      img = (img ^ bits) * 1099511628211ULL;
    }
    mix(img);
  }
  return h;
}

std::vector<ImpressionRecord> load_configured_corpus(
    const ExperimentConfig& config) {
  if (config.corpus_kind == "synthetic" && !fs::is_directory(config.corpus_path))
    throw LoadError("corpus not generated yet, run gen-data first: " +
                    config.corpus_path);
  return load_corpus(config.corpus_path);
}

// Shuffled real-image batches for one epoch of target training.
BatchSource make_corpus_source(const Tensor& images, int batch_size,
                               uint64_t seed) {
  return [&images, batch_size, seed](int epoch) {
    std::vector<int> order(images.n);
    for (int i = 0; i < images.n; ++i) order[i] = i;
    Rng rng(derive_seed(seed, "batch_order", static_cast<uint64_t>(epoch)));
    rng.shuffle(order);
    std::vector<Tensor> batches;
    for (int start = 0; start < images.n; start += batch_size) {
      int b = std::min(batch_size, images.n - start);
      Tensor batch(b, images.c, images.h, images.w);
      for (int i = 0; i < b; ++i)
        std::copy(
            images.data.begin() + static_cast<size_t>(order[start + i]) *
                                      images.per_sample(),
            images.data.begin() +
                static_cast<size_t>(order[start + i] + 1) * images.per_sample(),
            batch.data.begin() + static_cast<size_t>(i) * batch.per_sample());
      batches.push_back(std::move(batch));
    }
    return batches;
  };
}

json is_report_json(const IsReport& r) {
  return json{{"mean", r.mean},
              {"std", r.std},
              {"n_batches", r.n_batches},
              {"batch_size", r.batch_size}};
}

}  // namespace

void ExperimentConfig::validate() const {
  if (corpus_kind != "synthetic" && corpus_kind != "directory")
    throw ConfigError("corpus.kind must be 'synthetic' or 'directory'");
  if (corpus_path.empty()) throw ConfigError("corpus.path is required");
  if (corpus_format != "png" && corpus_format != "pgm")
    throw ConfigError("corpus.format must be 'png' or 'pgm'");
  if (out_dir.empty()) throw ConfigError("out_dir is required");
  if (splits.empty()) throw ConfigError("at least one split is required");
  for (const auto& s : splits) {
    if (s.name.empty()) throw ConfigError("split names must be non-empty");
    try {
      s.config.validate();
    } catch (const std::exception& e) {
      throw ConfigError("split '" + s.name + "': " + e.what());
    }
  }
  try {
    target.validate();
    shadow.validate();
    classifier.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  if (metric_ks.empty()) throw ConfigError("metric_ks must be non-empty");
  for (int k : metric_ks)
    if (k < 1) throw ConfigError("metric_ks entries must be >= 1");
  if (is_n_batches < 2) throw ConfigError("is_n_batches must be >= 2");
  if (is_batch_size < 1) throw ConfigError("is_batch_size must be >= 1");
  if (is_target_source != "sampled" && is_target_source != "real")
    throw ConfigError("is_target_source must be 'sampled' or 'real'");
  if (corpus_kind == "synthetic" && synthetic.side != target.side)
    throw ConfigError("synthetic corpus side must match target side");
}

const SplitSpec& ExperimentConfig::split(const std::string& name) const {
  for (const auto& s : splits)
    if (s.name == name) return s;
  std::string known;
  for (const auto& s : splits) known += (known.empty() ? "" : ", ") + s.name;
  throw ConfigError("unknown split '" + name + "' (available: " + known + ")");
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config parse error in " + path + ": " + e.what());
  }

  ExperimentConfig c;
  try {
    const json& corpus = j.at("corpus");
    c.corpus_kind = corpus.at("kind").get<std::string>();
    c.corpus_path = corpus.at("path").get<std::string>();
    c.corpus_format = corpus.value("format", "png");
    c.synthetic.n_subjects = corpus.value("n_subjects", 100);
    c.synthetic.n_fingers = corpus.value("n_fingers", 8);
    c.synthetic.n_impressions = corpus.value("n_impressions", 5);
    c.synthetic.side = corpus.value("side", 32);

    for (const auto& s : j.at("splits")) {
      SplitSpec spec;
      spec.name = s.at("name").get<std::string>();
      spec.config.n_users = s.at("n_users").get<int>();
      spec.config.n_fingers = s.value("n_fingers", 8);
      spec.config.n_train_impressions = s.value("n_train_impressions", 3);
      spec.config.n_total_impressions = s.value("n_total_impressions", 5);
      spec.config.positive_cap = s.value("positive_cap", 2000);
      c.splits.push_back(spec);
    }

    const json& t = j.at("target");
    c.target.latent_dim = t.value("latent_dim", 100);
    c.target.side = t.value("side", 32);
    c.target.gen_base_width = t.value("gen_base_width", 16);
    c.target.disc_depth = t.value("disc_depth", 3);
    c.target.leaky_slope = t.value("leaky_slope", 0.2);
    c.target.label_smoothing_eps = t.value("label_smoothing_eps", 0.2);
    c.target.learning_rate = t.value("learning_rate", 2e-4);
    c.target.adam_beta1 = t.value("adam_beta1", 0.5);
    c.target.batch_size = t.value("batch_size", 64);
    c.target.max_epochs = t.value("max_epochs", 50);

    const json& s = j.at("shadow");
    c.shadow.base = c.target;  // attacker's guess defaults to the same family
    if (s.contains("base")) {
      const json& b = s.at("base");
      c.shadow.base.latent_dim = b.value("latent_dim", c.target.latent_dim);
      c.shadow.base.gen_base_width =
          b.value("gen_base_width", c.target.gen_base_width);
      c.shadow.base.disc_depth = b.value("disc_depth", c.target.disc_depth);
      c.shadow.base.learning_rate =
          b.value("learning_rate", c.target.learning_rate);
      c.shadow.base.adam_beta1 = b.value("adam_beta1", c.target.adam_beta1);
      c.shadow.base.batch_size = b.value("batch_size", c.target.batch_size);
      c.shadow.base.label_smoothing_eps =
          b.value("label_smoothing_eps", c.target.label_smoothing_eps);
      c.shadow.base.leaky_slope = b.value("leaky_slope", c.target.leaky_slope);
    }
    c.shadow.gen_width_multiplier = s.value("gen_width_multiplier", 1.5);
    c.shadow.extra_disc_blocks = s.value("extra_disc_blocks", 1);
    c.shadow.is_match_tolerance = s.value("is_match_tolerance", 0.05);
    c.shadow.is_check_interval = s.value("is_check_interval", 1);
    c.shadow.max_epochs = s.value("max_epochs", 50);
    c.shadow.use_sample_pool = s.value("use_sample_pool", false);
    c.shadow.samples_per_epoch = s.value("samples_per_epoch", 1280);
    c.shadow.pool_size = s.value("pool_size", 5120);
    c.shadow.is_n_batches = s.value("is_n_batches", 10);
    c.shadow.is_batch_size = s.value("is_batch_size", 128);

    if (j.contains("classifier")) {
      const json& cl = j.at("classifier");
      c.classifier.max_classes = cl.value("max_classes", 64);
      c.classifier.base_width = cl.value("base_width", 8);
      c.classifier.leaky_slope = cl.value("leaky_slope", 0.2);
      c.classifier.learning_rate = cl.value("learning_rate", 1e-3);
      c.classifier.batch_size = cl.value("batch_size", 64);
      c.classifier.epochs = cl.value("epochs", 40);
    }

    c.metric_ks = j.value("metric_ks", std::vector<int>{20, 200});
    c.is_n_batches = j.value("is_n_batches", 10);
    c.is_batch_size = j.value("is_batch_size", 128);
    c.is_target_source = j.value("is_target_source", "sampled");
    c.out_dir = j.at("out_dir").get<std::string>();
    c.master_seed = j.at("master_seed").get<uint64_t>();
  } catch (const json::exception& e) {
    throw ConfigError("config error in " + path + ": " + e.what());
  }
  c.validate();
  return c;
}

std::string config_hash(const ExperimentConfig& config) {
  std::string text = config_as_json(config).dump();
  uint64_t h = 1469598103934665603ULL;
  for (char ch : text) {
    h ^= static_cast<unsigned char>(ch);
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

uint64_t stage_seed(const ExperimentConfig& config, const std::string& stage,
                    const std::string& split_name) {
  return derive_seed(derive_seed(config.master_seed, stage),
                     split_name.empty() ? "-" : split_name);
}

StageResult run_gen_data(const ExperimentConfig& config, bool force) {
  config.validate();
  if (config.corpus_kind != "synthetic")
    throw ConfigError("gen-data only applies to synthetic corpora");
  auto start = std::chrono::steady_clock::now();

  fs::path root(config.corpus_path);
  if (fs::exists(root) && !fs::is_empty(root)) {
    if (!force)
      throw LoadError("corpus directory not empty (use --force): " +
                      config.corpus_path);
    fs::remove_all(root);
  }
  fs::create_directories(root);

  auto corpus = generate_synthetic_corpus(
      config.synthetic.n_subjects, config.synthetic.n_fingers,
      config.synthetic.n_impressions, config.synthetic.side,
      stage_seed(config, "corpus", ""));
  write_corpus(corpus, config.corpus_path, config.corpus_format);

  StageResult result;
  result.artifacts.push_back(config.corpus_path);
  result.wall_seconds = seconds_since(start);
  return result;
}

StageResult run_train_target(const ExperimentConfig& config,
                             const std::string& split_name) {
  config.validate();
  const SplitSpec& spec = config.split(split_name);
  auto start = std::chrono::steady_clock::now();

  auto corpus = load_configured_corpus(config);

  SplitConfig split_config = spec.config;
  split_config.seed = stage_seed(config, "split", split_name);
  DatasetSplit split = make_split(corpus, split_config);

  fs::path dir = split_dir(config, split_name);
  fs::create_directories(dir);
  save_split_manifest(split, (dir / "split.json").string());

  ClassifierConfig clf_config = config.classifier;
  clf_config.seed = stage_seed(config, "classifier", split_name);
  ConvClassifier classifier = ConvClassifier::train(split.training, clf_config);
  classifier.save((dir / "classifier.ckpt").string());

  GanConfig gan_config = config.target;
  gan_config.seed = stage_seed(config, "target", split_name);
  Tensor training_images = stack_images(split.training);
  BatchSource source = make_corpus_source(training_images,
                                          gan_config.batch_size,
                                          gan_config.seed);
  TargetModel model = train_gan(source, gan_config);
  save_checkpoint(model, (dir / "target.ckpt").string());
  TrainingMeta train_meta = model.meta;

  Sampler sampler = make_sampler(std::move(model));
  IsReport target_is = is_stats(sampler, classifier, config.is_n_batches,
                                config.is_batch_size,
                                stage_seed(config, "is", split_name));
  {
    std::ofstream out(dir / "target_is.json");
    out << is_report_json(target_is).dump(2) << "\n";
  }

  json entry;
  entry["corpus_fingerprint"] = corpus_fingerprint(corpus);
  entry["checkpoint"] = (dir / "target.ckpt").string();
  entry["classifier"] = (dir / "classifier.ckpt").string();
  entry["is_report"] = is_report_json(target_is);
  entry["epochs_run"] = train_meta.epochs_run;
  entry["final_d_loss"] = train_meta.final_d_loss();
  entry["final_g_loss"] = train_meta.final_g_loss();
  entry["final_d_accuracy"] = train_meta.final_d_accuracy();
  entry["wall_seconds"] = seconds_since(start);
  update_manifest(config, split_name, "train_target", entry);

  StageResult result;
  result.artifacts = {(dir / "split.json").string(),
                      (dir / "classifier.ckpt").string(),
                      (dir / "target.ckpt").string(),
                      (dir / "target_is.json").string()};
  result.wall_seconds = seconds_since(start);
  return result;
}

namespace {

// Builds both query datasets, evaluates the shadow on them, and writes the
// two reports plus the distribution CSV. Shared by attack and evaluate.
StageResult evaluate_shadow(const ExperimentConfig& config,
                            const std::string& split_name,
                            const ShadowPair& shadow, uint64_t run_seed,
                            double wall_so_far,
                            std::chrono::steady_clock::time_point start) {
  fs::path dir = split_dir(config, split_name);
  auto corpus = load_configured_corpus(config);
  DatasetSplit split =
      load_split_manifest((dir / "split.json").string(), corpus);

  uint64_t query_seed = derive_seed(run_seed, "query");
  QueryDataset mia =
      build_mia_query(split, split.config.positive_cap, query_seed);
  QueryDataset iia =
      build_iia_query(split, split.config.positive_cap, query_seed);

  AttackReport mia_report =
      attack_report(shadow, mia, config.metric_ks, run_seed);
  AttackReport iia_report =
      attack_report(shadow, iia, config.metric_ks, run_seed);

  {
    std::ofstream out(dir / "report_mia.json");
    out << report_to_json(mia_report);
  }
  {
    std::ofstream out(dir / "report_iia.json");
    out << report_to_json(iia_report);
  }

  std::vector<std::pair<std::string, std::vector<double>>> groups;
  for (const auto& [label, scores] : mia_report.score_groups)
    groups.emplace_back("mia_" + label, scores);
  for (const auto& [label, scores] : iia_report.score_groups)
    groups.emplace_back("iia_" + label, scores);
  export_score_distributions(groups, (dir / "distributions.csv").string());

  json entry;
  entry["seed"] = run_seed;
  entry["reports"] = {(dir / "report_mia.json").string(),
                      (dir / "report_iia.json").string()};
  entry["distributions"] = (dir / "distributions.csv").string();
  entry["is_matched"] = shadow.is_matched();
  entry["wall_seconds"] = wall_so_far + seconds_since(start);
  update_manifest(config, split_name, "attack", entry);

  StageResult result;
  result.artifacts = {(dir / "report_mia.json").string(),
                      (dir / "report_iia.json").string(),
                      (dir / "distributions.csv").string()};
  result.wall_seconds = wall_so_far + seconds_since(start);
  return result;
}

}  // namespace

StageResult run_attack(const ExperimentConfig& config,
                       const std::string& split_name,
                       std::optional<uint64_t> seed_override) {
  config.validate();
  config.split(split_name);
  auto start = std::chrono::steady_clock::now();
  fs::path dir = split_dir(config, split_name);

  uint64_t master = seed_override.value_or(config.master_seed);
  ExperimentConfig seeded = config;
  seeded.master_seed = master;
  uint64_t attack_seed = stage_seed(seeded, "shadow", split_name);

  // The attack side sees the target only through this sampler; the loaded
  // model (and its discriminator) is discarded right here.
  Sampler sampler;
  {
    TargetModel target = load_checkpoint((dir / "target.ckpt").string());
    sampler = make_sampler(std::move(target));
  }
  ConvClassifier classifier =
      ConvClassifier::load((dir / "classifier.ckpt").string());

  double is_target;
  if (config.is_target_source == "real") {
    auto corpus = load_configured_corpus(config);
    DatasetSplit split =
        load_split_manifest((dir / "split.json").string(), corpus);
    Tensor real = stack_images(split.training);
    is_target = inception_score(class_posteriors(classifier, real));
  } else {
    IsReport target_is =
        is_stats(sampler, classifier, config.is_n_batches, config.is_batch_size,
                 stage_seed(seeded, "is_target", split_name));
    is_target = target_is.mean;
  }

  ShadowConfig shadow_config = config.shadow;
  ShadowPair shadow = train_shadow(sampler, shadow_config, classifier,
                                   is_target, attack_seed);
  save_shadow(shadow, (dir / "shadow.ckpt").string(),
              (dir / "shadow_history.json").string());

  StageResult result = evaluate_shadow(config, split_name, shadow,
                                       attack_seed, 0.0, start);
  result.artifacts.insert(result.artifacts.begin(),
                          (dir / "shadow.ckpt").string());
  return result;
}

StageResult run_evaluate(const ExperimentConfig& config,
                         const std::string& split_name,
                         std::optional<uint64_t> seed_override) {
  config.validate();
  config.split(split_name);
  auto start = std::chrono::steady_clock::now();
  fs::path dir = split_dir(config, split_name);

  uint64_t master = seed_override.value_or(config.master_seed);
  ExperimentConfig seeded = config;
  seeded.master_seed = master;
  uint64_t attack_seed = stage_seed(seeded, "shadow", split_name);

  ShadowPair shadow = load_shadow((dir / "shadow.ckpt").string(),
                                  (dir / "shadow_history.json").string());
  return evaluate_shadow(config, split_name, shadow, attack_seed, 0.0, start);
}

ReportTable collect_reports(const std::string& out_dir) {
  ReportTable table;
  if (!fs::is_directory(out_dir)) return table;

  std::vector<fs::path> dirs;
  for (const auto& e : fs::directory_iterator(out_dir))
    if (e.is_directory()) dirs.push_back(e.path());
  std::sort(dirs.begin(), dirs.end());

  for (const auto& dir : dirs) {
    for (const char* name : {"report_mia.json", "report_iia.json"}) {
      fs::path path = dir / name;
      if (!fs::exists(path)) continue;
      std::ifstream in(path);
      std::stringstream buf;
      buf << in.rdbuf();
      AttackReport report;
      try {
        report = report_from_json(buf.str());
      } catch (const std::exception& e) {
        table.warnings.push_back("skipped " + path.string() + ": " + e.what());
        continue;
      }
      ReportRow row;
      row.split = dir.filename().string();
      row.mode = to_string(report.mode);
      if (report.topk_counts.count(20)) {
        row.top20 = report.topk_counts.at(20);
        row.baseline20 = report.baselines.at(20);
      }
      if (report.topk_counts.count(200)) {
        row.top200 = report.topk_counts.at(200);
        row.baseline200 = report.baselines.at(200);
      }
      row.top_half = report.top_fraction;
      row.baseline_half = report.top_fraction_baseline;
      row.is_matched = report.is_matched;
      table.rows.push_back(row);
    }
  }
  return table;
}

namespace {

std::string fraction(std::pair<int, int> v) {
  return std::to_string(v.first) + "/" + std::to_string(v.second);
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", v);
  return buf;
}

}  // namespace

std::string render_report_table(const ReportTable& table) {
  std::ostringstream out;
  if (table.rows.empty()) {
    out << "no attack reports found\n";
  } else {
    out << "split        mode  top-20   top-200   top-50%      baseline(20/200/50%)   is_matched\n";
    for (const auto& r : table.rows) {
      char line[160];
      std::snprintf(line, sizeof(line),
                    "%-12s %-5s %-8s %-9s %-12s %s/%s/%s   %s\n",
                    r.split.c_str(), r.mode.c_str(), fraction(r.top20).c_str(),
                    fraction(r.top200).c_str(), fraction(r.top_half).c_str(),
                    format_double(r.baseline20).c_str(),
                    format_double(r.baseline200).c_str(),
                    format_double(r.baseline_half).c_str(),
                    r.is_matched ? "yes" : "no");
      out << line;
    }
  }
  for (const auto& w : table.warnings) out << "warning: " << w << "\n";
  return out.str();
}

std::string render_report_csv(const ReportTable& table) {
  std::ostringstream out;
  out << "split,mode,top20,top20_of,top200,top200_of,top50,top50_of,"
         "baseline20,baseline200,baseline50,is_matched\n";
  for (const auto& r : table.rows) {
    out << r.split << "," << r.mode << "," << r.top20.first << ","
        << r.top20.second << "," << r.top200.first << "," << r.top200.second
        << "," << r.top_half.first << "," << r.top_half.second << ","
        << r.baseline20 << "," << r.baseline200 << "," << r.baseline_half
        << "," << (r.is_matched ? 1 : 0) << "\n";
  }
  return out.str();
}

}  // namespace ganaudit
