#include "ganaudit/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "ganaudit/errors.hpp"
#include "ganaudit/image_io.hpp"
#include "ganaudit/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace ganaudit {

void SplitConfig::validate() const {
  if (n_users <= 0) throw std::invalid_argument("n_users must be positive");
  if (n_fingers <= 0) throw std::invalid_argument("n_fingers must be positive");
  if (n_train_impressions <= 0)
    throw std::invalid_argument("n_train_impressions must be positive");
  if (n_total_impressions < n_train_impressions)
    throw std::invalid_argument(
        "n_total_impressions must be >= n_train_impressions");
  if (positive_cap <= 0)
    throw std::invalid_argument("positive_cap must be positive");
}

namespace {

constexpr double kPi = 3.14159265358979323846;

// Latent ridge description of one finger. The field is analytic, so
// impression-level rotations sample it exactly instead of resampling pixels.
struct RidgeField {
  double orientation;  // base ridge direction
  double frequency;    // cycles across the image
  double phase;
  double cx, cy;       // swirl center in normalized coords
  double swirl;        // radial bending of the ridge direction
};

RidgeField make_field(Rng& rng) {
  RidgeField f;
  f.orientation = rng.uniform(0.0, kPi);
  f.frequency = rng.uniform(2.0, 4.0);
  f.phase = rng.uniform(0.0, 2.0 * kPi);
  f.cx = rng.uniform(-0.2, 0.2);
  f.cy = rng.uniform(-0.2, 0.2);
  f.swirl = rng.uniform(-0.35, 0.35);
  return f;
}

float eval_field(const RidgeField& f, double x, double y, double rot) {
  // Rotate the sampling grid (impression-level perturbation).
  double xr = std::cos(rot) * x - std::sin(rot) * y;
  double yr = std::sin(rot) * x + std::cos(rot) * y;
  double dx = xr - f.cx, dy = yr - f.cy;
  double r = std::sqrt(dx * dx + dy * dy);
  double theta = f.orientation + f.swirl * r * 2.0;
  double u = dx * std::cos(theta) + dy * std::sin(theta);
  return static_cast<float>(std::cos(2.0 * kPi * f.frequency * u + f.phase));
}

}  // namespace

std::vector<ImpressionRecord> generate_synthetic_corpus(int n_subjects,
                                                        int n_fingers,
                                                        int n_impressions,
                                                        int side,
                                                        uint64_t seed) {
  if (n_subjects < 1 || n_fingers < 1 || n_impressions < 1)
    throw std::invalid_argument("corpus counts must be >= 1");
  if (side < 16) throw std::invalid_argument("side must be >= 16");

  std::vector<ImpressionRecord> corpus;
  corpus.reserve(static_cast<size_t>(n_subjects) * n_fingers * n_impressions);
  const double max_rot = 10.0 * kPi / 180.0;

  for (int s = 0; s < n_subjects; ++s) {
    for (int f = 0; f < n_fingers; ++f) {
      Rng rng(derive_seed(seed, "finger", static_cast<uint64_t>(s),
                          static_cast<uint64_t>(f)));
      RidgeField field = make_field(rng);
      for (int imp = 0; imp < n_impressions; ++imp) {
        double rot = rng.uniform(-max_rot, max_rot);
        double contrast = rng.uniform(0.85, 1.0);
        ImpressionRecord rec;
        rec.subject_id = s;
        rec.finger_index = f;
        rec.impression_index = imp;
        rec.image = Tensor(1, 1, side, side);
        float* px = rec.image.data.data();
        for (int y = 0; y < side; ++y) {
          double yn = (y + 0.5) / side - 0.5;
          for (int x = 0; x < side; ++x) {
            double xn = (x + 0.5) / side - 0.5;
            float v = static_cast<float>(contrast) * eval_field(field, xn, yn, rot);
            px[static_cast<size_t>(y) * side + x] = std::clamp(v, -1.0f, 1.0f);
          }
        }
        corpus.push_back(std::move(rec));
      }
    }
  }
  return corpus;
}

namespace {

bool parse_indexed_name(const std::string& name, const std::string& prefix,
                        int digits, int* out) {
  if (name.size() != prefix.size() + static_cast<size_t>(digits)) return false;
  if (name.compare(0, prefix.size(), prefix) != 0) return false;
  int v = 0;
  for (int i = 0; i < digits; ++i) {
    char ch = name[prefix.size() + i];
    if (ch < '0' || ch > '9') return false;
    v = v * 10 + (ch - '0');
  }
  *out = v;
  return true;
}

}  // namespace

std::vector<ImpressionRecord> load_corpus(const std::string& root) {
  if (!fs::is_directory(root)) throw LoadError("corpus directory missing: " + root);

  std::vector<ImpressionRecord> corpus;
  int corpus_side = -1;

  std::vector<fs::path> subjects;
  for (const auto& e : fs::directory_iterator(root)) subjects.push_back(e.path());
  std::sort(subjects.begin(), subjects.end());

  for (const auto& sdir : subjects) {
    int subject = -1;
    if (!fs::is_directory(sdir) ||
        !parse_indexed_name(sdir.filename().string(), "subject_", 3, &subject))
      throw LoadError("unexpected entry in corpus: " + sdir.string());
    std::vector<fs::path> fingers;
    for (const auto& e : fs::directory_iterator(sdir)) fingers.push_back(e.path());
    std::sort(fingers.begin(), fingers.end());
    for (const auto& fdir : fingers) {
      int finger = -1;
      if (!fs::is_directory(fdir) ||
          !parse_indexed_name(fdir.filename().string(), "finger_", 1, &finger))
        throw LoadError("unexpected entry in corpus: " + fdir.string());
      std::vector<fs::path> files;
      for (const auto& e : fs::directory_iterator(fdir)) files.push_back(e.path());
      std::sort(files.begin(), files.end());
      for (const auto& file : files) {
        int impression = -1;
        std::string stem = file.stem().string();
        std::string ext = file.extension().string();
        if (!fs::is_regular_file(file) || (ext != ".png" && ext != ".pgm") ||
            !parse_indexed_name(stem, "impression_", 1, &impression))
          throw LoadError("non-conforming corpus file: " + file.string());

        GrayImage img = read_gray_image(file.string());
        if (img.width != img.height) {
          int side = std::min(img.width, img.height);
          img = resample(img, side, side);
        }
        if (corpus_side < 0) corpus_side = img.width;
        if (img.width != corpus_side)
          throw FormatError("mixed image sizes in corpus: " + file.string());

        ImpressionRecord rec;
        rec.subject_id = subject;
        rec.finger_index = finger;
        rec.impression_index = impression;
        rec.image = Tensor(1, 1, corpus_side, corpus_side);
        rec.image.data = to_unit_range(img);
        corpus.push_back(std::move(rec));
      }
    }
  }
  if (corpus.empty()) throw LoadError("empty corpus directory: " + root);
  return corpus;
}

void write_corpus(const std::vector<ImpressionRecord>& corpus,
                  const std::string& root, const std::string& format) {
  if (format != "png" && format != "pgm")
    throw std::invalid_argument("corpus format must be png or pgm");
  for (const auto& rec : corpus) {
    char sub[16], fin[16], imp[32];
    std::snprintf(sub, sizeof(sub), "subject_%03d", rec.subject_id);
    std::snprintf(fin, sizeof(fin), "finger_%d", rec.finger_index);
    std::snprintf(imp, sizeof(imp), "impression_%d.%s", rec.impression_index,
                  format.c_str());
    fs::path dir = fs::path(root) / sub / fin;
    fs::create_directories(dir);
    GrayImage img = from_unit_range(rec.image.data, rec.side(), rec.side());
    write_gray_image((dir / imp).string(), img);
  }
}

long split_size(int n_users, int n_fingers, int n_fingerprints) {
  if (n_users < 1 || n_fingers < 1 || n_fingerprints < 1)
    throw std::invalid_argument("split_size arguments must be >= 1");
  return static_cast<long>(n_users) * n_fingers * n_fingerprints;
}

DatasetSplit make_split(const std::vector<ImpressionRecord>& corpus,
                        const SplitConfig& config) {
  config.validate();

  // Index by subject -> finger -> impression, keeping only the coordinates
  // the config asks for.
  std::map<int, std::map<int, std::map<int, const ImpressionRecord*>>> by_subject;
  for (const auto& rec : corpus) {
    if (rec.finger_index >= config.n_fingers) continue;
    if (rec.impression_index >= config.n_total_impressions) continue;
    by_subject[rec.subject_id][rec.finger_index][rec.impression_index] = &rec;
  }

  std::vector<int> eligible;
  for (const auto& [subject, fingers] : by_subject) {
    if (static_cast<int>(fingers.size()) != config.n_fingers) continue;
    bool complete = true;
    for (const auto& [_, imps] : fingers)
      if (static_cast<int>(imps.size()) != config.n_total_impressions)
        complete = false;
    if (complete) eligible.push_back(subject);
  }

  const int needed = 2 * config.n_users;
  if (static_cast<int>(eligible.size()) < needed)
    throw SplitError("insufficient complete subjects: required " +
                     std::to_string(needed) + ", available " +
                     std::to_string(eligible.size()));

  Rng rng(derive_seed(config.seed, "subject_selection"));
  rng.shuffle(eligible);
  std::vector<int> members(eligible.begin(), eligible.begin() + config.n_users);
  std::vector<int> outsiders(eligible.begin() + config.n_users,
                             eligible.begin() + needed);
  std::sort(members.begin(), members.end());
  std::sort(outsiders.begin(), outsiders.end());

  DatasetSplit split;
  split.config = config;
  for (int subject : members) {
    for (const auto& [finger, imps] : by_subject[subject]) {
      for (const auto& [imp, rec] : imps) {
        if (imp < config.n_train_impressions)
          split.training.push_back(*rec);
        else
          split.identity_holdout.push_back(*rec);
      }
    }
  }
  for (int subject : outsiders)
    for (const auto& [finger, imps] : by_subject[subject])
      for (const auto& [imp, rec] : imps) split.non_member.push_back(*rec);
  return split;
}

namespace {

json triples_json(const std::vector<ImpressionRecord>& records) {
  json arr = json::array();
  for (const auto& r : records)
    arr.push_back({r.subject_id, r.finger_index, r.impression_index});
  return arr;
}

}  // namespace

void save_split_manifest(const DatasetSplit& split, const std::string& path) {
  json j;
  j["config"] = {{"n_users", split.config.n_users},
                 {"n_fingers", split.config.n_fingers},
                 {"n_train_impressions", split.config.n_train_impressions},
                 {"n_total_impressions", split.config.n_total_impressions},
                 {"positive_cap", split.config.positive_cap},
                 {"seed", split.config.seed}};
  j["training"] = triples_json(split.training);
  j["identity_holdout"] = triples_json(split.identity_holdout);
  j["non_member"] = triples_json(split.non_member);
  std::ofstream out(path);
  if (!out) throw LoadError("cannot write split manifest: " + path);
  out << j.dump(2) << "\n";
}

DatasetSplit load_split_manifest(const std::string& path,
                                 const std::vector<ImpressionRecord>& corpus) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot read split manifest: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw FormatError("bad split manifest " + path + ": " + e.what());
  }

  std::map<std::tuple<int, int, int>, const ImpressionRecord*> index;
  for (const auto& rec : corpus)
    index[{rec.subject_id, rec.finger_index, rec.impression_index}] = &rec;

  auto resolve = [&](const json& arr, std::vector<ImpressionRecord>& out) {
    for (const auto& t : arr) {
      std::tuple<int, int, int> key{t.at(0).get<int>(), t.at(1).get<int>(),
                                    t.at(2).get<int>()};
      auto it = index.find(key);
      if (it == index.end())
        throw SplitError("manifest references missing record (" +
                         std::to_string(std::get<0>(key)) + "," +
                         std::to_string(std::get<1>(key)) + "," +
                         std::to_string(std::get<2>(key)) + ")");
      out.push_back(*it->second);
    }
  };

  DatasetSplit split;
  try {
    const json& c = j.at("config");
    split.config.n_users = c.at("n_users").get<int>();
    split.config.n_fingers = c.at("n_fingers").get<int>();
    split.config.n_train_impressions = c.at("n_train_impressions").get<int>();
    split.config.n_total_impressions = c.at("n_total_impressions").get<int>();
    split.config.positive_cap = c.at("positive_cap").get<int>();
    split.config.seed = c.at("seed").get<uint64_t>();
    resolve(j.at("training"), split.training);
    resolve(j.at("identity_holdout"), split.identity_holdout);
    resolve(j.at("non_member"), split.non_member);
  } catch (const json::exception& e) {
    throw FormatError("bad split manifest " + path + ": " + e.what());
  }
  return split;
}

Tensor stack_images(const std::vector<ImpressionRecord>& records) {
  if (records.empty()) return Tensor();
  int side = records[0].side();
  Tensor out(static_cast<int>(records.size()), 1, side, side);
  for (size_t i = 0; i < records.size(); ++i) {
    if (records[i].side() != side)
      throw std::invalid_argument("stack_images: mixed sides");
    std::copy(records[i].image.data.begin(), records[i].image.data.end(),
              out.data.begin() + i * out.per_sample());
  }
  return out;
}

}  // namespace ganaudit
