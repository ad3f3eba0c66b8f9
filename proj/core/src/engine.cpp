#include "alstop/engine.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "alstop/format.hpp"
#include "alstop/rng.hpp"
#include "alstop/sampling.hpp"

namespace alstop {

int derive_batch_size(double batch_percent, int pool_size) {
  if (!(batch_percent > 0.0) || batch_percent > 100.0) {
    throw InvalidParams("batch_percent must be in (0, 100]");
  }
  if (pool_size < 1) throw InvalidParams("pool is empty");
  const int batch = static_cast<int>(
      std::ceil(batch_percent / 100.0 * static_cast<double>(pool_size)));
  return std::max(1, std::min(batch, pool_size));
}

std::vector<int> stop_set_select(const std::vector<SparseDoc>& pool, int size,
                                 std::uint64_t seed) {
  return select_random(pool, size, seed);
}

LearningCurve run(const Corpus& train, const Corpus& test,
                  const ALConfig& cfg) {
  if (train.docs.empty()) throw EmptyInput("training pool is empty");
  if (test.docs.empty()) throw EmptyInput("test corpus is empty");
  if (train.num_classes() != test.num_classes() ||
      train.num_classes() < 2) {
    throw InvalidParams("train/test class mismatch");
  }
  if (cfg.stop_set_size < 1) throw InvalidParams("stop_set_size must be >= 1");

  const int num_classes = train.num_classes();
  const int vocab_size = train.vocabulary.size();
  const int pool_size = static_cast<int>(train.docs.size());
  const int batch_size = derive_batch_size(cfg.batch_percent, pool_size);

  LearningCurve curve;
  curve.config = cfg;
  curve.fingerprint = corpus_fingerprint(DataSplit{train, test});
  curve.pool_size = pool_size;
  curve.batch_size = batch_size;
  curve.num_classes = num_classes;
  curve.task = train.num_classes() == 2 && train.class_names.front() == "rest"
                   ? "binary:" + train.class_names.back()
                   : "multiclass";

  // The stop set is a fixed subset of the initial pool; membership never
  // blocks annotation, so the sampling pool is unaffected.
  const int stop_size = std::min(cfg.stop_set_size, pool_size);
  const std::vector<int> stop_ids =
      stop_set_select(train.docs, stop_size, mix_seed(cfg.seed, 1));
  std::vector<const SparseDoc*> stop_docs;
  stop_docs.reserve(stop_ids.size());
  {
    const std::unordered_set<int> wanted(stop_ids.begin(), stop_ids.end());
    for (const auto& doc : train.docs) {
      if (wanted.contains(doc.doc_id)) {
        stop_docs.push_back(&doc);
      }
    }
    std::sort(stop_docs.begin(), stop_docs.end(),
              [](const SparseDoc* a, const SparseDoc* b) {
                return a->doc_id < b->doc_id;
              });
  }

  std::vector<int> test_golds;
  test_golds.reserve(test.docs.size());
  for (const auto& doc : test.docs) test_golds.push_back(doc.label);

  std::vector<SparseDoc> pool = train.docs;
  std::vector<SparseDoc> labeled;
  labeled.reserve(train.docs.size());

  const auto annotate = [&](const std::vector<int>& ids) {
    std::unordered_map<int, std::size_t> slot_of;
    slot_of.reserve(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) slot_of.emplace(ids[i], i);
    // Keep the selection order for the labeled list so runs replay exactly.
    std::vector<SparseDoc> remaining;
    remaining.reserve(pool.size() - ids.size());
    std::vector<SparseDoc> picked(ids.size());
    for (auto& doc : pool) {
      if (const auto it = slot_of.find(doc.doc_id); it != slot_of.end()) {
        picked[it->second] = std::move(doc);
      } else {
        remaining.push_back(std::move(doc));
      }
    }
    pool = std::move(remaining);
    for (auto& doc : picked) labeled.push_back(std::move(doc));
  };

  annotate(select_random(pool, batch_size, mix_seed(cfg.seed, 2)));

  std::vector<int> prev_stop_preds;
  int t = 0;
  while (true) {
    TrainConfig iter_cfg = cfg.train;
    iter_cfg.shuffle_seed =
        mix_seed(cfg.seed ^ cfg.train.shuffle_seed, 16 + static_cast<std::uint64_t>(t));
    ModelSnapshot model = fit_partial(labeled, vocab_size, num_classes,
                                      iter_cfg, nullptr, cfg.fit_threads);
    model.iteration = t;

    IterationRecord record;
    record.t = t;
    record.annotations = static_cast<int>(labeled.size());

    std::vector<int> test_preds;
    test_preds.reserve(test.docs.size());
    for (const auto& doc : test.docs) test_preds.push_back(predict(model, doc));
    record.f = f_measure(test_preds, test_golds, num_classes);

    record.stop_predictions.reserve(stop_docs.size());
    for (const auto* doc : stop_docs) {
      record.stop_predictions.push_back(predict(model, *doc));
    }
    if (t >= 1) {
      record.kappa =
          cohens_kappa(prev_stop_preds, record.stop_predictions, num_classes);
    }
    prev_stop_preds = record.stop_predictions;
    curve.records.push_back(std::move(record));

    if (pool.empty()) break;
    const int take = std::min(batch_size, static_cast<int>(pool.size()));
    annotate(select_closest(model, pool, take));
    ++t;
  }
  return curve;
}

std::string serialize_curve(const LearningCurve& curve) {
  std::string out;
  out += "# alstop-curve v1\n";
  out += "# fingerprint " + curve.fingerprint + '\n';
  out += "# task " + curve.task + '\n';
  out += "# num_classes " + std::to_string(curve.num_classes) + '\n';
  out += "# pool " + std::to_string(curve.pool_size) + '\n';
  out += "# batch_percent " + format_double(curve.config.batch_percent) + '\n';
  out += "# batch_size " + std::to_string(curve.batch_size) + '\n';
  out += "# stop_set_size " + std::to_string(curve.config.stop_set_size) + '\n';
  out += "# seed " + std::to_string(curve.config.seed) + '\n';
  out += "# shuffle_seed " + std::to_string(curve.config.train.shuffle_seed) + '\n';
  out += "# svm_c " + format_double(curve.config.train.c) + '\n';
  out += "# svm_tol " + format_double(curve.config.train.tol) + '\n';
  out += "# svm_max_epochs " + std::to_string(curve.config.train.max_epochs) + '\n';
  out += "# columns t annotations f kappa\n";
  for (const auto& record : curve.records) {
    out += std::to_string(record.t) + ' ' +
           std::to_string(record.annotations) + ' ' + format_double(record.f) +
           ' ' + (record.kappa ? format_double(record.kappa->kappa) : "NA") +
           '\n';
  }
  return out;
}

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
    if (pos >= line.size()) break;
    std::size_t end = pos;
    while (end < line.size() && line[end] != ' ' && line[end] != '\t') ++end;
    fields.push_back(line.substr(pos, end - pos));
    pos = end;
  }
  return fields;
}

}  // namespace

LearningCurve parse_curve(std::string_view text) {
  LearningCurve curve;
  bool saw_version = false;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, eol == std::string_view::npos
                             ? std::string_view::npos
                             : eol - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    if (line.empty()) continue;

    if (line.starts_with("#")) {
      if (line == "# alstop-curve v1") {
        saw_version = true;
        continue;
      }
      const auto fields = split_ws(line.substr(1));
      if (fields.size() < 2) continue;
      const std::string_view key = fields[0];
      const std::string_view value = fields[1];
      if (key == "fingerprint") {
        curve.fingerprint = std::string(value);
      } else if (key == "task") {
        curve.task = std::string(value);
      } else if (key == "num_classes") {
        curve.num_classes = static_cast<int>(parse_int(value));
      } else if (key == "pool") {
        curve.pool_size = static_cast<int>(parse_int(value));
      } else if (key == "batch_percent") {
        curve.config.batch_percent = parse_double(value);
      } else if (key == "batch_size") {
        curve.batch_size = static_cast<int>(parse_int(value));
      } else if (key == "stop_set_size") {
        curve.config.stop_set_size = static_cast<int>(parse_int(value));
      } else if (key == "seed") {
        curve.config.seed = parse_uint64(value);
      } else if (key == "shuffle_seed") {
        curve.config.train.shuffle_seed = parse_uint64(value);
      } else if (key == "svm_c") {
        curve.config.train.c = parse_double(value);
      } else if (key == "svm_tol") {
        curve.config.train.tol = parse_double(value);
      } else if (key == "svm_max_epochs") {
        curve.config.train.max_epochs = static_cast<int>(parse_int(value));
      }
      // "columns" and unknown keys are informational.
      continue;
    }
    if (line.starts_with("stop ")) continue;  // appended decisions, not ours

    const auto fields = split_ws(line);
    if (fields.size() != 4) {
      throw IoError("curve file: bad record line '" + std::string(line) + "'");
    }
    IterationRecord record;
    record.t = static_cast<int>(parse_int(fields[0]));
    record.annotations = static_cast<int>(parse_int(fields[1]));
    record.f = parse_double(fields[2]);
    if (fields[3] != "NA") {
      KappaValue kappa;
      kappa.kappa = parse_double(fields[3]);
      kappa.observed = std::numeric_limits<double>::quiet_NaN();
      kappa.expected = std::numeric_limits<double>::quiet_NaN();
      record.kappa = kappa;
    }
    curve.records.push_back(std::move(record));
  }
  if (!saw_version) {
    throw IoError("curve file: missing version header");
  }
  return curve;
}

void save_curve(const LearningCurve& curve, const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open curve file: " + file.string());
  const std::string text = serialize_curve(curve);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("write failure: " + file.string());
}

LearningCurve load_curve_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot open curve file: " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("read failure: " + file.string());
  return parse_curve(std::move(buf).str());
}

}  // namespace alstop
