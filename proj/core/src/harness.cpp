#include "alstop/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>
#include <tuple>

#include "alstop/format.hpp"

namespace alstop {

namespace fs = std::filesystem;

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' ||
                        s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' ||
                        s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_list(std::string_view value) {
  std::vector<std::string_view> items;
  std::size_t pos = 0;
  while (pos <= value.size()) {
    std::size_t comma = value.find(',', pos);
    if (comma == std::string_view::npos) comma = value.size();
    const auto item = trim(value.substr(pos, comma - pos));
    if (!item.empty()) items.push_back(item);
    pos = comma + 1;
  }
  return items;
}

double cfg_double(std::string_view key, std::string_view value) {
  try {
    return parse_double(value);
  } catch (const Error&) {
    throw ConfigError("key '" + std::string(key) + "': bad number '" +
                      std::string(value) + "'");
  }
}

long long cfg_int(std::string_view key, std::string_view value) {
  try {
    return parse_int(value);
  } catch (const Error&) {
    throw ConfigError("key '" + std::string(key) + "': bad integer '" +
                      std::string(value) + "'");
  }
}

std::uint64_t cfg_uint64(std::string_view key, std::string_view value) {
  try {
    return parse_uint64(value);
  } catch (const Error&) {
    throw ConfigError("key '" + std::string(key) + "': bad seed '" +
                      std::string(value) + "'");
  }
}

}  // namespace

void apply_config_entry(ExperimentConfig& cfg, std::string_view key,
                        std::string_view value) {
  if (key == "dataset") {
    if (value == "synthetic") {
      cfg.dataset = DatasetKind::kSynthetic;
    } else if (value == "newsgroups") {
      cfg.dataset = DatasetKind::kNewsgroups;
    } else if (value == "cache") {
      cfg.dataset = DatasetKind::kCache;
    } else {
      throw ConfigError("dataset must be synthetic, newsgroups or cache");
    }
  } else if (key == "newsgroups_dir") {
    cfg.newsgroups_dir = fs::path(std::string(value));
  } else if (key == "cache_file") {
    cfg.cache_file = fs::path(std::string(value));
  } else if (key == "stopwords") {
    cfg.stopwords_file = fs::path(std::string(value));
  } else if (key == "min_count") {
    cfg.min_count = static_cast<int>(cfg_int(key, value));
  } else if (key == "synth_classes") {
    cfg.synth.classes = static_cast<int>(cfg_int(key, value));
  } else if (key == "synth_vocab") {
    cfg.synth.vocab_size = static_cast<int>(cfg_int(key, value));
  } else if (key == "synth_docs") {
    cfg.synth.docs = static_cast<int>(cfg_int(key, value));
  } else if (key == "synth_doc_len") {
    cfg.synth.doc_length = static_cast<int>(cfg_int(key, value));
  } else if (key == "synth_skew") {
    cfg.synth.skew = cfg_double(key, value);
  } else if (key == "synth_seed") {
    cfg.synth.seed = cfg_uint64(key, value);
  } else if (key == "task_mode") {
    if (value == "multiclass") {
      cfg.task_mode = TaskMode::kMulticlass;
    } else if (value == "per_category") {
      cfg.task_mode = TaskMode::kPerCategory;
    } else {
      throw ConfigError("task_mode must be multiclass or per_category");
    }
  } else if (key == "batch_percents") {
    cfg.batch_percents.clear();
    for (const auto item : split_list(value)) {
      cfg.batch_percents.push_back(cfg_double(key, item));
    }
  } else if (key == "window_sizes") {
    cfg.window_sizes.clear();
    for (const auto item : split_list(value)) {
      cfg.window_sizes.push_back(static_cast<int>(cfg_int(key, item)));
    }
  } else if (key == "oracle_percents") {
    cfg.oracle_percents.clear();
    for (const auto item : split_list(value)) {
      cfg.oracle_percents.push_back(cfg_double(key, item));
    }
  } else if (key == "kappa_threshold") {
    cfg.kappa_threshold = cfg_double(key, value);
  } else if (key == "stop_set_size") {
    cfg.stop_set_size = static_cast<int>(cfg_int(key, value));
  } else if (key == "runs") {
    cfg.runs = static_cast<int>(cfg_int(key, value));
  } else if (key == "seed") {
    cfg.base_seed = cfg_uint64(key, value);
  } else if (key == "svm_c") {
    cfg.train.c = cfg_double(key, value);
  } else if (key == "svm_tol") {
    cfg.train.tol = cfg_double(key, value);
  } else if (key == "svm_max_epochs") {
    cfg.train.max_epochs = static_cast<int>(cfg_int(key, value));
  } else if (key == "shuffle_seed") {
    cfg.train.shuffle_seed = cfg_uint64(key, value);
  } else if (key == "output_dir") {
    cfg.output_dir = fs::path(std::string(value));
  } else {
    throw ConfigError("unknown config key '" + std::string(key) + "'");
  }
}

ExperimentConfig parse_config_text(std::string_view text) {
  ExperimentConfig cfg;
  std::size_t pos = 0;
  int line_no = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) +
                        ": expected 'key = value'");
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    }
    try {
      apply_config_entry(cfg, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return cfg;
}

ExperimentConfig load_config_file(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot open config file: " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("read failure: " + file.string());
  return parse_config_text(buf.str());
}

void validate_config(const ExperimentConfig& cfg) {
  if (cfg.batch_percents.empty()) {
    throw ConfigError("batch_percents must not be empty");
  }
  for (const double p : cfg.batch_percents) {
    if (!(p > 0.0) || p > 100.0) {
      throw ConfigError("batch percent " + format_double(p) +
                        " outside (0, 100]");
    }
  }
  if (cfg.window_sizes.empty()) {
    throw ConfigError("window_sizes must not be empty");
  }
  for (const int n : cfg.window_sizes) {
    if (n < 1) throw ConfigError("window size must be >= 1");
  }
  if (cfg.oracle_percents.empty()) {
    throw ConfigError("oracle_percents must not be empty");
  }
  for (const double p : cfg.oracle_percents) {
    if (!(p > 0.0) || p > 100.0) {
      throw ConfigError("oracle percent " + format_double(p) +
                        " outside (0, 100]");
    }
  }
  if (!(cfg.kappa_threshold > 0.0) || cfg.kappa_threshold > 1.0) {
    throw ConfigError("kappa_threshold outside (0, 1]");
  }
  if (cfg.stop_set_size < 1) throw ConfigError("stop_set_size must be >= 1");
  if (cfg.runs < 1) throw ConfigError("runs must be >= 1");
  if (cfg.min_count < 1) throw ConfigError("min_count must be >= 1");
  if (!(cfg.train.c > 0.0)) throw ConfigError("svm_c must be > 0");
  if (!(cfg.train.tol > 0.0)) throw ConfigError("svm_tol must be > 0");
  if (cfg.train.max_epochs < 1) throw ConfigError("svm_max_epochs must be >= 1");
  if (cfg.dataset == DatasetKind::kNewsgroups && cfg.newsgroups_dir.empty()) {
    throw ConfigError("dataset=newsgroups needs newsgroups_dir");
  }
  if (cfg.dataset == DatasetKind::kCache && cfg.cache_file.empty()) {
    throw ConfigError("dataset=cache needs cache_file");
  }
}

DataSplit load_dataset(const ExperimentConfig& cfg) {
  switch (cfg.dataset) {
    case DatasetKind::kSynthetic:
      return generate_synthetic(cfg.synth);
    case DatasetKind::kCache:
      return load_corpus_file(cfg.cache_file);
    case DatasetKind::kNewsgroups: {
      const StopwordSet stopwords = cfg.stopwords_file.empty()
                                        ? StopwordSet{}
                                        : load_stopwords(cfg.stopwords_file);
      return load_newsgroups(cfg.newsgroups_dir, stopwords, cfg.min_count);
    }
  }
  throw ConfigError("unhandled dataset kind");
}

std::vector<StopDecision> evaluate_stops(const LearningCurve& curve,
                                         const ExperimentConfig& cfg) {
  std::vector<StopDecision> decisions;
  decisions.reserve(cfg.oracle_percents.size() + cfg.window_sizes.size());
  for (const double percent : cfg.oracle_percents) {
    decisions.push_back(oracle_stop(curve, OracleParams{percent}));
  }
  for (const int window : cfg.window_sizes) {
    decisions.push_back(
        bv2009_stop(curve, BV2009Params{window, cfg.kappa_threshold}));
  }
  return decisions;
}

std::string render_stop_line(const StopDecision& decision) {
  std::string line = "stop method=" + decision.method;
  if (decision.window) line += " window=" + std::to_string(*decision.window);
  if (decision.threshold) line += " threshold=" + format_double(*decision.threshold);
  if (decision.percent) line += " percent=" + format_double(*decision.percent);
  line += " t=";
  line += decision.stop_iteration ? std::to_string(*decision.stop_iteration)
                                  : std::string("-");
  line += " annotations=" + std::to_string(decision.annotations);
  line += " f=" + format_double(decision.f);
  line += " exhausted=" + std::string(decision.exhausted ? "1" : "0");
  return line;
}

StopDecision parse_stop_line(std::string_view line) {
  line = trim(line);
  if (!line.starts_with("stop ")) {
    throw IoError("not a stop line: '" + std::string(line) + "'");
  }
  StopDecision decision;
  std::size_t pos = 5;
  while (pos < line.size()) {
    while (pos < line.size() && line[pos] == ' ') ++pos;
    if (pos >= line.size()) break;
    std::size_t end = line.find(' ', pos);
    if (end == std::string_view::npos) end = line.size();
    const auto field = line.substr(pos, end - pos);
    pos = end;

    const auto eq = field.find('=');
    if (eq == std::string_view::npos) {
      throw IoError("bad stop field '" + std::string(field) + "'");
    }
    const auto key = field.substr(0, eq);
    const auto value = field.substr(eq + 1);
    if (key == "method") {
      decision.method = std::string(value);
    } else if (key == "window") {
      decision.window = static_cast<int>(parse_int(value));
    } else if (key == "threshold") {
      decision.threshold = parse_double(value);
    } else if (key == "percent") {
      decision.percent = parse_double(value);
    } else if (key == "t") {
      if (value != "-") decision.stop_iteration = static_cast<int>(parse_int(value));
    } else if (key == "annotations") {
      decision.annotations = static_cast<int>(parse_int(value));
    } else if (key == "f") {
      decision.f = parse_double(value);
    } else if (key == "exhausted") {
      decision.exhausted = value == "1";
    } else {
      throw IoError("unknown stop field '" + std::string(key) + "'");
    }
  }
  if (decision.method.empty()) {
    throw IoError("stop line without method: '" + std::string(line) + "'");
  }
  return decision;
}

void write_run_log(const fs::path& file, const LearningCurve& curve,
                   const std::vector<StopDecision>& decisions) {
  std::string text = serialize_curve(curve);
  for (const auto& decision : decisions) {
    text += render_stop_line(decision);
    text += '\n';
  }
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open log file: " + file.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("write failure: " + file.string());
}

RunLog parse_run_log(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot open log file: " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("read failure: " + file.string());
  const std::string text = std::move(buf).str();

  RunLog log;
  log.curve = parse_curve(text);
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    const std::string_view line = trim(
        std::string_view(text).substr(pos, eol - pos));
    pos = eol + 1;
    if (line.starts_with("stop ")) {
      log.decisions.push_back(parse_stop_line(line));
    }
  }
  return log;
}

int worker_count() {
  if (const char* env = std::getenv("ALSTOP_WORKERS")) {
    int workers = 0;
    try {
      workers = static_cast<int>(parse_int(env));
    } catch (const Error&) {
      throw ConfigError("ALSTOP_WORKERS is not an integer: '" +
                        std::string(env) + "'");
    }
    if (workers < 1) throw ConfigError("ALSTOP_WORKERS must be >= 1");
    return workers;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

namespace {

std::string batch_tag(double percent) {
  std::string tag = format_double(percent);
  for (auto& ch : tag) {
    if (ch == '.') ch = 'p';
  }
  return tag;
}

std::string log_file_name(double batch_percent, std::uint64_t seed,
                          int task_index) {
  std::string name = "curve_b" + batch_tag(batch_percent) + "_s" +
                     std::to_string(seed) + "_";
  if (task_index < 0) {
    name += "all";
  } else {
    char buf[16];
    std::snprintf(buf, sizeof buf, "cat%03d", task_index);
    name += buf;
  }
  return name + ".log";
}

// One decision plus everything needed to group and order it reproducibly.
struct Contribution {
  std::string method;
  int window = -1;  // -1: no window (oracle)
  double batch_percent = 0.0;
  std::string task;
  std::uint64_t seed = 0;
  int annotations = 0;
  double f = 0.0;
  bool exhausted = false;

  auto group_key() const { return std::tie(method, window, batch_percent); }
  auto sort_key() const {
    return std::tie(method, window, batch_percent, task, seed);
  }
};

}  // namespace

std::vector<AggregateRow> aggregate_logs(const fs::path& log_dir) {
  std::error_code ec;
  if (!fs::is_directory(log_dir, ec) || ec) {
    throw IoError("not a log directory: " + log_dir.string());
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(log_dir, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == ".log") {
      files.push_back(entry.path());
    }
  }
  if (ec) throw IoError("cannot list " + log_dir.string());
  if (files.empty()) {
    throw IoError("no .log files under " + log_dir.string());
  }

  std::vector<Contribution> contributions;
  for (const auto& file : files) {
    const RunLog log = parse_run_log(file);
    for (const auto& decision : log.decisions) {
      Contribution c;
      c.method = decision.method;
      c.window = decision.window.value_or(-1);
      c.batch_percent = log.curve.config.batch_percent;
      c.task = log.curve.task;
      c.seed = log.curve.config.seed;
      c.annotations = decision.annotations;
      c.f = decision.f;
      c.exhausted = decision.exhausted;
      contributions.push_back(std::move(c));
    }
  }
  // Canonical order makes the fold independent of file enumeration order.
  std::sort(contributions.begin(), contributions.end(),
            [](const Contribution& a, const Contribution& b) {
              return a.sort_key() < b.sort_key();
            });

  std::vector<AggregateRow> rows;
  std::size_t i = 0;
  while (i < contributions.size()) {
    std::size_t j = i;
    while (j < contributions.size() &&
           contributions[j].group_key() == contributions[i].group_key()) {
      ++j;
    }
    const auto n = static_cast<double>(j - i);
    AggregateRow row;
    row.method = contributions[i].method;
    row.batch_percent = contributions[i].batch_percent;
    if (contributions[i].window >= 0) row.window_size = contributions[i].window;
    row.n_decisions = static_cast<int>(j - i);

    double sum_ann = 0.0;
    double sum_f = 0.0;
    for (std::size_t k = i; k < j; ++k) {
      sum_ann += static_cast<double>(contributions[k].annotations);
      sum_f += contributions[k].f;
      if (contributions[k].exhausted) ++row.n_exhausted;
    }
    row.mean_annotations = sum_ann / n;
    row.mean_f = sum_f / n;
    double ss_ann = 0.0;
    double ss_f = 0.0;
    for (std::size_t k = i; k < j; ++k) {
      const double da =
          static_cast<double>(contributions[k].annotations) - row.mean_annotations;
      const double df = contributions[k].f - row.mean_f;
      ss_ann += da * da;
      ss_f += df * df;
    }
    if (j - i > 1) {
      row.sd_annotations = std::sqrt(ss_ann / (n - 1.0));
      row.sd_f = std::sqrt(ss_f / (n - 1.0));
    }
    rows.push_back(std::move(row));
    i = j;
  }

  // Rows ordered by (method, batch_percent, window).
  std::sort(rows.begin(), rows.end(),
            [](const AggregateRow& a, const AggregateRow& b) {
              return std::tie(a.method, a.batch_percent, a.window_size) <
                     std::tie(b.method, b.batch_percent, b.window_size);
            });
  return rows;
}

std::string render_csv(const std::vector<AggregateRow>& rows) {
  std::string out =
      "method,batch_percent,window_size,n_decisions,mean_annotations,"
      "sd_annotations,mean_f,sd_f,n_exhausted\n";
  for (const auto& row : rows) {
    out += row.method;
    out += ',' + format_double(row.batch_percent);
    out += ',';
    if (row.window_size) out += std::to_string(*row.window_size);
    out += ',' + std::to_string(row.n_decisions);
    out += ',' + format_double(row.mean_annotations);
    out += ',' + format_double(row.sd_annotations);
    out += ',' + format_double(row.mean_f);
    out += ',' + format_double(row.sd_f);
    out += ',' + std::to_string(row.n_exhausted);
    out += '\n';
  }
  return out;
}

void write_csv(const std::vector<AggregateRow>& rows, const fs::path& file) {
  const std::string text = render_csv(rows);
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open CSV file: " + file.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("write failure: " + file.string());
}

std::vector<AggregateRow> run_grid(const ExperimentConfig& cfg) {
  validate_config(cfg);

  const DataSplit base = load_dataset(cfg);
  std::vector<DataSplit> tasks;
  std::vector<int> task_indices;
  if (cfg.task_mode == TaskMode::kMulticlass) {
    tasks.push_back(base);
    task_indices.push_back(-1);
  } else {
    const int num_classes = base.train.num_classes();
    tasks.reserve(static_cast<std::size_t>(num_classes));
    for (int c = 0; c < num_classes; ++c) {
      tasks.push_back(to_binary_task(base, c));
      task_indices.push_back(c);
    }
  }

  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  if (ec) throw IoError("cannot create " + cfg.output_dir.string());
  const fs::path log_dir = cfg.output_dir / "logs";
  if (fs::exists(log_dir)) {
    for (const auto& entry : fs::directory_iterator(log_dir)) {
      if (entry.path().extension() == ".log") {
        throw ConfigError("log directory not empty: " + log_dir.string());
      }
    }
  } else {
    fs::create_directories(log_dir, ec);
    if (ec) throw IoError("cannot create " + log_dir.string());
  }

  struct Cell {
    std::size_t task = 0;
    double batch_percent = 0.0;
    int run = 0;
  };
  std::vector<Cell> cells;
  for (const double bp : cfg.batch_percents) {
    for (int run = 0; run < cfg.runs; ++run) {
      for (std::size_t task = 0; task < tasks.size(); ++task) {
        cells.push_back(Cell{task, bp, run});
      }
    }
  }

  // Cells only touch their own log file, so any schedule produces the same
  // set of files.
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::string first_error;
  const auto work = [&] {
    for (std::size_t c = next.fetch_add(1); c < cells.size();
         c = next.fetch_add(1)) {
      const Cell& cell = cells[c];
      try {
        ALConfig al;
        al.batch_percent = cell.batch_percent;
        al.stop_set_size = cfg.stop_set_size;
        al.seed = cfg.base_seed + static_cast<std::uint64_t>(cell.run);
        al.train = cfg.train;
        al.fit_threads = 1;
        const DataSplit& data = tasks[cell.task];
        const LearningCurve curve = run(data.train, data.test, al);
        const auto decisions = evaluate_stops(curve, cfg);
        write_run_log(log_dir / log_file_name(cell.batch_percent, al.seed,
                                              task_indices[cell.task]),
                      curve, decisions);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (first_error.empty()) {
          first_error = "grid cell (batch=" + format_double(cell.batch_percent) +
                        ", run=" + std::to_string(cell.run) + ", task=" +
                        std::to_string(task_indices[cell.task]) +
                        ") failed: " + e.what();
        }
      }
    }
  };

  const int workers = std::clamp<int>(worker_count(), 1,
                                      static_cast<int>(cells.size()));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (!first_error.empty()) throw Error(first_error);

  const auto rows = aggregate_logs(log_dir);
  write_csv(rows, cfg.output_dir / "aggregate.csv");
  return rows;
}

}  // namespace alstop
