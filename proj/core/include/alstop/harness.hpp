#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "alstop/corpus.hpp"
#include "alstop/engine.hpp"
#include "alstop/stopping.hpp"

namespace alstop {

enum class DatasetKind { kSynthetic, kNewsgroups, kCache };
enum class TaskMode { kMulticlass, kPerCategory };

// One experiment grid: (batch percent x run seed [x category]) curves, each
// scored by every configured stopping method.
struct ExperimentConfig {
  DatasetKind dataset = DatasetKind::kSynthetic;
  std::filesystem::path newsgroups_dir;
  std::filesystem::path cache_file;
  std::filesystem::path stopwords_file;
  int min_count = kDefaultMinCount;
  SynthParams synth;

  TaskMode task_mode = TaskMode::kMulticlass;
  std::vector<double> batch_percents = {1.0, 5.0, 10.0};
  std::vector<int> window_sizes = {3, 1};
  std::vector<double> oracle_percents = {99.0};
  double kappa_threshold = 0.99;
  int stop_set_size = 2000;
  int runs = 10;
  std::uint64_t base_seed = 0;
  TrainConfig train;

  std::filesystem::path output_dir = "out";
};

// One aggregate CSV row: a (method, batch percent[, window]) cell averaged
// over runs and, in per-category mode, over categories.
struct AggregateRow {
  std::string method;
  double batch_percent = 0.0;
  std::optional<int> window_size;
  int n_decisions = 0;
  double mean_annotations = 0.0;
  double sd_annotations = 0.0;
  double mean_f = 0.0;
  double sd_f = 0.0;
  int n_exhausted = 0;
};

// Flat "key = value" config text; '#' starts a comment, unknown keys are
// rejected. apply_config_entry is also how CLI flags override file values.
ExperimentConfig parse_config_text(std::string_view text);
ExperimentConfig load_config_file(const std::filesystem::path& file);
void apply_config_entry(ExperimentConfig& cfg, std::string_view key,
                        std::string_view value);
void validate_config(const ExperimentConfig& cfg);

// Resolves the configured dataset source into corpora.
DataSplit load_dataset(const ExperimentConfig& cfg);

// Evaluates every configured stopping method on one curve: one oracle
// decision per percent, one bv2009 decision per window size.
std::vector<StopDecision> evaluate_stops(const LearningCurve& curve,
                                         const ExperimentConfig& cfg);

// Per-run log file: the serialized curve plus one appended "stop" line per
// decision.
std::string render_stop_line(const StopDecision& decision);
StopDecision parse_stop_line(std::string_view line);
void write_run_log(const std::filesystem::path& file,
                   const LearningCurve& curve,
                   const std::vector<StopDecision>& decisions);

struct RunLog {
  LearningCurve curve;
  std::vector<StopDecision> decisions;
};
RunLog parse_run_log(const std::filesystem::path& file);

// Runs the whole grid on a worker pool (ALSTOP_WORKERS env var, default
// hardware concurrency), writes per-run logs under <output_dir>/logs and the
// aggregate CSV at <output_dir>/aggregate.csv, and returns the rows. The
// aggregate is produced by folding the log files back in, so `report` over
// the same logs reproduces it byte for byte.
std::vector<AggregateRow> run_grid(const ExperimentConfig& cfg);

// Pure fold over *.log files in a directory; output is independent of file
// enumeration order.
std::vector<AggregateRow> aggregate_logs(const std::filesystem::path& log_dir);

// CSV columns: method,batch_percent,window_size,n_decisions,
// mean_annotations,sd_annotations,mean_f,sd_f,n_exhausted
std::string render_csv(const std::vector<AggregateRow>& rows);
void write_csv(const std::vector<AggregateRow>& rows,
               const std::filesystem::path& file);

int worker_count();

}  // namespace alstop
