// Command-line front end: build corpora, run single active-learning curves,
// run full experiment grids, and re-aggregate existing run logs.

#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "alstop/corpus.hpp"
#include "alstop/engine.hpp"
#include "alstop/format.hpp"
#include "alstop/harness.hpp"
#include "alstop/stopping.hpp"

namespace {

namespace fs = std::filesystem;

constexpr const char* kConfigKeyHelp = R"(Config file keys (flat 'key = value' lines, '#' comments):
  dataset           synthetic | newsgroups | cache
  newsgroups_dir    root of a <root>/{train,test}/<category>/<file> tree
  cache_file        corpus cache produced by 'synth' or 'ingest'
  stopwords         stopword list file (one lowercase word per line)
  min_count         keep terms occurring at least this often (default 4)
  synth_classes, synth_vocab, synth_docs, synth_doc_len, synth_skew, synth_seed
  task_mode         multiclass | per_category
  batch_percents    e.g. 1,5,10
  window_sizes      e.g. 3,1
  oracle_percents   e.g. 99
  kappa_threshold   default 0.99
  stop_set_size     default 2000 (clamped to the pool)
  runs              seeded repetitions per grid cell (default 10)
  seed              base seed; run i uses seed+i
  svm_c, svm_tol, svm_max_epochs, shuffle_seed
  output_dir        grid output directory
Workers: set ALSTOP_WORKERS to bound grid/run parallelism.)";

alstop::ExperimentConfig build_config(
    const std::string& config_path,
    const std::vector<std::string>& overrides) {
  alstop::ExperimentConfig cfg;
  if (!config_path.empty()) {
    cfg = alstop::load_config_file(config_path);
  }
  for (const auto& entry : overrides) {
    const auto eq = entry.find('=');
    if (eq == std::string::npos) {
      throw alstop::ConfigError("--set expects key=value, got '" + entry +
                                "'");
    }
    auto strip = [](std::string s) {
      while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.erase(s.begin());
      while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.pop_back();
      return s;
    };
    alstop::apply_config_entry(cfg, strip(entry.substr(0, eq)),
                               strip(entry.substr(eq + 1)));
  }
  return cfg;
}

void print_decision(const alstop::StopDecision& decision) {
  std::string label = decision.method;
  if (decision.window) label += " (window " + std::to_string(*decision.window) + ")";
  std::printf("  %-24s", label.c_str());
  if (decision.exhausted) {
    std::printf("never stopped; pool exhausted at %d annotations (F=%s)\n",
                decision.annotations, alstop::format_double(decision.f).c_str());
  } else {
    std::printf("stop at iteration %d: %d annotations, F=%s\n",
                *decision.stop_iteration, decision.annotations,
                alstop::format_double(decision.f).c_str());
  }
}

int cmd_synth(const alstop::SynthParams& params, const std::string& out) {
  const alstop::DataSplit data = alstop::generate_synthetic(params);
  alstop::save_corpus(data, out);
  std::printf("wrote %s: %zu train docs, %zu test docs, vocabulary %d, %d classes\n",
              out.c_str(), data.train.docs.size(), data.test.docs.size(),
              data.train.vocabulary.size(), data.train.num_classes());
  return 0;
}

int cmd_ingest(const std::string& dir, const std::string& stopwords_path,
               int min_count, const std::string& out) {
  const alstop::StopwordSet stopwords =
      stopwords_path.empty() ? alstop::StopwordSet{}
                             : alstop::load_stopwords(stopwords_path);
  const alstop::DataSplit data =
      alstop::load_newsgroups(dir, stopwords, min_count);
  alstop::save_corpus(data, out);
  std::printf("wrote %s: %zu train docs, %zu test docs, vocabulary %d, %d classes\n",
              out.c_str(), data.train.docs.size(), data.test.docs.size(),
              data.train.vocabulary.size(), data.train.num_classes());
  return 0;
}

int cmd_run(const std::string& config_path,
            const std::vector<std::string>& overrides,
            std::optional<double> batch_percent, int category,
            const std::string& out) {
  alstop::ExperimentConfig cfg = build_config(config_path, overrides);
  alstop::validate_config(cfg);

  alstop::DataSplit data = alstop::load_dataset(cfg);
  if (category >= 0) data = alstop::to_binary_task(data, category);

  alstop::ALConfig al;
  al.batch_percent = batch_percent.value_or(cfg.batch_percents.front());
  al.stop_set_size = cfg.stop_set_size;
  al.seed = cfg.base_seed;
  al.train = cfg.train;
  al.fit_threads = alstop::worker_count();

  const alstop::LearningCurve curve = alstop::run(data.train, data.test, al);
  const auto decisions = alstop::evaluate_stops(curve, cfg);
  alstop::write_run_log(out, curve, decisions);

  std::printf("curve: %zu iterations, pool %d, batch %d (%s%%), final F=%s\n",
              curve.records.size(), curve.pool_size, curve.batch_size,
              alstop::format_double(al.batch_percent).c_str(),
              alstop::format_double(curve.records.back().f).c_str());
  for (const auto& decision : decisions) print_decision(decision);
  std::printf("log written to %s\n", out.c_str());
  return 0;
}

int cmd_grid(const std::string& config_path,
             const std::vector<std::string>& overrides) {
  const alstop::ExperimentConfig cfg = build_config(config_path, overrides);
  const auto rows = alstop::run_grid(cfg);
  const fs::path csv = cfg.output_dir / "aggregate.csv";
  std::printf("%s", alstop::render_csv(rows).c_str());
  std::printf("aggregate written to %s\n", csv.string().c_str());
  return 0;
}

int cmd_report(const std::string& logs, const std::string& out) {
  const auto rows = alstop::aggregate_logs(logs);
  const fs::path csv = out.empty() ? fs::path(logs) / "aggregate.csv"
                                   : fs::path(out);
  alstop::write_csv(rows, csv);
  std::printf("%s", alstop::render_csv(rows).c_str());
  std::printf("aggregate written to %s\n", csv.string().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "alstop: pool-based active learning simulator for text classification\n"
      "with post-hoc stopping-rule evaluation (windowed kappa agreement and\n"
      "an oracle baseline) across batch sizes."};
  app.require_subcommand(1);
  app.footer(kConfigKeyHelp);

  // synth
  alstop::SynthParams synth_params;
  std::string synth_out = "corpus.alc";
  auto* synth = app.add_subcommand(
      "synth", "Generate a synthetic labeled corpus and cache it");
  synth->add_option("--classes", synth_params.classes, "Number of classes")
      ->capture_default_str();
  synth->add_option("--vocab", synth_params.vocab_size, "Vocabulary size")
      ->capture_default_str();
  synth->add_option("--docs", synth_params.docs, "Total documents")
      ->capture_default_str();
  synth->add_option("--doc-len", synth_params.doc_length,
                    "Tokens per document")
      ->capture_default_str();
  synth->add_option("--skew", synth_params.skew,
                    "Probability a token comes from the class's own word block")
      ->capture_default_str();
  synth->add_option("--seed", synth_params.seed, "RNG seed")
      ->capture_default_str();
  synth->add_option("--out", synth_out, "Output corpus cache file")
      ->capture_default_str();

  // ingest
  std::string ingest_dir;
  std::string ingest_stopwords;
  int ingest_min_count = alstop::kDefaultMinCount;
  std::string ingest_out = "corpus.alc";
  auto* ingest = app.add_subcommand(
      "ingest", "Cache a 20news-bydate style directory tree as a corpus");
  ingest->add_option("--dir", ingest_dir, "Dataset root with train/ and test/")
      ->required();
  ingest->add_option("--stopwords", ingest_stopwords, "Stopword list file");
  ingest->add_option("--min-count", ingest_min_count,
                     "Keep terms occurring at least this often")
      ->capture_default_str();
  ingest->add_option("--out", ingest_out, "Output corpus cache file")
      ->capture_default_str();

  // run
  std::string run_config;
  std::vector<std::string> run_overrides;
  double run_batch_percent = -1.0;
  int run_category = -1;
  std::string run_out = "curve.log";
  auto* run_cmd = app.add_subcommand(
      "run", "Run a single active-learning curve and score every stopping rule");
  run_cmd->add_option("--config", run_config, "Experiment config file");
  run_cmd->add_option("--set", run_overrides,
                      "Override a config entry (key=value, repeatable)");
  run_cmd->add_option("--batch-percent", run_batch_percent,
                      "Batch size as a percent of the pool "
                      "(default: first configured value)");
  run_cmd->add_option("--category", run_category,
                      "Run one binary one-vs-rest task for this class index");
  run_cmd->add_option("--out", run_out, "Output run log")->capture_default_str();

  // grid
  std::string grid_config;
  std::vector<std::string> grid_overrides;
  auto* grid = app.add_subcommand(
      "grid", "Run the full (batch percent x window x seed) experiment grid");
  grid->add_option("--config", grid_config, "Experiment config file");
  grid->add_option("--set", grid_overrides,
                   "Override a config entry (key=value, repeatable)");

  // report
  std::string report_logs;
  std::string report_out;
  auto* report = app.add_subcommand(
      "report", "Re-aggregate existing run logs into the aggregate CSV");
  report->add_option("--logs", report_logs, "Directory of .log files")
      ->required();
  report->add_option("--out", report_out,
                     "CSV path (default <logs>/aggregate.csv)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    std::cerr << "run '" << (argc > 0 ? argv[0] : "alstop")
              << " --help' for usage\n";
    return 2;
  }

  try {
    if (synth->parsed()) return cmd_synth(synth_params, synth_out);
    if (ingest->parsed()) {
      return cmd_ingest(ingest_dir, ingest_stopwords, ingest_min_count,
                        ingest_out);
    }
    if (run_cmd->parsed()) {
      std::optional<double> bp;
      if (run_batch_percent > 0.0) bp = run_batch_percent;
      return cmd_run(run_config, run_overrides, bp, run_category, run_out);
    }
    if (grid->parsed()) return cmd_grid(grid_config, grid_overrides);
    if (report->parsed()) return cmd_report(report_logs, report_out);
  } catch (const alstop::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
