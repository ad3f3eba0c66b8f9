#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "alstop/corpus.hpp"
#include "alstop/linear_model.hpp"
#include "alstop/metrics.hpp"

namespace alstop {

struct ALConfig {
  double batch_percent = 5.0;  // of the initial pool size, in (0, 100]
  int stop_set_size = 2000;    // clamped to the pool size at run time
  std::uint64_t seed = 0;      // drives seed batch, stop set and epoch shuffles
  TrainConfig train;
  int fit_threads = 1;  // one-vs-rest subproblems solved in parallel
};

struct IterationRecord {
  int t = 0;
  int annotations = 0;  // labeled docs after this iteration's batch
  double f = 0.0;       // test-set F at this iteration
  std::vector<int> stop_predictions;  // model predictions on the fixed stop set
  std::optional<KappaValue> kappa;    // agreement with the previous model, t >= 1
};

// Full record of one active-learning run, kept to pool exhaustion so any
// stopping rule can be evaluated on it after the fact.
struct LearningCurve {
  std::vector<IterationRecord> records;
  ALConfig config;
  std::string fingerprint;  // corpus hash
  std::string task = "multiclass";  // or "binary:<category name>"
  int pool_size = 0;
  int batch_size = 0;
  int num_classes = 0;
};

// ceil(percent/100 * pool_size); always >= 1 for percent > 0.
int derive_batch_size(double batch_percent, int pool_size);

// Fixed uniform subset on which consecutive models are compared. Membership
// does not remove a doc from the sampling pool.
std::vector<int> stop_set_select(const std::vector<SparseDoc>& pool, int size,
                                 std::uint64_t seed);

// The iterative loop: random seed batch, then repeatedly fit on all labeled
// docs, record test F / stop-set predictions / kappa vs the previous model,
// and annotate the next closest-to-hyperplane batch until the pool is
// exhausted (final batch truncated). Deterministic per (corpus, cfg).
// Degenerate one-vs-rest subproblems score -infinity instead of aborting
// the iteration.
LearningCurve run(const Corpus& train, const Corpus& test,
                  const ALConfig& cfg);

// Line-delimited curve format: '#'-prefixed header, then one record per
// iteration with fields t, annotations, f, kappa. This file is the hand-off
// between the engine and post-hoc stopping analysis; stop-set predictions
// stay in memory only.
std::string serialize_curve(const LearningCurve& curve);
LearningCurve parse_curve(std::string_view text);
void save_curve(const LearningCurve& curve, const std::filesystem::path& file);
LearningCurve load_curve_file(const std::filesystem::path& file);

}  // namespace alstop
