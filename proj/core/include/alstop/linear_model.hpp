#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "alstop/corpus.hpp"

namespace alstop {

struct TrainConfig {
  double c = 1.0;     // hinge penalty weight (regularization trade-off)
  double tol = 1e-3;  // max projected-gradient violation at termination
  int max_epochs = 1000;
  std::uint64_t shuffle_seed = 0;  // seeds the per-epoch permutations
};

// One-vs-rest linear model at a single active-learning iteration. Binary
// problems store a single hyperplane whose positive side is class 1.
// Degenerate subproblems keep zero weights and are flagged inactive; their
// decision value is reported as -infinity.
struct ModelSnapshot {
  int num_classes = 0;
  int vocab_size = 0;
  int iteration = 0;   // active-learning iteration the model was fit at
  int train_size = 0;  // labeled docs at fit time
  std::vector<std::vector<double>> weights;  // one dense vector per stored classifier
  std::vector<double> biases;
  std::vector<std::uint8_t> active;

  int num_stored() const { return static_cast<int>(weights.size()); }
  bool binary() const { return num_classes == 2; }

  bool operator==(const ModelSnapshot&) const = default;
};

// Per-subproblem solver traces, filled on request for verification.
struct FitDiagnostics {
  struct Subproblem {
    std::vector<double> dual;             // final dual variables, one per doc
    std::vector<double> primal_by_epoch;  // objective after each epoch
    std::vector<double> dual_obj_by_epoch;
    double final_violation = 0.0;  // max |projected gradient| of the last epoch
    int epochs = 0;
    bool converged = false;
    bool skipped = false;  // degenerate subproblem, never solved
  };
  std::vector<Subproblem> subproblems;
};

// Trains an L2-regularized L1-hinge SVM per class (one-vs-rest; a single
// classifier for the binary case) by dual coordinate descent with the bias
// folded in as a constant feature. Deterministic given cfg.shuffle_seed;
// subproblems may be solved on `threads` threads without changing the
// result. Throws DegenerateClass when a subproblem has no positive or no
// negative examples.
ModelSnapshot fit(const std::vector<SparseDoc>& train, int vocab_size,
                  int num_classes, const TrainConfig& cfg,
                  FitDiagnostics* diag = nullptr, int threads = 1);

// Same as fit() but degenerate subproblems are marked inactive instead of
// throwing, so a usable partial model always comes back.
ModelSnapshot fit_partial(const std::vector<SparseDoc>& train, int vocab_size,
                          int num_classes, const TrainConfig& cfg,
                          FitDiagnostics* diag = nullptr, int threads = 1);

// w_c . x + b_c per stored classifier; a single signed value for binary
// models, -infinity for inactive classes.
std::vector<double> decision_values(const ModelSnapshot& model,
                                    const SparseDoc& doc);

// Binary: class 1 iff the decision value is positive (0 ties to class 0).
// Multiclass: argmax of the decision values, ties to the lowest class id.
int predict(const ModelSnapshot& model, const SparseDoc& doc);

// Index of the maximum, ties broken toward the lowest index.
int argmax_class(const std::vector<double>& values);

// Versioned little-endian binary dump; every float round-trips bit-exactly.
void save_model(const ModelSnapshot& model, const std::filesystem::path& file);
ModelSnapshot load_model(const std::filesystem::path& file);

}  // namespace alstop
