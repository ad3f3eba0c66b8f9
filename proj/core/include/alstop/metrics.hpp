#pragma once

#include <vector>

#include "alstop/errors.hpp"

namespace alstop {

// Per-class confusion tallies for a pair of prediction/gold vectors.
struct ConfusionCounts {
  std::vector<long long> tp;
  std::vector<long long> fp;
  std::vector<long long> fn;
  long long total = 0;
};

ConfusionCounts confusion_counts(const std::vector<int>& preds,
                                 const std::vector<int>& golds,
                                 int num_classes);

// Chance-corrected agreement between two label vectors.
struct KappaValue {
  double kappa = 0.0;
  double observed = 0.0;  // A_o: raw agreement rate
  double expected = 0.0;  // A_e: agreement expected from the marginals
};

// Binary (num_classes == 2): F1 of the positive class (class 1).
// Multiclass: macro average over the classes that appear in golds or preds.
// Conventions: P = 0 when tp+fp = 0, R = 0 when tp+fn = 0, F = 0 when
// P+R = 0.
double f_measure(const std::vector<int>& preds, const std::vector<int>& golds,
                 int num_classes);

// kappa = (A_o - A_e) / (1 - A_e) with full C-way marginals; kappa = 1 when
// A_e = 1 (two identical constant vectors).
KappaValue cohens_kappa(const std::vector<int>& a, const std::vector<int>& b,
                        int num_classes);

}  // namespace alstop
