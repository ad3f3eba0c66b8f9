#include "alstop/metrics.hpp"

#include <algorithm>
#include <string>

namespace alstop {

namespace {

void check_pair(const std::vector<int>& a, const std::vector<int>& b,
                int num_classes) {
  if (a.size() != b.size()) {
    throw LengthMismatch("label vectors differ in length: " +
                         std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()));
  }
  if (a.empty()) {
    throw EmptyInput("label vectors are empty");
  }
  if (num_classes < 2) {
    throw InvalidParams("num_classes must be >= 2");
  }
  for (const auto* v : {&a, &b}) {
    for (int label : *v) {
      if (label < 0 || label >= num_classes) {
        throw InvalidParams("label " + std::to_string(label) +
                            " out of range [0, " +
                            std::to_string(num_classes) + ")");
      }
    }
  }
}

double f1_for_class(const ConfusionCounts& cc, int c) {
  const double tp = static_cast<double>(cc.tp[c]);
  const double fp = static_cast<double>(cc.fp[c]);
  const double fn = static_cast<double>(cc.fn[c]);
  const double precision = (tp + fp > 0) ? tp / (tp + fp) : 0.0;
  const double recall = (tp + fn > 0) ? tp / (tp + fn) : 0.0;
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

}  // namespace

ConfusionCounts confusion_counts(const std::vector<int>& preds,
                                 const std::vector<int>& golds,
                                 int num_classes) {
  check_pair(preds, golds, num_classes);
  ConfusionCounts cc;
  cc.tp.assign(num_classes, 0);
  cc.fp.assign(num_classes, 0);
  cc.fn.assign(num_classes, 0);
  cc.total = static_cast<long long>(preds.size());
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (preds[i] == golds[i]) {
      ++cc.tp[golds[i]];
    } else {
      ++cc.fp[preds[i]];
      ++cc.fn[golds[i]];
    }
  }
  return cc;
}

double f_measure(const std::vector<int>& preds, const std::vector<int>& golds,
                 int num_classes) {
  const ConfusionCounts cc = confusion_counts(preds, golds, num_classes);
  if (num_classes == 2) {
    return f1_for_class(cc, 1);
  }
  // Macro average over classes that occur in golds or preds; classes absent
  // from both contribute nothing, predicted-only classes count as F = 0.
  double sum = 0.0;
  int present = 0;
  for (int c = 0; c < num_classes; ++c) {
    const bool in_golds = cc.tp[c] + cc.fn[c] > 0;
    const bool in_preds = cc.tp[c] + cc.fp[c] > 0;
    if (!in_golds && !in_preds) continue;
    sum += f1_for_class(cc, c);
    ++present;
  }
  return sum / static_cast<double>(present);
}

KappaValue cohens_kappa(const std::vector<int>& a, const std::vector<int>& b,
                        int num_classes) {
  check_pair(a, b, num_classes);
  const double n = static_cast<double>(a.size());
  std::vector<long long> count_a(num_classes, 0);
  std::vector<long long> count_b(num_classes, 0);
  long long agree = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ++count_a[a[i]];
    ++count_b[b[i]];
    if (a[i] == b[i]) ++agree;
  }

  KappaValue result;
  result.observed = static_cast<double>(agree) / n;
  double expected = 0.0;
  for (int c = 0; c < num_classes; ++c) {
    expected += (static_cast<double>(count_a[c]) / n) *
                (static_cast<double>(count_b[c]) / n);
  }
  result.expected = expected;
  if (expected >= 1.0) {
    // Both vectors constant and identical: perfect degenerate agreement.
    result.kappa = 1.0;
  } else {
    result.kappa = std::clamp((result.observed - expected) / (1.0 - expected),
                              -1.0, 1.0);
  }
  return result;
}

}  // namespace alstop
