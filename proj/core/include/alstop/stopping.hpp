#pragma once

#include <optional>
#include <string>

#include "alstop/engine.hpp"

namespace alstop {

// Windowed agreement rule: stop once the mean of the window_size most recent
// kappa values between consecutive models reaches the threshold.
struct BV2009Params {
  int window_size = 3;
  double kappa_threshold = 0.99;
};

// Idealized baseline: stop at the first iteration within `percent` of the
// curve's maximum F. Needs the whole curve, so it is a yardstick, not a
// usable rule.
struct OracleParams {
  double percent = 99.0;
};

struct StopDecision {
  std::string method;                  // "bv2009" or "oracle-<P>"
  std::optional<int> window;           // bv2009 only
  std::optional<double> threshold;     // bv2009 only
  std::optional<double> percent;       // oracle only
  std::optional<int> stop_iteration;   // empty when the curve was exhausted
  bool exhausted = false;
  int annotations = 0;  // at the stop point, or the full pool when exhausted
  double f = 0.0;       // at the stop point, or the final iteration when exhausted
};

// Post-hoc scan over a completed curve. The earliest possible stop is
// iteration window_size: kappas exist from iteration 1 on, so window_size+1
// models must have been trained before a full window is available.
// "Above the threshold" is implemented as >=.
StopDecision bv2009_stop(const LearningCurve& curve, const BV2009Params& params);

// Never exhausts: the argmax iteration always qualifies.
StopDecision oracle_stop(const LearningCurve& curve, const OracleParams& params);

}  // namespace alstop
