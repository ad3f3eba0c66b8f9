#include "alstop/stopping.hpp"

#include <algorithm>

#include "alstop/format.hpp"

namespace alstop {

namespace {

void check_curve(const LearningCurve& curve) {
  if (curve.records.empty()) {
    throw EmptyInput("stopping methods need a nonempty curve");
  }
}

// Stop point or exhaustion, with annotations/F copied from the curve.
StopDecision decide(const LearningCurve& curve, std::optional<int> stop_t) {
  StopDecision decision;
  if (stop_t) {
    decision.stop_iteration = stop_t;
    decision.exhausted = false;
    const auto& record = curve.records[static_cast<std::size_t>(*stop_t)];
    decision.annotations = record.annotations;
    decision.f = record.f;
  } else {
    decision.exhausted = true;
    decision.annotations = curve.records.back().annotations;
    decision.f = curve.records.back().f;
  }
  return decision;
}

}  // namespace

StopDecision bv2009_stop(const LearningCurve& curve,
                         const BV2009Params& params) {
  check_curve(curve);
  if (params.window_size < 1) throw InvalidParams("window_size must be >= 1");
  if (!(params.kappa_threshold > 0.0) || params.kappa_threshold > 1.0) {
    throw InvalidParams("kappa_threshold must be in (0, 1]");
  }

  const int n = params.window_size;
  const int last = static_cast<int>(curve.records.size()) - 1;
  std::optional<int> stop_t;
  // Kappas exist for iterations 1..last, so the first full window of n ends
  // at iteration n; before that not enough models exist to decide.
  for (int t = n; t <= last; ++t) {
    double sum = 0.0;
    for (int i = t - n + 1; i <= t; ++i) {
      const auto& kappa = curve.records[static_cast<std::size_t>(i)].kappa;
      if (!kappa) {
        throw InvalidParams("curve record " + std::to_string(i) +
                            " is missing its kappa value");
      }
      sum += kappa->kappa;
    }
    if (sum / static_cast<double>(n) >= params.kappa_threshold) {
      stop_t = t;
      break;
    }
  }

  StopDecision decision = decide(curve, stop_t);
  decision.method = "bv2009";
  decision.window = params.window_size;
  decision.threshold = params.kappa_threshold;
  return decision;
}

StopDecision oracle_stop(const LearningCurve& curve,
                         const OracleParams& params) {
  check_curve(curve);
  if (!(params.percent > 0.0) || params.percent > 100.0) {
    throw InvalidParams("oracle percent must be in (0, 100]");
  }

  double f_max = curve.records.front().f;
  for (const auto& record : curve.records) f_max = std::max(f_max, record.f);
  const double target = params.percent / 100.0 * f_max;

  std::optional<int> stop_t;
  for (std::size_t t = 0; t < curve.records.size(); ++t) {
    if (curve.records[t].f >= target) {
      stop_t = static_cast<int>(t);
      break;
    }
  }
  // The argmax iteration satisfies f >= percent/100 * f_max, so a stop
  // always exists.
  StopDecision decision = decide(curve, stop_t);
  decision.method = "oracle-" + format_double(params.percent);
  decision.percent = params.percent;
  return decision;
}

}  // namespace alstop
