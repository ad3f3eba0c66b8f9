#include <doctest.h>

#include <limits>
#include <optional>
#include <vector>

#include "alstop/rng.hpp"
#include "alstop/stopping.hpp"
#include "test_util.hpp"

using namespace alstop;
using testutil::make_curve;

namespace {

// Independent scanner: recomputes every window mean from scratch.
std::optional<int> brute_bv2009_t(const LearningCurve& curve, int n,
                                  double threshold) {
  const int total = static_cast<int>(curve.records.size());
  for (int t = 0; t < total; ++t) {
    if (t - n + 1 < 1) continue;  // kappas only exist from iteration 1 on
    double sum = 0.0;
    for (int i = t - n + 1; i <= t; ++i) {
      sum += curve.records[i].kappa->kappa;
    }
    if (sum / n >= threshold) return t;
  }
  return std::nullopt;
}

std::optional<int> brute_oracle_t(const LearningCurve& curve, double percent) {
  double best = 0.0;
  for (const auto& record : curve.records) {
    if (record.f > best) best = record.f;
  }
  for (int t = 0; t < static_cast<int>(curve.records.size()); ++t) {
    if (curve.records[t].f >= percent / 100.0 * best) return t;
  }
  return std::nullopt;
}

LearningCurve random_curve(Rng& rng, int max_len = 25) {
  const int len = 1 + static_cast<int>(rng.next_below(max_len));
  std::vector<double> fs;
  std::vector<double> kappas;
  double f = rng.next_unit() * 0.5;
  for (int t = 0; t < len; ++t) {
    f = std::min(1.0, f + rng.next_unit() * 0.1);
    fs.push_back(f);
    if (t >= 1) {
      // Half the draws hover near the usual threshold region.
      kappas.push_back(rng.next_unit() < 0.5 ? 0.9 + rng.next_unit() * 0.1
                                             : rng.next_unit());
    }
  }
  return make_curve(fs, kappas, 1 + static_cast<int>(rng.next_below(50)));
}

}  // namespace

TEST_CASE("bv2009_stop: windowed mean scan") {
  // Kappas at iterations 1..4.
  const auto curve =
      make_curve({0.5, 0.6, 0.7, 0.8, 0.9}, {0.95, 0.992, 0.993, 0.995});

  SUBCASE("window 3 stops when the trailing mean clears the threshold") {
    const auto decision = bv2009_stop(curve, {3, 0.99});
    // mean(0.95, 0.992, 0.993) = 0.97833 misses; mean(0.992, 0.993, 0.995)
    // = 0.99333 clears.
    REQUIRE(decision.stop_iteration.has_value());
    CHECK(*decision.stop_iteration == 4);
    CHECK(decision.annotations == curve.records[4].annotations);
    CHECK(decision.f == curve.records[4].f);
    CHECK_FALSE(decision.exhausted);
  }
  SUBCASE("window 1 reduces to the first kappa over the threshold") {
    const auto decision = bv2009_stop(curve, {1, 0.99});
    REQUIRE(decision.stop_iteration.has_value());
    CHECK(*decision.stop_iteration == 2);  // first kappa >= 0.99 is 0.992
  }
}

TEST_CASE("bv2009_stop: exhaustion cases") {
  const auto flat = make_curve({0.5, 0.5, 0.5, 0.5}, {0.5, 0.5, 0.5});
  for (const int n : {1, 2, 3, 5}) {
    const auto decision = bv2009_stop(flat, {n, 0.99});
    CHECK(decision.exhausted);
    CHECK_FALSE(decision.stop_iteration.has_value());
    CHECK(decision.annotations == flat.records.back().annotations);
    CHECK(decision.f == flat.records.back().f);
  }
  // A one-iteration curve never has a kappa, so window 1 cannot fire.
  const auto single = make_curve({0.9}, {});
  CHECK(bv2009_stop(single, {1, 0.99}).exhausted);
}

TEST_CASE("bv2009_stop: cannot stop before iteration n") {
  // Every kappa is over the threshold from the start, so the stop lands on
  // the earliest eligible iteration: exactly n (n+1 trained models).
  for (const int n : {1, 2, 3, 5}) {
    const int len = n + 3;
    std::vector<double> fs(len, 0.8);
    std::vector<double> kappas(len - 1, 0.999);
    const auto curve = make_curve(fs, kappas);
    const auto decision = bv2009_stop(curve, {n, 0.99});
    REQUIRE(decision.stop_iteration.has_value());
    CHECK(*decision.stop_iteration == n);

    // With only n records (kappas 1..n-1) the window never completes.
    const auto short_curve = make_curve(
        std::vector<double>(n, 0.8), std::vector<double>(n - 1, 0.999));
    CHECK(bv2009_stop(short_curve, {n, 0.99}).exhausted);
  }
}

TEST_CASE("oracle_stop: percent-of-peak scan") {
  const auto curve = make_curve({0.50, 0.70, 0.74, 0.745, 0.75},
                                {0.9, 0.9, 0.9, 0.9});
  const auto decision = oracle_stop(curve, {99.0});
  REQUIRE(decision.stop_iteration.has_value());
  CHECK(*decision.stop_iteration == 3);  // threshold 0.7425 -> F=0.745
  CHECK(decision.annotations == curve.records[3].annotations);
  CHECK_FALSE(decision.exhausted);
  CHECK(decision.method == "oracle-99");

  CHECK(*oracle_stop(curve, {100.0}).stop_iteration == 4);  // first argmax
  const auto constant = make_curve({0.6, 0.6, 0.6}, {0.9, 0.9});
  CHECK(*oracle_stop(constant, {99.0}).stop_iteration == 0);
}

TEST_CASE("oracle_stop: first argmax under P=100 with a plateau") {
  const auto curve = make_curve({0.3, 0.8, 0.8, 0.7}, {0.9, 0.9, 0.9});
  CHECK(*oracle_stop(curve, {100.0}).stop_iteration == 1);
}

TEST_CASE("stopping: parameter validation") {
  const auto curve = make_curve({0.5, 0.6}, {0.9});
  CHECK_THROWS_AS(bv2009_stop(curve, {0, 0.99}), InvalidParams);
  CHECK_THROWS_AS(bv2009_stop(curve, {1, 0.0}), InvalidParams);
  CHECK_THROWS_AS(bv2009_stop(curve, {1, 1.5}), InvalidParams);
  CHECK_THROWS_AS(oracle_stop(curve, {0.0}), InvalidParams);
  CHECK_THROWS_AS(oracle_stop(curve, {101.0}), InvalidParams);
  CHECK_THROWS_AS(bv2009_stop(LearningCurve{}, {1, 0.99}), EmptyInput);
}

TEST_CASE("stopping: agrees with the brute-force scanners on random curves") {
  Rng rng(2468);
  for (int trial = 0; trial < 200; ++trial) {
    const auto curve = random_curve(rng);
    const int n = 1 + static_cast<int>(rng.next_below(5));
    const double threshold = 0.8 + rng.next_unit() * 0.2;
    const auto expected = brute_bv2009_t(curve, n, threshold);
    const auto decision = bv2009_stop(curve, {n, threshold});
    CHECK(decision.stop_iteration == expected);
    CHECK(decision.exhausted == !expected.has_value());

    const double percent = 80.0 + rng.next_unit() * 20.0;
    const auto oracle_expected = brute_oracle_t(curve, percent);
    const auto oracle = oracle_stop(curve, {percent});
    CHECK(oracle.stop_iteration == oracle_expected);
    CHECK_FALSE(oracle.exhausted);  // the argmax always qualifies
  }
}

TEST_CASE("stopping: monotone in the threshold and the percent") {
  const auto as_rank = [](const StopDecision& decision) {
    return decision.stop_iteration
               ? *decision.stop_iteration
               : std::numeric_limits<int>::max();  // exhausted sorts last
  };
  Rng rng(1357);
  for (int trial = 0; trial < 100; ++trial) {
    const auto curve = random_curve(rng);
    const int n = 1 + static_cast<int>(rng.next_below(4));
    double lo = 0.5 + rng.next_unit() * 0.5;
    double hi = 0.5 + rng.next_unit() * 0.5;
    if (lo > hi) std::swap(lo, hi);
    CHECK(as_rank(bv2009_stop(curve, {n, lo})) <=
          as_rank(bv2009_stop(curve, {n, hi})));

    double plo = 50.0 + rng.next_unit() * 50.0;
    double phi = 50.0 + rng.next_unit() * 50.0;
    if (plo > phi) std::swap(plo, phi);
    CHECK(as_rank(oracle_stop(curve, {plo})) <=
          as_rank(oracle_stop(curve, {phi})));
  }
}

TEST_CASE("stopping: window 1 equals first-kappa-over-threshold exactly") {
  Rng rng(9753);
  for (int trial = 0; trial < 50; ++trial) {
    const auto curve = random_curve(rng);
    const double threshold = 0.9 + rng.next_unit() * 0.1;
    std::optional<int> first;
    for (std::size_t t = 1; t < curve.records.size(); ++t) {
      if (curve.records[t].kappa->kappa >= threshold) {
        first = static_cast<int>(t);
        break;
      }
    }
    CHECK(bv2009_stop(curve, {1, threshold}).stop_iteration == first);
  }
}
