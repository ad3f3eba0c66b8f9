#include <doctest.h>

#include <algorithm>
#include <vector>

#include "alstop/metrics.hpp"
#include "alstop/rng.hpp"

using alstop::cohens_kappa;
using alstop::f_measure;

TEST_CASE("f_measure: perfect predictions score 1 for present classes") {
  const std::vector<int> golds = {0, 1, 1, 0, 1};
  CHECK(f_measure(golds, golds, 2) == doctest::Approx(1.0).epsilon(1e-15));
  const std::vector<int> multi = {0, 1, 2, 2, 1, 0};
  CHECK(f_measure(multi, multi, 3) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("f_measure: binary confusion tp=2 fp=1 fn=1 gives 2/3") {
  const std::vector<int> golds = {1, 1, 1, 0};
  const std::vector<int> preds = {1, 1, 0, 1};
  CHECK(std::abs(f_measure(preds, golds, 2) - 2.0 / 3.0) < 1e-12);
}

TEST_CASE("f_measure: all-negative predictions score 0 when positives exist") {
  const std::vector<int> golds = {1, 0, 1};
  const std::vector<int> preds = {0, 0, 0};
  CHECK(f_measure(preds, golds, 2) == 0.0);
}

TEST_CASE("f_measure: errors on mismatched or empty inputs") {
  CHECK_THROWS_AS(f_measure({0, 1}, {0}, 2), alstop::LengthMismatch);
  CHECK_THROWS_AS(f_measure({}, {}, 2), alstop::EmptyInput);
  CHECK_THROWS_AS(f_measure({0, 5}, {0, 1}, 2), alstop::InvalidParams);
}

TEST_CASE("f_measure: macro average skips classes absent from both sides") {
  // Classes 0 and 1 are perfect; classes 2..4 appear nowhere.
  const std::vector<int> golds = {0, 1, 0, 1};
  CHECK(f_measure(golds, golds, 5) == doctest::Approx(1.0).epsilon(1e-15));

  // A predicted-only class drags the average down with F = 0.
  const std::vector<int> golds2 = {0, 1, 0, 1};
  const std::vector<int> preds2 = {0, 1, 0, 2};
  // class 0: tp=2 -> F=1; class 1: tp=1, fn=1 -> P=1, R=0.5, F=2/3;
  // class 2: predicted only -> F=0; macro over 3 classes.
  const double expect = (1.0 + 2.0 / 3.0 + 0.0) / 3.0;
  CHECK(std::abs(f_measure(preds2, golds2, 5) - expect) < 1e-12);
}

TEST_CASE("f_measure: invariant to jointly permuting the pairs") {
  alstop::Rng rng(99);
  std::vector<int> golds;
  std::vector<int> preds;
  for (int i = 0; i < 200; ++i) {
    golds.push_back(static_cast<int>(rng.next_below(4)));
    preds.push_back(static_cast<int>(rng.next_below(4)));
  }
  const double before = f_measure(preds, golds, 4);

  std::vector<std::size_t> order(golds.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  rng.shuffle(order);
  std::vector<int> golds2;
  std::vector<int> preds2;
  for (const auto i : order) {
    golds2.push_back(golds[i]);
    preds2.push_back(preds[i]);
  }
  CHECK(f_measure(preds2, golds2, 4) == before);  // counts identical, exact
}

TEST_CASE("cohens_kappa: identical non-constant vectors give exactly 1") {
  const std::vector<int> a = {1, 0, 1, 1, 0};
  const auto kv = cohens_kappa(a, a, 2);
  CHECK(kv.kappa == 1.0);
  CHECK(kv.observed == 1.0);
}

TEST_CASE("cohens_kappa: total disagreement with mirrored marginals is -1") {
  const auto kv = cohens_kappa({1, 1, 0, 0}, {0, 0, 1, 1}, 2);
  CHECK(kv.observed == 0.0);
  CHECK(kv.expected == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(std::abs(kv.kappa - -1.0) < 1e-12);
}

TEST_CASE("cohens_kappa: worked example A_o=0.75 A_e=0.5") {
  const auto kv = cohens_kappa({1, 1, 1, 0}, {1, 1, 0, 0}, 2);
  CHECK(std::abs(kv.observed - 0.75) < 1e-15);
  CHECK(std::abs(kv.expected - 0.5) < 1e-15);
  CHECK(std::abs(kv.kappa - 0.5) < 1e-12);
}

TEST_CASE("cohens_kappa: identical constant vectors use the A_e=1 convention") {
  const auto kv = cohens_kappa({0, 0}, {0, 0}, 2);
  CHECK(kv.expected == 1.0);
  CHECK(kv.kappa == 1.0);
}

TEST_CASE("cohens_kappa: errors") {
  CHECK_THROWS_AS(cohens_kappa({0, 1}, {0}, 2), alstop::LengthMismatch);
  CHECK_THROWS_AS(cohens_kappa({}, {}, 2), alstop::EmptyInput);
}

TEST_CASE("cohens_kappa: symmetric in its arguments, bitwise") {
  alstop::Rng rng(123);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + static_cast<int>(rng.next_below(40));
    const int c = 2 + static_cast<int>(rng.next_below(4));
    std::vector<int> a(n);
    std::vector<int> b(n);
    for (int i = 0; i < n; ++i) {
      a[i] = static_cast<int>(rng.next_below(c));
      b[i] = static_cast<int>(rng.next_below(c));
    }
    const auto ab = cohens_kappa(a, b, c);
    const auto ba = cohens_kappa(b, a, c);
    CHECK(ab.kappa == ba.kappa);
    CHECK(ab.observed == ba.observed);
    CHECK(ab.expected == ba.expected);
  }
}

TEST_CASE("cohens_kappa: invariant under a shared relabeling bijection") {
  alstop::Rng rng(321);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 5 + static_cast<int>(rng.next_below(60));
    const int c = 2 + static_cast<int>(rng.next_below(5));
    std::vector<int> a(n);
    std::vector<int> b(n);
    for (int i = 0; i < n; ++i) {
      a[i] = static_cast<int>(rng.next_below(c));
      b[i] = static_cast<int>(rng.next_below(c));
    }
    std::vector<int> perm(c);
    for (int i = 0; i < c; ++i) perm[i] = i;
    rng.shuffle(perm);
    std::vector<int> a2(n);
    std::vector<int> b2(n);
    for (int i = 0; i < n; ++i) {
      a2[i] = perm[a[i]];
      b2[i] = perm[b[i]];
    }
    CHECK(std::abs(cohens_kappa(a2, b2, c).kappa -
                   cohens_kappa(a, b, c).kappa) < 1e-12);
  }
}

TEST_CASE("cohens_kappa: near zero for independent vectors (seeded)") {
  alstop::Rng rng(2024);
  const int n = 2000;
  std::vector<int> a(n);
  std::vector<int> b(n);
  for (int i = 0; i < n; ++i) {
    // Matching marginals: both ~30% class 1.
    a[i] = rng.next_unit() < 0.3 ? 1 : 0;
    b[i] = rng.next_unit() < 0.3 ? 1 : 0;
  }
  CHECK(std::abs(cohens_kappa(a, b, 2).kappa) < 0.1);
}

TEST_CASE("cohens_kappa: stays within [-1, 1] on random inputs") {
  alstop::Rng rng(777);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + static_cast<int>(rng.next_below(30));
    const int c = 2 + static_cast<int>(rng.next_below(5));
    std::vector<int> a(n);
    std::vector<int> b(n);
    for (int i = 0; i < n; ++i) {
      a[i] = static_cast<int>(rng.next_below(c));
      b[i] = static_cast<int>(rng.next_below(c));
    }
    const auto kv = cohens_kappa(a, b, c);
    CHECK(kv.kappa >= -1.0);
    CHECK(kv.kappa <= 1.0);
    CHECK(kv.observed >= 0.0);
    CHECK(kv.observed <= 1.0);
    CHECK(kv.expected >= 0.0);
    CHECK(kv.expected <= 1.0);
  }
}
