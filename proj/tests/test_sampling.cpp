#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "alstop/rng.hpp"
#include "alstop/sampling.hpp"
#include "test_util.hpp"

using namespace alstop;

namespace {

// Independent of select_closest: score everything, full stable sort, take k.
std::vector<int> brute_force_closest(const ModelSnapshot& model,
                                     const std::vector<SparseDoc>& pool,
                                     int k) {
  std::vector<std::pair<double, int>> all;
  for (const auto& doc : pool) {
    all.emplace_back(uncertainty_score(model, doc), doc.doc_id);
  }
  std::sort(all.begin(), all.end(),
            [](const auto& a, const auto& b) {
              if (a.first != b.first) return a.first < b.first;
              return a.second < b.second;
            });
  std::vector<int> ids;
  for (int i = 0; i < k; ++i) ids.push_back(all[i].second);
  return ids;
}

ModelSnapshot random_model(Rng& rng, int num_classes, int vocab_size) {
  const int stored = num_classes == 2 ? 1 : num_classes;
  std::vector<std::vector<double>> weights(stored);
  std::vector<double> biases(stored);
  for (int s = 0; s < stored; ++s) {
    weights[s].resize(vocab_size);
    for (auto& w : weights[s]) w = rng.next_unit() * 2.0 - 1.0;
    biases[s] = rng.next_unit() * 2.0 - 1.0;
  }
  return testutil::make_model(num_classes, std::move(weights),
                              std::move(biases));
}

}  // namespace

TEST_CASE("uncertainty_score: binary absolute value") {
  const auto model = testutil::make_model(2, {{-0.1}}, {0.0});
  CHECK(uncertainty_score(model, {0, {0}, 0}) == doctest::Approx(0.1));
  CHECK(uncertainty_score(model, {0, {}, 0}) == 0.0);  // on the hyperplane
}

TEST_CASE("uncertainty_score: multiclass distance of the top hyperplane") {
  const auto model = testutil::make_model(
      3, {{0.0}, {0.0}, {0.0}}, {-1.2, 0.3, -0.4});
  CHECK(uncertainty_score(model, {0, {}, 0}) == doctest::Approx(0.3));
}

TEST_CASE("select_closest: worked example") {
  // One indicator feature per doc so the scores are 0.9, 0.1, 0.3, 0.5.
  const auto model =
      testutil::make_model(2, {{0.9, 0.1, 0.3, 0.5}}, {0.0});
  const std::vector<SparseDoc> pool = {
      {1, {0}, 0}, {2, {1}, 0}, {3, {2}, 0}, {4, {3}, 0}};
  CHECK(select_closest(model, pool, 2) == std::vector<int>{2, 3});
  CHECK(select_closest(model, pool, 4) == std::vector<int>{2, 3, 4, 1});
}

TEST_CASE("select_closest: equal scores break ties by doc id") {
  const auto zero = testutil::make_model(2, {{0.0, 0.0}}, {0.25});
  const std::vector<SparseDoc> pool = {
      {9, {0}, 0}, {4, {1}, 0}, {7, {}, 0}};
  CHECK(select_closest(zero, pool, 2) == std::vector<int>{4, 7});
}

TEST_CASE("select_closest: batch validation") {
  const auto model = testutil::make_model(2, {{1.0}}, {0.0});
  const std::vector<SparseDoc> pool = {{0, {0}, 0}};
  CHECK_THROWS_AS(select_closest(model, pool, 2), BatchTooLarge);
  CHECK_THROWS_AS(select_closest(model, pool, 0), InvalidParams);
}

TEST_CASE("select_closest: matches a brute-force sort on random fixtures") {
  Rng rng(88);
  for (int trial = 0; trial < 40; ++trial) {
    const int num_classes = 2 + static_cast<int>(rng.next_below(3));
    const int vocab_size = 10 + static_cast<int>(rng.next_below(20));
    const auto model = random_model(rng, num_classes, vocab_size);
    const int pool_size = 3 + static_cast<int>(rng.next_below(60));
    auto pool = testutil::random_docs(rng, pool_size, vocab_size, num_classes);
    const int k = 1 + static_cast<int>(rng.next_below(pool_size));

    const auto got = select_closest(model, pool, k);
    CHECK(got == brute_force_closest(model, pool, k));

    // Batch boundary: everything selected is at least as uncertain as
    // everything left behind.
    double max_selected = 0.0;
    double min_rest = std::numeric_limits<double>::infinity();
    for (const auto& doc : pool) {
      const double score = uncertainty_score(model, doc);
      if (std::find(got.begin(), got.end(), doc.doc_id) != got.end()) {
        max_selected = std::max(max_selected, score);
      } else {
        min_rest = std::min(min_rest, score);
      }
    }
    CHECK(max_selected <= min_rest);
  }
}

TEST_CASE("select_random: deterministic per seed, exhaustive case") {
  Rng rng(14);
  const auto pool = testutil::random_docs(rng, 1000, 30, 2);
  const auto a = select_random(pool, 10, 42);
  const auto b = select_random(pool, 10, 42);
  CHECK(a == b);
  CHECK(select_random(pool, 10, 43) != a);

  auto everything = select_random(pool, 1000, 7);
  std::vector<int> ids;
  for (const auto& doc : pool) ids.push_back(doc.doc_id);
  std::sort(ids.begin(), ids.end());
  CHECK(everything == ids);
}

TEST_CASE("select_random: distinct ids drawn from the pool") {
  Rng rng(15);
  const auto pool = testutil::random_docs(rng, 120, 20, 2);
  for (int trial = 0; trial < 20; ++trial) {
    const int k = 1 + static_cast<int>(rng.next_below(120));
    const auto picked = select_random(pool, k, rng.next_u64());
    CHECK(static_cast<int>(picked.size()) == k);
    for (std::size_t i = 1; i < picked.size(); ++i) {
      CHECK(picked[i] > picked[i - 1]);  // sorted and distinct
    }
    for (const int id : picked) {
      CHECK(id >= 0);
      CHECK(id < 120);
    }
  }
  CHECK_THROWS_AS(select_random(pool, 121, 1), BatchTooLarge);
}
