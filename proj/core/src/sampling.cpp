#include "alstop/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "alstop/rng.hpp"

namespace alstop {

namespace {

void check_batch(std::size_t pool_size, int k) {
  if (k < 1) throw InvalidParams("batch size must be >= 1");
  if (static_cast<std::size_t>(k) > pool_size) {
    throw BatchTooLarge("batch of " + std::to_string(k) +
                        " exceeds pool of " + std::to_string(pool_size));
  }
}

}  // namespace

double uncertainty_score(const ModelSnapshot& model, const SparseDoc& doc) {
  const auto values = decision_values(model, doc);
  if (model.binary()) {
    return std::fabs(values[0]);
  }
  // Distance of the top-scoring one-vs-rest hyperplane.
  return std::fabs(*std::max_element(values.begin(), values.end()));
}

std::vector<int> select_closest(const ModelSnapshot& model,
                                const std::vector<SparseDoc>& pool, int k) {
  check_batch(pool.size(), k);
  std::vector<std::pair<double, int>> scored;
  scored.reserve(pool.size());
  for (const auto& doc : pool) {
    scored.emplace_back(uncertainty_score(model, doc), doc.doc_id);
  }
  std::sort(scored.begin(), scored.end());
  std::vector<int> selected(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) selected[i] = scored[i].second;
  return selected;
}

std::vector<int> select_random(const std::vector<SparseDoc>& pool, int k,
                               std::uint64_t seed) {
  check_batch(pool.size(), k);
  std::vector<int> ids(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) ids[i] = pool[i].doc_id;
  std::sort(ids.begin(), ids.end());

  // Partial Fisher-Yates: the first k slots end up a uniform sample.
  Rng rng(seed);
  const std::size_t n = ids.size();
  for (std::size_t i = 0; i < static_cast<std::size_t>(k); ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.next_below(n - i));
    std::swap(ids[i], ids[j]);
  }
  ids.resize(static_cast<std::size_t>(k));
  std::sort(ids.begin(), ids.end());
  return ids;
}

}  // namespace alstop
