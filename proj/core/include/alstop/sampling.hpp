#pragma once

#include <cstdint>
#include <vector>

#include "alstop/linear_model.hpp"

namespace alstop {

// Distance-to-hyperplane proxy: |decision value| for binary models,
// |max decision value| for one-vs-rest models. Smaller means more uncertain.
double uncertainty_score(const ModelSnapshot& model, const SparseDoc& doc);

// The k pool docs with the smallest uncertainty score, sorted by
// (score, doc_id); ties on score break toward the lower doc id.
std::vector<int> select_closest(const ModelSnapshot& model,
                                const std::vector<SparseDoc>& pool, int k);

// Uniform sample of k doc ids without replacement, deterministic per seed;
// returned in ascending id order.
std::vector<int> select_random(const std::vector<SparseDoc>& pool, int k,
                               std::uint64_t seed);

}  // namespace alstop
