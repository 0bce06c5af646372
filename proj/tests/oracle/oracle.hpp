#pragma once

// Brute-force reference implementations used only by tests and acceptance
// runs. Deliberately naive and loop-based: no similarity matrix, no shared
// search structure with the engine — only the core types and the scalar
// cosine are reused. Tie-break rules are identical (lowest index wins), so
// selection outputs must match the engine exactly, not approximately.

#include <cstddef>
#include <utility>
#include <vector>

#include "nbnn/classify.hpp"
#include "nbnn/selection.hpp"
#include "nbnn/types.hpp"

namespace nbnn::oracle {

// Mutual-nearest-neighbor pairs by exhaustive search.
std::vector<std::pair<std::size_t, std::size_t>> oracle_mnn(const DescriptorSet& queries,
                                                            const SupportPool& pool);

// Relative closeness of one query descriptor, with the rival similarity
// taken over an explicitly constructed S-minus-s_c* descriptor list.
TauRecord oracle_tau(DescriptorView q, const SupportPool& pool);

// Per-group argmax-tau selection by exhaustive grouping.
std::vector<std::pair<std::size_t, std::size_t>> oracle_dmnn(const DescriptorSet& queries,
                                                             const SupportPool& pool);

// Top-k-percent-by-tau selection.
std::vector<std::pair<std::size_t, std::size_t>> oracle_odm(const DescriptorSet& queries,
                                                            const SupportPool& pool,
                                                            double k_percent);

// Every query paired with its nearest pool descriptor.
std::vector<std::pair<std::size_t, std::size_t>> oracle_all(const DescriptorSet& queries,
                                                            const SupportPool& pool);

// Reference scoring: per-descriptor, per-class scalar loops, including the
// explicit complement construction for the log-odds rule.
ClassScores oracle_scores(const SelectionResult& selection, const DescriptorSet& queries,
                          const SupportPool& pool, ScoreRule rule);

// Reference rank-count decision.
std::size_t oracle_rank_classify(const SelectionResult& selection, const DescriptorSet& queries,
                                 const SupportPool& pool);

}  // namespace nbnn::oracle
