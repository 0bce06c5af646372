#pragma once

#include <cstddef>
#include <vector>

#include "nbnn/detail/match_table.hpp"
#include "nbnn/selection.hpp"
#include "nbnn/types.hpp"

namespace nbnn {

enum class Method { DN4, MN4, DMN4, ODM };
enum class ScoreRule { NBNN, LOG_ODDS, RANK };

const char* to_string(Method m);
const char* to_string(ScoreRule r);

// Accumulated per-class similarity: for each class c, the sum over selected
// query descriptors of cos(q, NN within s_c). The per-class nearest neighbor
// is recomputed inside each class set, not taken from the selection's
// matched pool descriptor.
ClassScores nbnn_score(const SelectionResult& selection, const DescriptorSet& queries,
                       const SupportPool& pool);

// Accumulated relative similarity: per class c, the sum over selected query
// descriptors of cos(q, NN within s_c) - cos(q, NN within S minus s_c).
ClassScores log_odds_score(const SelectionResult& selection, const DescriptorSet& queries,
                           const SupportPool& pool);

// Per-class vote counts: each selected descriptor votes for its nearest
// class c*. Returned for inspection alongside rank_classify.
ClassScores rank_counts(const SelectionResult& selection, const DescriptorSet& queries,
                        const SupportPool& pool);

// Class with the most votes (lowest class index on ties).
std::size_t rank_classify(const SelectionResult& selection, const DescriptorSet& queries,
                          const SupportPool& pool);

// Max-shifted softmax; probabilities sum to 1 and are invariant to uniform
// score shifts.
std::vector<double> softmax_probs(const ClassScores& scores);

// -log p(true_class).
double cross_entropy(const std::vector<double>& probs, std::size_t true_class);

struct Classification {
    std::size_t predicted_class;
    ClassScores scores;
    SelectionResult selection;
};

// Runs the method's selection then the score rule. DN4 = ALL + NBNN,
// MN4 = MNN + NBNN, DMN4 = DMNN + NBNN by default; any selection combines
// with any rule. An empty selection falls back to ALL and flags the result.
Classification classify(const DescriptorSet& queries, const SupportPool& pool, Method method,
                        ScoreRule rule = ScoreRule::NBNN, double odm_k_percent = 20.0);

// Same, but with the selection already made (fallback applies here).
Classification classify_from_selection(const DescriptorSet& queries, const SupportPool& pool,
                                       SelectionResult selection, ScoreRule rule);

// Single-pass semi-supervised augmentation: every descriptor from the
// unlabeled sets that forms a mutual-nearest-neighbor pair with a pool
// descriptor is appended to that descriptor's class. Original pool indices
// are preserved; appended descriptors go after all original ones.
SupportPool pseudo_label_augment(const SupportPool& pool,
                                 const std::vector<DescriptorSet>& unlabeled);

}  // namespace nbnn
