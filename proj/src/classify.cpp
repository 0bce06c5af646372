#include "nbnn/classify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nbnn/similarity.hpp"

namespace nbnn {

const char* to_string(Method m) {
    switch (m) {
        case Method::DN4: return "dn4";
        case Method::MN4: return "mn4";
        case Method::DMN4: return "dmn4";
        case Method::ODM: return "odm";
    }
    return "?";
}

const char* to_string(ScoreRule r) {
    switch (r) {
        case ScoreRule::NBNN: return "nbnn";
        case ScoreRule::LOG_ODDS: return "logodds";
        case ScoreRule::RANK: return "rank";
    }
    return "?";
}

namespace {

void check_selection(const SelectionResult& selection, const DescriptorSet& queries,
                     const SupportPool& pool) {
    if (selection.pairs.empty()) {
        throw EmptySelection("selection has no pairs");
    }
    for (const auto& p : selection.pairs) {
        if (p.query_index >= queries.size() || p.pool_index >= pool.merged_size()) {
            throw IndexOutOfRange("selection pair references out-of-range index");
        }
    }
}

ClassScores score_from_table(ScoreRule rule, const SelectionResult& selection,
                             const detail::MatchTable& t, const SupportPool& pool) {
    const std::size_t nc = pool.class_count();
    ClassScores scores;
    scores.values.assign(nc, 0.0);
    switch (rule) {
        case ScoreRule::NBNN:
            scores.kind = ScoreKind::NBNN;
            for (std::size_t c = 0; c < nc; ++c) {
                double acc = 0.0;
                for (const auto& p : selection.pairs) {
                    acc += t.best(p.query_index, c).sim;
                }
                scores.values[c] = acc;
            }
            break;
        case ScoreRule::LOG_ODDS:
            scores.kind = ScoreKind::LOG_ODDS;
            for (std::size_t c = 0; c < nc; ++c) {
                double acc = 0.0;
                for (const auto& p : selection.pairs) {
                    acc += t.best(p.query_index, c).sim - t.rival_sim(p.query_index, c);
                }
                scores.values[c] = acc;
            }
            break;
        case ScoreRule::RANK:
            scores.kind = ScoreKind::RANK_COUNT;
            for (const auto& p : selection.pairs) {
                scores.values[t.nearest_class(p.query_index)] += 1.0;
            }
            break;
    }
    return scores;
}

}  // namespace

ClassScores nbnn_score(const SelectionResult& selection, const DescriptorSet& queries,
                       const SupportPool& pool) {
    check_selection(selection, queries, pool);
    return score_from_table(ScoreRule::NBNN, selection, detail::build_match_table(queries, pool),
                            pool);
}

ClassScores log_odds_score(const SelectionResult& selection, const DescriptorSet& queries,
                           const SupportPool& pool) {
    check_selection(selection, queries, pool);
    return score_from_table(ScoreRule::LOG_ODDS, selection,
                            detail::build_match_table(queries, pool), pool);
}

ClassScores rank_counts(const SelectionResult& selection, const DescriptorSet& queries,
                        const SupportPool& pool) {
    check_selection(selection, queries, pool);
    return score_from_table(ScoreRule::RANK, selection, detail::build_match_table(queries, pool),
                            pool);
}

std::size_t rank_classify(const SelectionResult& selection, const DescriptorSet& queries,
                          const SupportPool& pool) {
    return argmax_class(rank_counts(selection, queries, pool));
}

std::vector<double> softmax_probs(const ClassScores& scores) {
    const auto& v = scores.values;
    if (v.empty()) {
        throw InvalidArgument("softmax over empty scores");
    }
    const double m = *std::max_element(v.begin(), v.end());
    std::vector<double> probs(v.size());
    double total = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        probs[i] = std::exp(v[i] - m);
        total += probs[i];
    }
    for (double& p : probs) {
        p /= total;
    }
    return probs;
}

double cross_entropy(const std::vector<double>& probs, std::size_t true_class) {
    if (true_class >= probs.size()) {
        throw IndexOutOfRange("cross_entropy: class index " + std::to_string(true_class) +
                              " out of range for " + std::to_string(probs.size()) + " classes");
    }
    return -std::log(probs[true_class]);
}

Classification classify(const DescriptorSet& queries, const SupportPool& pool, Method method,
                        ScoreRule rule, double odm_k_percent) {
    const detail::MatchTable t = detail::build_match_table(queries, pool);
    SelectionResult selection;
    switch (method) {
        case Method::DN4: selection = detail::all_select(t, pool, queries); break;
        case Method::MN4: selection = detail::mnn_select(t, pool, queries); break;
        case Method::DMN4: selection = detail::dmnn_select(t, pool, queries); break;
        case Method::ODM: selection = detail::odm_select(t, pool, queries, odm_k_percent); break;
    }
    if (selection.pairs.empty()) {
        // No method can produce an empty selection from a non-empty query
        // set, but the fallback keeps future selectors total: score as DN4
        // and flag the trace.
        const SelectionMethod tag = selection.method;
        selection = detail::all_select(t, pool, queries);
        selection.method = tag;
        selection.used_fallback = true;
    }
    ClassScores scores = score_from_table(rule, selection, t, pool);
    return {argmax_class(scores), std::move(scores), std::move(selection)};
}

Classification classify_from_selection(const DescriptorSet& queries, const SupportPool& pool,
                                       SelectionResult selection, ScoreRule rule) {
    const detail::MatchTable t = detail::build_match_table(queries, pool);
    if (selection.pairs.empty()) {
        const SelectionMethod tag = selection.method;
        selection = detail::all_select(t, pool, queries);
        selection.method = tag;
        selection.used_fallback = true;
    }
    ClassScores scores = score_from_table(rule, selection, t, pool);
    return {argmax_class(scores), std::move(scores), std::move(selection)};
}

SupportPool pseudo_label_augment(const SupportPool& pool,
                                 const std::vector<DescriptorSet>& unlabeled) {
    if (unlabeled.empty()) {
        return pool;
    }
    std::vector<double> flat;
    for (const auto& set : unlabeled) {
        if (set.dim() != pool.dim()) {
            throw DimensionMismatch("pseudo_label_augment: unlabeled dim " +
                                    std::to_string(set.dim()) + " vs pool dim " +
                                    std::to_string(pool.dim()));
        }
        flat.insert(flat.end(), set.flat().begin(), set.flat().end());
    }
    const DescriptorSet all(pool.dim(), std::move(flat));
    const detail::MatchTable t = detail::build_match_table(all, pool);
    std::vector<std::size_t> target_class;
    std::vector<Descriptor> extra;
    for (std::size_t u = 0; u < all.size(); ++u) {
        const std::size_t s = t.row_nn[u];
        if (t.col_nn[s] == u) {
            DescriptorView v = all[u];
            target_class.push_back(pool.provenance(s).class_index);
            extra.emplace_back(v.begin(), v.end());
        }
    }
    return pool.augmented(target_class, extra);
}

}  // namespace nbnn
