#include "oracle/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nbnn/similarity.hpp"

namespace nbnn::oracle {

namespace {

// Nearest pool descriptor of q by a plain scalar loop over the merged pool.
std::size_t nn_in_pool(DescriptorView q, const SupportPool& pool) {
    std::size_t best = 0;
    double best_sim = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < pool.merged_size(); ++j) {
        const double s = cosine(q, pool.merged()[j]);
        if (s > best_sim) {
            best_sim = s;
            best = j;
        }
    }
    return best;
}

// Nearest query descriptor of one pool descriptor.
std::size_t nn_in_queries(DescriptorView s, const DescriptorSet& queries) {
    std::size_t best = 0;
    double best_sim = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < queries.size(); ++i) {
        const double v = cosine(queries[i], s);
        if (v > best_sim) {
            best_sim = v;
            best = i;
        }
    }
    return best;
}

// Max cosine between q and an explicit descriptor list.
double max_sim(DescriptorView q, const std::vector<Descriptor>& list) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& d : list) {
        best = std::max(best, cosine(q, DescriptorView(d)));
    }
    return best;
}

}  // namespace

std::vector<std::pair<std::size_t, std::size_t>> oracle_mnn(const DescriptorSet& queries,
                                                            const SupportPool& pool) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < queries.size(); ++i) {
        const std::size_t s = nn_in_pool(queries[i], pool);
        if (nn_in_queries(pool.merged()[s], queries) == i) {
            pairs.emplace_back(i, s);
        }
    }
    return pairs;
}

TauRecord oracle_tau(DescriptorView q, const SupportPool& pool) {
    // c* by exhaustive per-class max.
    std::size_t c_star = 0;
    double best_sim = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < pool.class_count(); ++c) {
        const auto rows = pool.class_set(c).to_rows();
        const double s = max_sim(q, rows);
        if (s > best_sim) {
            best_sim = s;
            c_star = c;
        }
    }
    // Rival over the explicitly built complement S \ s_{c*}.
    std::vector<Descriptor> complement;
    for (std::size_t j = 0; j < pool.merged_size(); ++j) {
        if (pool.provenance(j).class_index != c_star) {
            DescriptorView v = pool.merged()[j];
            complement.emplace_back(v.begin(), v.end());
        }
    }
    const double rival = max_sim(q, complement);
    return {0, c_star, best_sim, rival, best_sim - rival};
}

std::vector<std::pair<std::size_t, std::size_t>> oracle_dmnn(const DescriptorSet& queries,
                                                             const SupportPool& pool) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    std::vector<std::size_t> nn(queries.size());
    std::vector<double> tau(queries.size());
    for (std::size_t i = 0; i < queries.size(); ++i) {
        nn[i] = nn_in_pool(queries[i], pool);
        tau[i] = oracle_tau(queries[i], pool).tau;
    }
    for (std::size_t j = 0; j < pool.merged_size(); ++j) {
        std::size_t winner = queries.size();
        for (std::size_t i = 0; i < queries.size(); ++i) {
            if (nn[i] != j) continue;
            if (winner == queries.size() || tau[i] > tau[winner]) {
                winner = i;
            }
        }
        if (winner != queries.size()) {
            pairs.emplace_back(winner, j);
        }
    }
    std::sort(pairs.begin(), pairs.end());
    return pairs;
}

std::vector<std::pair<std::size_t, std::size_t>> oracle_odm(const DescriptorSet& queries,
                                                            const SupportPool& pool,
                                                            double k_percent) {
    const std::size_t keep = static_cast<std::size_t>(
        std::ceil(static_cast<double>(queries.size()) * k_percent / 100.0));
    std::vector<std::size_t> order(queries.size());
    std::vector<double> tau(queries.size());
    for (std::size_t i = 0; i < queries.size(); ++i) {
        order[i] = i;
        tau[i] = oracle_tau(queries[i], pool).tau;
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return tau[a] > tau[b]; });
    order.resize(std::min(keep, queries.size()));
    std::sort(order.begin(), order.end());
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i : order) {
        pairs.emplace_back(i, nn_in_pool(queries[i], pool));
    }
    return pairs;
}

std::vector<std::pair<std::size_t, std::size_t>> oracle_all(const DescriptorSet& queries,
                                                            const SupportPool& pool) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < queries.size(); ++i) {
        pairs.emplace_back(i, nn_in_pool(queries[i], pool));
    }
    return pairs;
}

ClassScores oracle_scores(const SelectionResult& selection, const DescriptorSet& queries,
                          const SupportPool& pool, ScoreRule rule) {
    ClassScores scores;
    scores.values.assign(pool.class_count(), 0.0);
    switch (rule) {
        case ScoreRule::NBNN: {
            scores.kind = ScoreKind::NBNN;
            for (std::size_t c = 0; c < pool.class_count(); ++c) {
                const auto rows = pool.class_set(c).to_rows();
                for (const auto& p : selection.pairs) {
                    scores.values[c] += max_sim(queries[p.query_index], rows);
                }
            }
            break;
        }
        case ScoreRule::LOG_ODDS: {
            scores.kind = ScoreKind::LOG_ODDS;
            for (std::size_t c = 0; c < pool.class_count(); ++c) {
                const auto rows = pool.class_set(c).to_rows();
                std::vector<Descriptor> complement;
                for (std::size_t j = 0; j < pool.merged_size(); ++j) {
                    if (pool.provenance(j).class_index != c) {
                        DescriptorView v = pool.merged()[j];
                        complement.emplace_back(v.begin(), v.end());
                    }
                }
                for (const auto& p : selection.pairs) {
                    scores.values[c] += max_sim(queries[p.query_index], rows) -
                                        max_sim(queries[p.query_index], complement);
                }
            }
            break;
        }
        case ScoreRule::RANK: {
            scores.kind = ScoreKind::RANK_COUNT;
            for (const auto& p : selection.pairs) {
                scores.values[oracle_tau(queries[p.query_index], pool).nearest_class] += 1.0;
            }
            break;
        }
    }
    return scores;
}

std::size_t oracle_rank_classify(const SelectionResult& selection, const DescriptorSet& queries,
                                 const SupportPool& pool) {
    const ClassScores counts = oracle_scores(selection, queries, pool, ScoreRule::RANK);
    std::size_t best = 0;
    for (std::size_t c = 1; c < counts.values.size(); ++c) {
        if (counts.values[c] > counts.values[best]) {
            best = c;
        }
    }
    return best;
}

}  // namespace nbnn::oracle
