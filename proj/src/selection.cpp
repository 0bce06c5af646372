#include "nbnn/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "nbnn/similarity.hpp"

namespace nbnn {

TauRecord tau_of(DescriptorView q, const SupportPool& pool) {
    if (q.size() != pool.dim()) {
        throw DimensionMismatch("tau_of: dimensions " + std::to_string(q.size()) + " vs " +
                                std::to_string(pool.dim()));
    }
    const std::size_t nc = pool.class_count();
    std::vector<double> class_sim(nc);
    for (std::size_t c = 0; c < nc; ++c) {
        class_sim[c] = nearest_in_set(q, pool.class_set(c)).second;
    }
    std::size_t c_star = 0;
    for (std::size_t c = 1; c < nc; ++c) {
        if (class_sim[c] > class_sim[c_star]) {
            c_star = c;
        }
    }
    double rival = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < nc; ++c) {
        if (c != c_star) {
            rival = std::max(rival, class_sim[c]);
        }
    }
    return {0, c_star, class_sim[c_star], rival, class_sim[c_star] - rival};
}

namespace detail {

namespace {

double tau_from_table(const MatchTable& t, std::size_t q) {
    const std::size_t c_star = t.nearest_class(q);
    return t.best(q, c_star).sim - t.rival_sim(q, c_star);
}

}  // namespace

SelectionResult mnn_select(const MatchTable& t, const SupportPool&, const DescriptorSet&) {
    SelectionResult out{SelectionMethod::MNN, {}, false};
    for (std::size_t q = 0; q < t.query_count; ++q) {
        const std::size_t s = t.row_nn[q];
        if (t.col_nn[s] == q) {
            out.pairs.push_back({q, s, t.row_nn_sim[q], std::nullopt});
        }
    }
    return out;
}

SelectionResult dmnn_select(const MatchTable& t, const SupportPool& pool, const DescriptorSet&) {
    // One winner per nonempty nearest-neighbor group: the query with the
    // largest tau, lowest query index on ties.
    SelectionResult out{SelectionMethod::DMNN, {}, false};
    std::vector<std::size_t> winner(pool.merged_size(), SIZE_MAX);
    std::vector<double> winner_tau(pool.merged_size(), 0.0);
    for (std::size_t q = 0; q < t.query_count; ++q) {
        const std::size_t s = t.row_nn[q];
        const double tau = tau_from_table(t, q);
        if (winner[s] == SIZE_MAX || tau > winner_tau[s]) {
            winner[s] = q;
            winner_tau[s] = tau;
        }
    }
    for (std::size_t s = 0; s < winner.size(); ++s) {
        if (winner[s] != SIZE_MAX) {
            out.pairs.push_back({winner[s], s, t.row_nn_sim[winner[s]], winner_tau[s]});
        }
    }
    std::sort(out.pairs.begin(), out.pairs.end(),
              [](const SelectedPair& a, const SelectedPair& b) {
                  return a.query_index < b.query_index;
              });
    return out;
}

SelectionResult odm_select(const MatchTable& t, const SupportPool&, const DescriptorSet&,
                           double k_percent) {
    if (!(k_percent > 0.0) || k_percent > 100.0) {
        throw InvalidPercent("odm_select: k must be in (0, 100], got " +
                             std::to_string(k_percent));
    }
    const std::size_t nq = t.query_count;
    const auto keep = static_cast<std::size_t>(
        std::ceil(static_cast<double>(nq) * k_percent / 100.0));
    std::vector<double> tau(nq);
    for (std::size_t q = 0; q < nq; ++q) {
        tau[q] = tau_from_table(t, q);
    }
    std::vector<std::size_t> order(nq);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return tau[a] > tau[b];  // stable: equal taus keep ascending index
    });
    order.resize(std::min(keep, nq));
    std::sort(order.begin(), order.end());
    SelectionResult out{SelectionMethod::ODM, {}, false};
    for (std::size_t q : order) {
        out.pairs.push_back({q, t.row_nn[q], t.row_nn_sim[q], tau[q]});
    }
    return out;
}

SelectionResult all_select(const MatchTable& t, const SupportPool&, const DescriptorSet&) {
    SelectionResult out{SelectionMethod::ALL, {}, false};
    for (std::size_t q = 0; q < t.query_count; ++q) {
        out.pairs.push_back({q, t.row_nn[q], t.row_nn_sim[q], std::nullopt});
    }
    return out;
}

}  // namespace detail

SelectionResult mnn_select(const DescriptorSet& queries, const SupportPool& pool) {
    return detail::mnn_select(detail::build_match_table(queries, pool), pool, queries);
}

SelectionResult dmnn_select(const DescriptorSet& queries, const SupportPool& pool) {
    return detail::dmnn_select(detail::build_match_table(queries, pool), pool, queries);
}

SelectionResult odm_select(const DescriptorSet& queries, const SupportPool& pool,
                           double k_percent) {
    return detail::odm_select(detail::build_match_table(queries, pool), pool, queries, k_percent);
}

SelectionResult all_select(const DescriptorSet& queries, const SupportPool& pool) {
    return detail::all_select(detail::build_match_table(queries, pool), pool, queries);
}

}  // namespace nbnn
