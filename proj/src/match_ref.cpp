#include <limits>

#include "nbnn/detail/match_table.hpp"
#include "nbnn/similarity.hpp"

namespace nbnn::detail {

std::size_t MatchTable::nearest_class(std::size_t q) const {
    std::size_t best_c = 0;
    for (std::size_t c = 1; c < class_count; ++c) {
        if (best(q, c).sim > best(q, best_c).sim) {
            best_c = c;
        }
    }
    return best_c;
}

double MatchTable::rival_sim(std::size_t q, std::size_t exclude) const {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < class_count; ++c) {
        if (c == exclude) continue;
        best = std::max(best, this->best(q, c).sim);
    }
    return best;
}

MatchTable build_match_table_reference(const DescriptorSet& queries, const SupportPool& pool) {
    if (queries.dim() != pool.dim()) {
        throw DimensionMismatch("match table: query dim " + std::to_string(queries.dim()) +
                                " vs pool dim " + std::to_string(pool.dim()));
    }
    const std::size_t nq = queries.size();
    const std::size_t ns = pool.merged_size();
    const std::size_t nc = pool.class_count();
    const DescriptorSet& merged = pool.merged();

    MatchTable t;
    t.query_count = nq;
    t.class_count = nc;
    t.per_class.assign(nq * nc, {-std::numeric_limits<double>::infinity(), 0});
    t.row_nn.assign(nq, 0);
    t.row_nn_sim.assign(nq, -std::numeric_limits<double>::infinity());
    t.col_nn.assign(ns, 0);

    std::vector<double> col_best(ns, -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < nq; ++i) {
        DescriptorView q = queries[i];
        const double nrm_q = queries.norm(i);
        for (std::size_t j = 0; j < ns; ++j) {
            const double s = cosine_with_norms(q, merged[j], nrm_q, merged.norm(j));
            auto& slot = t.per_class[i * nc + pool.provenance(j).class_index];
            if (s > slot.sim) {
                slot.sim = s;
                slot.pool_index = j;
            }
            if (s > col_best[j]) {
                col_best[j] = s;
                t.col_nn[j] = i;
            }
        }
        // Global nearest: merge the per-class winners. Every class winner is
        // already the lowest index within its class, and class segments are
        // laid out in ascending pool order for original descriptors, so
        // comparing (sim, pool_index) yields the lowest-pool-index argmax.
        std::size_t best_idx = 0;
        double best_sim = -std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < nc; ++c) {
            const auto& slot = t.per_class[i * nc + c];
            if (slot.sim > best_sim || (slot.sim == best_sim && slot.pool_index < best_idx)) {
                best_sim = slot.sim;
                best_idx = slot.pool_index;
            }
        }
        t.row_nn[i] = best_idx;
        t.row_nn_sim[i] = best_sim;
    }
    return t;
}

}  // namespace nbnn::detail
