#pragma once

#include <cstddef>

#include "nbnn/detail/match_table.hpp"
#include "nbnn/types.hpp"

namespace nbnn {

// Relative closeness of one query descriptor: how strongly it votes for its
// nearest support class over the best rival class.
struct TauRecord {
    std::size_t query_index;
    std::size_t nearest_class;     // c*
    double nearest_sim;            // cos(q, NN within class c*)
    double rival_sim;              // cos(q, NN within S minus class c*)
    double tau;                    // nearest_sim - rival_sim
};

TauRecord tau_of(DescriptorView q, const SupportPool& pool);

// Mutual-nearest-neighbor pairs: s is q's nearest pool descriptor and q is
// s's nearest query descriptor, lowest index on ties in both directions.
SelectionResult mnn_select(const DescriptorSet& queries, const SupportPool& pool);

// Group queries by their nearest pool descriptor; keep the query with the
// largest tau per group (lowest query index on tau ties).
SelectionResult dmnn_select(const DescriptorSet& queries, const SupportPool& pool);

// Top ceil(|Q| * k / 100) queries by tau, each paired with its nearest pool
// descriptor. Pool indices may repeat.
SelectionResult odm_select(const DescriptorSet& queries, const SupportPool& pool, double k_percent);

// Every query paired with its nearest pool descriptor (no selection).
SelectionResult all_select(const DescriptorSet& queries, const SupportPool& pool);

namespace detail {
// Variants reusing an existing match table; the public functions above
// build one and forward here.
SelectionResult mnn_select(const MatchTable& table, const SupportPool& pool,
                           const DescriptorSet& queries);
SelectionResult dmnn_select(const MatchTable& table, const SupportPool& pool,
                            const DescriptorSet& queries);
SelectionResult odm_select(const MatchTable& table, const SupportPool& pool,
                           const DescriptorSet& queries, double k_percent);
SelectionResult all_select(const MatchTable& table, const SupportPool& pool,
                           const DescriptorSet& queries);
}  // namespace detail

}  // namespace nbnn
