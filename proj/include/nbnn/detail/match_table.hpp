#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "nbnn/types.hpp"

namespace nbnn::detail {

// Exact nearest-neighbor structure between one query descriptor set and a
// support pool. All similarities are canonical double-precision cosines; a
// build backend may prefilter with lower precision but must refine every
// reported value and index through nbnn::cosine semantics, so the outputs
// are identical whichever backend ran.
struct MatchTable {
    std::size_t query_count = 0;
    std::size_t class_count = 0;

    // [q * class_count + c]: nearest descriptor of class c for query q.
    struct ClassBest {
        double sim;
        std::size_t pool_index;
    };
    std::vector<ClassBest> per_class;

    // Global nearest pool descriptor per query (lowest pool index on ties).
    std::vector<std::size_t> row_nn;
    std::vector<double> row_nn_sim;

    // Nearest query descriptor per pool descriptor (lowest query index on
    // ties): the back direction of the mutual-nearest-neighbor relation.
    std::vector<std::size_t> col_nn;

    const ClassBest& best(std::size_t q, std::size_t c) const {
        return per_class[q * class_count + c];
    }

    // Nearest class c* of query q: argmax of per-class similarity, lowest
    // class index on ties.
    std::size_t nearest_class(std::size_t q) const;

    // Best similarity among classes other than `exclude` for query q.
    double rival_sim(std::size_t q, std::size_t exclude) const;
};

MatchTable build_match_table(const DescriptorSet& queries, const SupportPool& pool);

// Straight-loop backend; always available.
MatchTable build_match_table_reference(const DescriptorSet& queries, const SupportPool& pool);

#if defined(__AVX512F__) && defined(__AVX512VNNI__) && defined(__AVX512BW__)
#define NBNN_HAVE_AVX512_MATCHER 1
// Quantized-prefilter backend; requires a contiguous pool and dim <= 512.
MatchTable build_match_table_avx512(const DescriptorSet& queries, const SupportPool& pool);
#endif

// True when the fast backend is compiled in, supported by this CPU and
// applicable to the pool.
bool match_table_fast_path(const SupportPool& pool, std::size_t dim);

}  // namespace nbnn::detail
