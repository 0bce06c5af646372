#include "nbnn/detail/match_table.hpp"

namespace nbnn::detail {

bool match_table_fast_path([[maybe_unused]] const SupportPool& pool,
                           [[maybe_unused]] std::size_t dim) {
#if defined(NBNN_HAVE_AVX512_MATCHER)
    // The quantized kernel assumes contiguous class segments and needs
    // dim * 2047^2 to fit int32; augmented pools and very wide descriptors
    // take the reference path.
    return pool.contiguous() && dim <= 512 &&
           __builtin_cpu_supports("avx512f") && __builtin_cpu_supports("avx512vnni") &&
           __builtin_cpu_supports("avx512bw");
#else
    return false;
#endif
}

MatchTable build_match_table(const DescriptorSet& queries, const SupportPool& pool) {
#if defined(NBNN_HAVE_AVX512_MATCHER)
    if (match_table_fast_path(pool, queries.dim())) {
        return build_match_table_avx512(queries, pool);
    }
#endif
    return build_match_table_reference(queries, pool);
}

}  // namespace nbnn::detail
