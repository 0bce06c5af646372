#include "nbnn/similarity.hpp"

#include <cmath>

namespace nbnn {

double dot(DescriptorView a, DescriptorView b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        acc += a[i] * b[i];
    }
    return acc;
}

double norm(DescriptorView a) {
    return std::sqrt(dot(a, a));
}

double cosine(DescriptorView a, DescriptorView b) {
    if (a.size() != b.size()) {
        throw DimensionMismatch("cosine: dimensions " + std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()));
    }
    return cosine_with_norms(a, b, norm(a), norm(b));
}

double cosine_with_norms(DescriptorView a, DescriptorView b, double norm_a, double norm_b) {
    if (norm_a <= kZeroNormThreshold || norm_b <= kZeroNormThreshold) {
        throw ZeroNormDescriptor("cosine undefined for (near-)zero vectors");
    }
    return dot(a, b) / (norm_a * norm_b);
}

SimilarityMatrix similarity_matrix(const DescriptorSet& queries, const DescriptorSet& pool) {
    if (queries.dim() != pool.dim()) {
        throw DimensionMismatch("similarity_matrix: dimensions " + std::to_string(queries.dim()) +
                                " vs " + std::to_string(pool.dim()));
    }
    SimilarityMatrix m(queries.size(), pool.size());
    for (std::size_t i = 0; i < queries.size(); ++i) {
        DescriptorView q = queries[i];
        const double nq = queries.norm(i);
        for (std::size_t j = 0; j < pool.size(); ++j) {
            m.at(i, j) = cosine_with_norms(q, pool[j], nq, pool.norm(j));
        }
    }
    return m;
}

std::pair<std::size_t, double> nearest_in_set(DescriptorView q, const DescriptorSet& set) {
    if (q.size() != set.dim()) {
        throw DimensionMismatch("nearest_in_set: dimensions " + std::to_string(q.size()) +
                                " vs " + std::to_string(set.dim()));
    }
    const double nq = norm(q);
    std::size_t best = 0;
    double best_sim = cosine_with_norms(q, set[0], nq, set.norm(0));
    for (std::size_t j = 1; j < set.size(); ++j) {
        const double s = cosine_with_norms(q, set[j], nq, set.norm(j));
        if (s > best_sim) {
            best_sim = s;
            best = j;
        }
    }
    return {best, best_sim};
}

}  // namespace nbnn
