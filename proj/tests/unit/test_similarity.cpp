#include <doctest.h>

#include <cmath>

#include "nbnn/similarity.hpp"
#include "support/instances.hpp"

using namespace nbnn;

namespace {

Descriptor scaled(const Descriptor& d, double s) {
    Descriptor out = d;
    for (double& v : out) {
        v *= s;
    }
    return out;
}

}  // namespace

TEST_CASE("cosine basics") {
    CHECK(cosine(Descriptor{1, 0}, Descriptor{0, 1}) == 0.0);
    CHECK(cosine(Descriptor{2, 0}, Descriptor{1, 0}) == 1.0);
    CHECK(cosine(Descriptor{1, 1}, Descriptor{1, 0}) ==
          doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK_THROWS_AS(cosine(Descriptor{1, 0}, Descriptor{1, 0, 0}), DimensionMismatch);
    CHECK_THROWS_AS(cosine(Descriptor{0, 0}, Descriptor{1, 0}), ZeroNormDescriptor);
}

TEST_CASE("cosine is symmetric bitwise and scale-invariant to 1e-12") {
    Rng rng(derive_stream_seed(7, 0));
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t dim = 1 + rng.uniform_index(16);
        Descriptor a(dim), b(dim);
        for (std::size_t i = 0; i < dim; ++i) {
            a[i] = 2.0 * rng.uniform01() - 1.0;
            b[i] = 2.0 * rng.uniform01() - 1.0;
        }
        a[0] += 1.0;  // keep norms clearly nonzero
        b[0] += 1.0;
        const double ab = cosine(a, b);
        CHECK(ab == cosine(b, a));
        for (double lambda : {1e-3, 1.0, 1e3}) {
            CHECK(std::abs(cosine(scaled(a, lambda), b) - ab) <= 1e-12);
        }
    }
}

TEST_CASE("similarity matrix matches pairwise cosine") {
    const DescriptorSet basis = validate_descriptor_set({{1, 0}, {0, 1}});
    const SimilarityMatrix identity = similarity_matrix(basis, basis);
    CHECK(identity.at(0, 0) == 1.0);
    CHECK(identity.at(0, 1) == 0.0);
    CHECK(identity.at(1, 0) == 0.0);
    CHECK(identity.at(1, 1) == 1.0);

    const DescriptorSet one = validate_descriptor_set({{1, 0}});
    const SimilarityMatrix single = similarity_matrix(one, one);
    CHECK(single.rows() == 1);
    CHECK(single.at(0, 0) == 1.0);

    // Random 5x7, dim 4, against a scalar double-loop oracle.
    Rng rng(derive_stream_seed(11, 0));
    std::vector<Descriptor> q_rows(5, Descriptor(4)), s_rows(7, Descriptor(4));
    for (auto& r : q_rows) {
        for (double& v : r) v = 2.0 * rng.uniform01() - 1.0;
    }
    for (auto& r : s_rows) {
        for (double& v : r) v = 2.0 * rng.uniform01() - 1.0;
    }
    const DescriptorSet q = validate_descriptor_set(q_rows);
    const DescriptorSet s = validate_descriptor_set(s_rows);
    const SimilarityMatrix m = similarity_matrix(q, s);
    for (std::size_t i = 0; i < 5; ++i) {
        for (std::size_t j = 0; j < 7; ++j) {
            double dot_ij = 0.0, qq = 0.0, ss = 0.0;
            for (std::size_t k = 0; k < 4; ++k) {
                dot_ij += q_rows[i][k] * s_rows[j][k];
                qq += q_rows[i][k] * q_rows[i][k];
                ss += s_rows[j][k] * s_rows[j][k];
            }
            CHECK(std::abs(m.at(i, j) - dot_ij / std::sqrt(qq * ss)) <= 1e-12);
        }
    }
    CHECK_THROWS_AS(similarity_matrix(q, validate_descriptor_set({{1, 0}})), DimensionMismatch);
}

TEST_CASE("nearest_in_set picks the maximal cosine, lowest index on ties") {
    const auto [idx, sim] =
        nearest_in_set(Descriptor{1, 0}, validate_descriptor_set({{0, 1}, {1, 0.1}}));
    CHECK(idx == 1);
    CHECK(sim == doctest::Approx(0.99503719020998915).epsilon(1e-12));

    const auto tie = nearest_in_set(Descriptor{1, 0}, validate_descriptor_set({{1, 0}, {1, 0}}));
    CHECK(tie.first == 0);
    CHECK(tie.second == 1.0);

    const auto single = nearest_in_set(Descriptor{3, 4}, validate_descriptor_set({{1, 2}}));
    CHECK(single.first == 0);
    CHECK(single.second == cosine(Descriptor{3, 4}, Descriptor{1, 2}));
}

TEST_CASE("nearest_in_set agrees with the similarity-matrix argmax") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto inst = testing::random_instance(seed);
        const SimilarityMatrix m = similarity_matrix(inst.queries, inst.pool.merged());
        for (std::size_t i = 0; i < inst.queries.size(); ++i) {
            std::size_t arg = 0;
            for (std::size_t j = 1; j < m.cols(); ++j) {
                if (m.at(i, j) > m.at(i, arg)) {
                    arg = j;
                }
            }
            const auto [idx, sim] = nearest_in_set(inst.queries[i], inst.pool.merged());
            CHECK(idx == arg);
            CHECK(sim == m.at(i, arg));
        }
    }
}

TEST_CASE("self-nearest similarity is within rounding of one") {
    for (std::uint64_t seed = 100; seed < 110; ++seed) {
        const auto inst = testing::random_instance(seed);
        const auto& merged = inst.pool.merged();
        for (std::size_t j = 0; j < merged.size(); ++j) {
            const auto [idx, sim] = nearest_in_set(merged[j], merged);
            CHECK(sim >= 1.0 - 1e-12);
        }
    }
}
