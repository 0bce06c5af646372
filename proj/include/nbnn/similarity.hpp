#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "nbnn/types.hpp"

namespace nbnn {

// Plain sequential dot product. This is the one canonical reduction used for
// every similarity the engine reports, so independently computed values can
// be compared bitwise.
double dot(DescriptorView a, DescriptorView b);

double norm(DescriptorView a);

// cos(a, b) = dot(a, b) / (|a| * |b|). Symmetric bitwise (the reduction
// visits components in the same order for either argument order) and
// scale-invariant up to rounding.
double cosine(DescriptorView a, DescriptorView b);

// cosine with both norms already known; same expression, same rounding.
double cosine_with_norms(DescriptorView a, DescriptorView b, double norm_a, double norm_b);

// Dense |Q| x |S| cosine matrix.
class SimilarityMatrix {
public:
    SimilarityMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    double at(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
    double& at(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const std::vector<double>& data() const { return data_; }

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> data_;
};

SimilarityMatrix similarity_matrix(const DescriptorSet& queries, const DescriptorSet& pool);

// Index and similarity of the most similar descriptor in `set`; equal
// similarities resolve to the lowest index.
std::pair<std::size_t, double> nearest_in_set(DescriptorView q, const DescriptorSet& set);

}  // namespace nbnn
