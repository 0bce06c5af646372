#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nbnn/errors.hpp"

namespace nbnn {

// Euclidean norms at or below this are rejected at ingest: cosine similarity
// is undefined for (near-)zero vectors and silent zeros would corrupt
// accumulated scores.
inline constexpr double kZeroNormThreshold = 1e-12;

using Descriptor = std::vector<double>;
using DescriptorView = std::span<const double>;

// An ordered, validated collection of same-dimensional local descriptors.
// Storage is one flat row-major buffer; descriptor order is stable and
// meaningful (index identity is used for tie-breaking and traces).
class DescriptorSet {
public:
    // Validates dimensions, finiteness and norms. Throws DimensionMismatch,
    // NonFiniteComponent or ZeroNormDescriptor.
    static DescriptorSet from_rows(const std::vector<Descriptor>& rows);

    // Takes a pre-flattened row-major buffer of size count*dim.
    DescriptorSet(std::size_t dim, std::vector<double> flat);

    std::size_t size() const { return count_; }
    std::size_t dim() const { return dim_; }

    DescriptorView operator[](std::size_t i) const {
        return DescriptorView(flat_.data() + i * dim_, dim_);
    }

    const std::vector<double>& flat() const { return flat_; }

    // Euclidean norm of descriptor i, computed once at construction.
    double norm(std::size_t i) const { return norms_[i]; }
    const std::vector<double>& norms() const { return norms_; }

    std::vector<Descriptor> to_rows() const;

    bool operator==(const DescriptorSet& other) const {
        return dim_ == other.dim_ && flat_ == other.flat_;
    }

private:
    std::size_t dim_ = 0;
    std::size_t count_ = 0;
    std::vector<double> flat_;
    std::vector<double> norms_;
};

// Validated construction from raw rows; the single entry point used by
// codecs, generators and bindings.
DescriptorSet validate_descriptor_set(const std::vector<Descriptor>& raw);

// Where a pool descriptor came from.
struct PoolEntry {
    std::size_t class_index;
    std::size_t within_class_index;
};

// Per-class descriptor sets s_c plus the merged pool S with per-descriptor
// class provenance. Pools built by the constructor lay `merged` out as the
// exact concatenation of the class sets in class order; pools returned by
// augmented() keep the original prefix untouched and append new descriptors
// at the tail, so original pool indices stay valid.
class SupportPool {
public:
    SupportPool(std::vector<std::string> class_ids, std::vector<DescriptorSet> class_sets);

    std::size_t class_count() const { return class_ids_.size(); }
    std::size_t merged_size() const { return merged_.size(); }
    std::size_t dim() const { return merged_.dim(); }

    const std::vector<std::string>& class_ids() const { return class_ids_; }
    const std::string& class_id(std::size_t c) const { return class_ids_[c]; }
    const DescriptorSet& class_set(std::size_t c) const { return class_sets_[c]; }
    const DescriptorSet& merged() const { return merged_; }

    const PoolEntry& provenance(std::size_t pool_index) const { return provenance_[pool_index]; }

    // Pool indices belonging to class c: a contiguous [begin, end) range from
    // the original construction plus indices appended by augmented().
    // Both are in ascending pool-index order.
    struct ClassIndices {
        std::size_t begin;
        std::size_t end;
        std::vector<std::size_t> appended;
    };
    const ClassIndices& class_indices(std::size_t c) const { return class_indices_[c]; }

    bool contiguous() const { return appended_count_ == 0; }
    std::size_t appended_count() const { return appended_count_; }

    // New pool with `extra[k]` appended to class `target_class[k]`, in order.
    SupportPool augmented(const std::vector<std::size_t>& target_class,
                          const std::vector<Descriptor>& extra) const;

private:
    SupportPool() = default;

    std::vector<std::string> class_ids_;
    std::vector<DescriptorSet> class_sets_;
    DescriptorSet merged_{1, {1.0}};
    std::vector<PoolEntry> provenance_;
    std::vector<ClassIndices> class_indices_;
    std::size_t appended_count_ = 0;
};

enum class SelectionMethod { MNN, DMNN, ODM, ALL };

const char* to_string(SelectionMethod m);

// One selected query descriptor and the pool descriptor it matched.
struct SelectedPair {
    std::size_t query_index;
    std::size_t pool_index;
    double similarity;
    std::optional<double> tau;
};

// The selected query-descriptor subset q*.
struct SelectionResult {
    SelectionMethod method;
    std::vector<SelectedPair> pairs;
    // Set when a scorer had to fall back to ALL selection because the
    // method produced no pairs.
    bool used_fallback = false;
};

enum class MergeStrategy { MEAN, UNION };

const char* to_string(MergeStrategy s);

// One N-way K-shot task. Class ids are opaque strings; query labels are
// dense indices into class_ids (episode order), which gives argmax
// tie-breaking a total order.
struct Episode {
    int n_ways = 0;
    int k_shots = 0;
    std::vector<std::string> class_ids;                 // N entries, draw order
    std::vector<std::vector<DescriptorSet>> support;    // [N][K]
    std::vector<DescriptorSet> queries;
    std::vector<std::size_t> query_labels;              // index into class_ids
    MergeStrategy merge_strategy = MergeStrategy::UNION;
    // Descriptor sets whose labels are hidden from the classifier; used by
    // semi-supervised pseudo-labeling. May include distractor-class images.
    std::vector<DescriptorSet> unlabeled;

    void validate() const;
};

enum class ScoreKind { NBNN, LOG_ODDS, RANK_COUNT };

const char* to_string(ScoreKind k);

// Per-class scores in the episode's class order.
struct ClassScores {
    ScoreKind kind;
    std::vector<double> values;
};

// Argmax over scores with lowest-index tie-break.
std::size_t argmax_class(const ClassScores& scores);

}  // namespace nbnn
