#include "nbnn/types.hpp"

#include <cmath>
#include <cstring>
#include <set>

#include "nbnn/similarity.hpp"

namespace nbnn {

namespace {

void validate_components(const std::vector<double>& flat, std::size_t dim) {
    const std::size_t count = flat.size() / dim;
    for (std::size_t i = 0; i < count; ++i) {
        DescriptorView d(flat.data() + i * dim, dim);
        for (double v : d) {
            if (!std::isfinite(v)) {
                throw NonFiniteComponent("descriptor " + std::to_string(i) +
                                         " has a non-finite component");
            }
        }
    }
}

}  // namespace

DescriptorSet DescriptorSet::from_rows(const std::vector<Descriptor>& rows) {
    if (rows.empty()) {
        throw InvalidArgument("descriptor set must be non-empty");
    }
    const std::size_t dim = rows.front().size();
    if (dim == 0) {
        throw InvalidArgument("descriptor dimension must be positive");
    }
    std::vector<double> flat;
    flat.reserve(rows.size() * dim);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != dim) {
            throw DimensionMismatch("descriptor " + std::to_string(i) + " has length " +
                                    std::to_string(rows[i].size()) + ", expected " +
                                    std::to_string(dim));
        }
        flat.insert(flat.end(), rows[i].begin(), rows[i].end());
    }
    return DescriptorSet(dim, std::move(flat));
}

DescriptorSet::DescriptorSet(std::size_t dim, std::vector<double> flat)
    : dim_(dim), flat_(std::move(flat)) {
    if (dim_ == 0) {
        throw InvalidArgument("descriptor dimension must be positive");
    }
    if (flat_.empty() || flat_.size() % dim_ != 0) {
        throw DimensionMismatch("flat buffer size " + std::to_string(flat_.size()) +
                                " is not a positive multiple of dim " + std::to_string(dim_));
    }
    count_ = flat_.size() / dim_;
    validate_components(flat_, dim_);
    norms_.resize(count_);
    for (std::size_t i = 0; i < count_; ++i) {
        norms_[i] = nbnn::norm((*this)[i]);
        if (norms_[i] <= kZeroNormThreshold) {
            throw ZeroNormDescriptor("descriptor " + std::to_string(i) +
                                     " has (near-)zero norm; cosine undefined");
        }
    }
}

std::vector<Descriptor> DescriptorSet::to_rows() const {
    std::vector<Descriptor> rows(count_);
    for (std::size_t i = 0; i < count_; ++i) {
        DescriptorView v = (*this)[i];
        rows[i].assign(v.begin(), v.end());
    }
    return rows;
}

DescriptorSet validate_descriptor_set(const std::vector<Descriptor>& raw) {
    return DescriptorSet::from_rows(raw);
}

SupportPool::SupportPool(std::vector<std::string> class_ids, std::vector<DescriptorSet> class_sets)
    : class_ids_(std::move(class_ids)), class_sets_(std::move(class_sets)) {
    if (class_ids_.size() != class_sets_.size()) {
        throw InvalidArgument("class id and class set counts differ");
    }
    if (class_ids_.size() < 2) {
        throw InvalidArgument("support pool needs at least 2 classes");
    }
    std::set<std::string> seen(class_ids_.begin(), class_ids_.end());
    if (seen.size() != class_ids_.size()) {
        throw InvalidArgument("duplicate class id in support pool");
    }
    const std::size_t dim = class_sets_.front().dim();
    std::size_t total = 0;
    for (const auto& set : class_sets_) {
        if (set.dim() != dim) {
            throw DimensionMismatch("support classes have differing descriptor dimensions");
        }
        total += set.size();
    }
    std::vector<double> flat;
    flat.reserve(total * dim);
    provenance_.reserve(total);
    class_indices_.resize(class_sets_.size());
    std::size_t offset = 0;
    for (std::size_t c = 0; c < class_sets_.size(); ++c) {
        const auto& set = class_sets_[c];
        flat.insert(flat.end(), set.flat().begin(), set.flat().end());
        for (std::size_t i = 0; i < set.size(); ++i) {
            provenance_.push_back({c, i});
        }
        class_indices_[c].begin = offset;
        class_indices_[c].end = offset + set.size();
        offset += set.size();
    }
    merged_ = DescriptorSet(dim, std::move(flat));
}

SupportPool SupportPool::augmented(const std::vector<std::size_t>& target_class,
                                   const std::vector<Descriptor>& extra) const {
    if (target_class.size() != extra.size()) {
        throw InvalidArgument("augmented: class/descriptor count mismatch");
    }
    SupportPool out = *this;
    if (extra.empty()) {
        return out;
    }
    const std::size_t dim = this->dim();
    std::vector<double> flat = merged_.flat();
    std::vector<std::vector<double>> class_flat(class_sets_.size());
    for (std::size_t c = 0; c < class_sets_.size(); ++c) {
        class_flat[c] = class_sets_[c].flat();
    }
    for (std::size_t k = 0; k < extra.size(); ++k) {
        const std::size_t c = target_class[k];
        if (c >= class_sets_.size()) {
            throw IndexOutOfRange("augmented: class index out of range");
        }
        if (extra[k].size() != dim) {
            throw DimensionMismatch("augmented: descriptor dimension mismatch");
        }
        const std::size_t pool_index = flat.size() / dim;
        const std::size_t within = class_flat[c].size() / dim;
        flat.insert(flat.end(), extra[k].begin(), extra[k].end());
        class_flat[c].insert(class_flat[c].end(), extra[k].begin(), extra[k].end());
        out.provenance_.push_back({c, within});
        out.class_indices_[c].appended.push_back(pool_index);
    }
    out.merged_ = DescriptorSet(dim, std::move(flat));
    for (std::size_t c = 0; c < class_sets_.size(); ++c) {
        out.class_sets_[c] = DescriptorSet(dim, std::move(class_flat[c]));
    }
    out.appended_count_ = appended_count_ + extra.size();
    return out;
}

const char* to_string(SelectionMethod m) {
    switch (m) {
        case SelectionMethod::MNN: return "MNN";
        case SelectionMethod::DMNN: return "DMNN";
        case SelectionMethod::ODM: return "ODM";
        case SelectionMethod::ALL: return "ALL";
    }
    return "?";
}

const char* to_string(MergeStrategy s) {
    return s == MergeStrategy::MEAN ? "mean" : "union";
}

const char* to_string(ScoreKind k) {
    switch (k) {
        case ScoreKind::NBNN: return "NBNN";
        case ScoreKind::LOG_ODDS: return "LOG_ODDS";
        case ScoreKind::RANK_COUNT: return "RANK_COUNT";
    }
    return "?";
}

void Episode::validate() const {
    if (n_ways < 2 || static_cast<std::size_t>(n_ways) != class_ids.size()) {
        throw InvalidSpec("episode needs n_ways >= 2 distinct classes");
    }
    if (k_shots < 1) {
        throw InvalidSpec("episode needs k_shots >= 1");
    }
    std::set<std::string> distinct(class_ids.begin(), class_ids.end());
    if (distinct.size() != class_ids.size()) {
        throw InvalidSpec("episode class ids must be distinct");
    }
    if (support.size() != class_ids.size()) {
        throw InvalidSpec("episode support entry per class required");
    }
    for (const auto& shots : support) {
        if (shots.size() != static_cast<std::size_t>(k_shots)) {
            throw InvalidSpec("every class needs exactly k_shots support sets");
        }
    }
    if (queries.size() != query_labels.size()) {
        throw InvalidSpec("query/label count mismatch");
    }
    for (std::size_t label : query_labels) {
        if (label >= class_ids.size()) {
            throw IndexOutOfRange("query label outside episode classes");
        }
    }
}

std::size_t argmax_class(const ClassScores& scores) {
    if (scores.values.empty()) {
        throw InvalidArgument("argmax over empty scores");
    }
    std::size_t best = 0;
    for (std::size_t c = 1; c < scores.values.size(); ++c) {
        if (scores.values[c] > scores.values[best]) {
            best = c;
        }
    }
    return best;
}

}  // namespace nbnn
