#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "nbnn/classify.hpp"
#include "nbnn/types.hpp"

namespace nbnn {

struct DatasetItem {
    std::string id;
    std::string class_id;
    DescriptorSet descriptors;
};

struct UnlabeledItem {
    std::string id;
    DescriptorSet descriptors;
};

// A pool of labeled descriptor sets episodes are sampled from, plus optional
// explicitly-unlabeled items. Classes listed as distractors are never used
// as support classes; they only feed semi-supervised episodes.
class LabeledDataset {
public:
    LabeledDataset() = default;
    LabeledDataset(std::vector<DatasetItem> items, std::vector<UnlabeledItem> unlabeled = {},
                   std::vector<std::string> distractor_class_ids = {});

    const std::vector<DatasetItem>& items() const { return items_; }
    const std::vector<UnlabeledItem>& unlabeled() const { return unlabeled_; }

    // Non-distractor class ids in order of first appearance.
    const std::vector<std::string>& classes() const { return classes_; }
    const std::vector<std::string>& distractor_classes() const { return distractor_classes_; }

    // Item indices of one class, in dataset order.
    const std::vector<std::size_t>& class_items(const std::string& class_id) const;

    std::size_t dim() const { return dim_; }

private:
    std::vector<DatasetItem> items_;
    std::vector<UnlabeledItem> unlabeled_;
    std::vector<std::string> classes_;
    std::vector<std::string> distractor_classes_;
    std::map<std::string, std::vector<std::size_t>> by_class_;
    std::size_t dim_ = 0;
};

// Evaluation protocol parameters. Worker count is deliberately not part of
// the protocol: reports must not depend on how episodes were scheduled.
struct ProtocolConfig {
    int n_ways = 5;
    int k_shots = 1;
    int queries_per_class = 15;
    int episode_count = 600;
    MergeStrategy merge_strategy = MergeStrategy::UNION;
    Method method = Method::MN4;
    ScoreRule score_rule = ScoreRule::NBNN;
    double odm_k_percent = 20.0;
    bool use_unlabeled = false;       // draw hidden-label images per episode class
    int unlabeled_per_class = 5;
    bool include_distractors = false; // also draw from distractor classes
    int distractor_ways = 3;
    std::uint64_t master_seed = 0;

    void validate() const;
};

struct EvalReport {
    ProtocolConfig config;
    std::size_t episode_count = 0;
    double mean_accuracy = 0.0;
    double ci95_half_width = 0.0;
    double mean_cross_entropy = 0.0;
    std::vector<double> per_episode_accuracy;
    double mean_episode_seconds = 0.0;
    std::uint64_t master_seed = 0;
};

// Merge one class's K support shots into its descriptor set s_c.
// MEAN averages the i-th descriptor across shots (equal cardinality
// required); UNION concatenates in shot order.
DescriptorSet merge_shots(const std::vector<DescriptorSet>& shot_sets, MergeStrategy strategy);

// Draw the episode for (config.master_seed, episode_index): N distinct
// classes, disjoint K-shot support and query items per class, plus unlabeled
// extras when the semi flags are set. Fully determined by seed and index.
Episode sample_episode(const LabeledDataset& dataset, const ProtocolConfig& config,
                       std::uint64_t episode_index);

// Build the support pool of an episode (per-class merge, then merged pool).
SupportPool build_support_pool(const Episode& episode);

// Run the full protocol and aggregate accuracy, confidence and loss.
// `workers` parallelizes over episodes; results are identical for any count.
EvalReport evaluate(const LabeledDataset& dataset, const ProtocolConfig& config, int workers = 1);

}  // namespace nbnn
