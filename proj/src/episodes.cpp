#include "nbnn/episodes.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <numeric>
#include <set>
#include <thread>

#include "nbnn/rng.hpp"

namespace nbnn {

LabeledDataset::LabeledDataset(std::vector<DatasetItem> items,
                               std::vector<UnlabeledItem> unlabeled,
                               std::vector<std::string> distractor_class_ids)
    : items_(std::move(items)),
      unlabeled_(std::move(unlabeled)),
      distractor_classes_(std::move(distractor_class_ids)) {
    if (items_.empty()) {
        throw InvalidSpec("dataset has no labeled items");
    }
    std::set<std::string> ids;
    std::set<std::string> distractors(distractor_classes_.begin(), distractor_classes_.end());
    dim_ = items_.front().descriptors.dim();
    for (std::size_t i = 0; i < items_.size(); ++i) {
        const auto& item = items_[i];
        if (!ids.insert(item.id).second) {
            throw InvalidSpec("duplicate item id: " + item.id);
        }
        if (item.descriptors.dim() != dim_) {
            throw DimensionMismatch("dataset items have differing descriptor dimensions");
        }
        auto [it, fresh] = by_class_.try_emplace(item.class_id);
        if (fresh && !distractors.count(item.class_id)) {
            classes_.push_back(item.class_id);
        }
        it->second.push_back(i);
    }
    for (const auto& u : unlabeled_) {
        if (!ids.insert(u.id).second) {
            throw InvalidSpec("duplicate item id: " + u.id);
        }
        if (u.descriptors.dim() != dim_) {
            throw DimensionMismatch("dataset items have differing descriptor dimensions");
        }
    }
    for (const auto& d : distractor_classes_) {
        if (!by_class_.count(d)) {
            throw InvalidSpec("distractor class has no items: " + d);
        }
    }
}

const std::vector<std::size_t>& LabeledDataset::class_items(const std::string& class_id) const {
    auto it = by_class_.find(class_id);
    if (it == by_class_.end()) {
        throw InvalidArgument("unknown class id: " + class_id);
    }
    return it->second;
}

void ProtocolConfig::validate() const {
    if (n_ways < 2) throw InvalidSpec("n_ways must be >= 2");
    if (k_shots < 1) throw InvalidSpec("k_shots must be >= 1");
    if (queries_per_class < 1) throw InvalidSpec("queries_per_class must be >= 1");
    if (episode_count < 1) throw InvalidSpec("episode_count must be >= 1");
    if (method == Method::ODM && (!(odm_k_percent > 0.0) || odm_k_percent > 100.0)) {
        throw InvalidPercent("odm_k_percent must be in (0, 100]");
    }
    if (use_unlabeled && unlabeled_per_class < 1) {
        throw InvalidSpec("unlabeled_per_class must be >= 1 in semi-supervised mode");
    }
    if (include_distractors && distractor_ways < 1) {
        throw InvalidSpec("distractor_ways must be >= 1 when distractors are enabled");
    }
}

DescriptorSet merge_shots(const std::vector<DescriptorSet>& shot_sets, MergeStrategy strategy) {
    if (shot_sets.empty()) {
        throw InvalidArgument("merge_shots: no shot sets");
    }
    const std::size_t dim = shot_sets.front().dim();
    for (const auto& s : shot_sets) {
        if (s.dim() != dim) {
            throw DimensionMismatch("merge_shots: shot sets have differing dimensions");
        }
    }
    if (strategy == MergeStrategy::UNION) {
        std::vector<double> flat;
        for (const auto& s : shot_sets) {
            flat.insert(flat.end(), s.flat().begin(), s.flat().end());
        }
        return DescriptorSet(dim, std::move(flat));
    }
    const std::size_t m = shot_sets.front().size();
    for (const auto& s : shot_sets) {
        if (s.size() != m) {
            throw CardinalityMismatch("merge_shots: MEAN needs equal cardinality, got " +
                                      std::to_string(s.size()) + " vs " + std::to_string(m));
        }
    }
    const double k = static_cast<double>(shot_sets.size());
    std::vector<double> flat(m * dim, 0.0);
    for (const auto& s : shot_sets) {
        const auto& src = s.flat();
        for (std::size_t i = 0; i < flat.size(); ++i) {
            flat[i] += src[i];
        }
    }
    for (double& v : flat) {
        v /= k;
    }
    return DescriptorSet(dim, std::move(flat));  // may throw ZeroNormDescriptor
}

namespace {

// First `take` entries of a seeded partial Fisher-Yates shuffle of [0, n).
std::vector<std::size_t> draw_without_replacement(std::size_t n, std::size_t take, Rng& rng) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    for (std::size_t i = 0; i < take; ++i) {
        const std::size_t j = i + rng.uniform_index(n - i);
        std::swap(idx[i], idx[j]);
    }
    idx.resize(take);
    return idx;
}

}  // namespace

Episode sample_episode(const LabeledDataset& dataset, const ProtocolConfig& config,
                       std::uint64_t episode_index) {
    config.validate();
    const auto& classes = dataset.classes();
    const auto n = static_cast<std::size_t>(config.n_ways);
    const auto k = static_cast<std::size_t>(config.k_shots);
    const auto qpc = static_cast<std::size_t>(config.queries_per_class);
    const auto upc = static_cast<std::size_t>(config.unlabeled_per_class);
    if (classes.size() < n) {
        throw InsufficientData("dataset has " + std::to_string(classes.size()) +
                               " classes, protocol needs " + std::to_string(n));
    }
    std::size_t per_class_need = k + qpc + (config.use_unlabeled ? upc : 0);

    Rng rng(derive_stream_seed(config.master_seed, episode_index));

    Episode ep;
    ep.n_ways = config.n_ways;
    ep.k_shots = config.k_shots;
    ep.merge_strategy = config.merge_strategy;

    for (std::size_t c : draw_without_replacement(classes.size(), n, rng)) {
        ep.class_ids.push_back(classes[c]);
    }
    ep.support.resize(n);
    for (std::size_t c = 0; c < n; ++c) {
        const auto& pool = dataset.class_items(ep.class_ids[c]);
        if (pool.size() < per_class_need) {
            throw InsufficientData("class " + ep.class_ids[c] + " has " +
                                   std::to_string(pool.size()) + " items, protocol needs " +
                                   std::to_string(per_class_need));
        }
        const auto picks = draw_without_replacement(pool.size(), per_class_need, rng);
        for (std::size_t i = 0; i < k; ++i) {
            ep.support[c].push_back(dataset.items()[pool[picks[i]]].descriptors);
        }
        for (std::size_t i = 0; i < qpc; ++i) {
            ep.queries.push_back(dataset.items()[pool[picks[k + i]]].descriptors);
            ep.query_labels.push_back(c);
        }
        if (config.use_unlabeled) {
            for (std::size_t i = 0; i < upc; ++i) {
                ep.unlabeled.push_back(dataset.items()[pool[picks[k + qpc + i]]].descriptors);
            }
        }
    }
    if (config.use_unlabeled && config.include_distractors) {
        const auto& distractors = dataset.distractor_classes();
        const auto dways = static_cast<std::size_t>(config.distractor_ways);
        if (distractors.size() < dways) {
            throw InsufficientData("dataset has " + std::to_string(distractors.size()) +
                                   " distractor classes, protocol needs " +
                                   std::to_string(dways));
        }
        for (std::size_t d : draw_without_replacement(distractors.size(), dways, rng)) {
            const auto& pool = dataset.class_items(distractors[d]);
            if (pool.size() < upc) {
                throw InsufficientData("distractor class " + distractors[d] + " has " +
                                       std::to_string(pool.size()) + " items, protocol needs " +
                                       std::to_string(upc));
            }
            for (std::size_t pick : draw_without_replacement(pool.size(), upc, rng)) {
                ep.unlabeled.push_back(dataset.items()[pool[pick]].descriptors);
            }
        }
    }
    // Explicitly-unlabeled items (no hidden labels) are drawn instead of
    // hidden-label items when the dataset provides them.
    if (config.use_unlabeled && !dataset.unlabeled().empty()) {
        ep.unlabeled.clear();
        const std::size_t want = std::min(dataset.unlabeled().size(), n * upc);
        for (std::size_t pick : draw_without_replacement(dataset.unlabeled().size(), want, rng)) {
            ep.unlabeled.push_back(dataset.unlabeled()[pick].descriptors);
        }
    }
    ep.validate();
    return ep;
}

SupportPool build_support_pool(const Episode& episode) {
    std::vector<DescriptorSet> class_sets;
    class_sets.reserve(episode.class_ids.size());
    for (const auto& shots : episode.support) {
        class_sets.push_back(merge_shots(shots, episode.merge_strategy));
    }
    return SupportPool(episode.class_ids, std::move(class_sets));
}

namespace {

struct EpisodeOutcome {
    double accuracy = 0.0;
    double cross_entropy = 0.0;
    double seconds = 0.0;
};

EpisodeOutcome run_episode(const LabeledDataset& dataset, const ProtocolConfig& config,
                           std::uint64_t index) {
    const auto t0 = std::chrono::steady_clock::now();
    const Episode ep = sample_episode(dataset, config, index);
    SupportPool pool = build_support_pool(ep);
    if (config.use_unlabeled && !ep.unlabeled.empty()) {
        pool = pseudo_label_augment(pool, ep.unlabeled);
    }
    std::size_t correct = 0;
    double ce = 0.0;
    for (std::size_t i = 0; i < ep.queries.size(); ++i) {
        const Classification result =
            classify(ep.queries[i], pool, config.method, config.score_rule, config.odm_k_percent);
        if (result.predicted_class == ep.query_labels[i]) {
            ++correct;
        }
        ce += cross_entropy(softmax_probs(result.scores), ep.query_labels[i]);
    }
    const auto t1 = std::chrono::steady_clock::now();
    EpisodeOutcome out;
    out.accuracy = static_cast<double>(correct) / static_cast<double>(ep.queries.size());
    out.cross_entropy = ce / static_cast<double>(ep.queries.size());
    out.seconds = std::chrono::duration<double>(t1 - t0).count();
    return out;
}

}  // namespace

EvalReport evaluate(const LabeledDataset& dataset, const ProtocolConfig& config, int workers) {
    config.validate();
    const auto n = static_cast<std::size_t>(config.episode_count);
    std::vector<EpisodeOutcome> outcomes(n);

    if (workers < 1) {
        workers = 1;
    }
    const auto thread_count = std::min<std::size_t>(static_cast<std::size_t>(workers), n);
    if (thread_count <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            outcomes[i] = run_episode(dataset, config, i);
        }
    } else {
        // Episodes are independent; results land in a preallocated slot per
        // index, so the report is identical for any worker count.
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        auto work = [&]() {
            try {
                for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
                    outcomes[i] = run_episode(dataset, config, i);
                }
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
            }
        };
        std::vector<std::thread> threads;
        for (std::size_t t = 0; t < thread_count; ++t) {
            threads.emplace_back(work);
        }
        for (auto& t : threads) {
            t.join();
        }
        if (failure) {
            std::rethrow_exception(failure);
        }
    }

    EvalReport report;
    report.config = config;
    report.episode_count = n;
    report.master_seed = config.master_seed;
    report.per_episode_accuracy.reserve(n);
    double acc_sum = 0.0;
    double ce_sum = 0.0;
    double sec_sum = 0.0;
    for (const auto& o : outcomes) {
        report.per_episode_accuracy.push_back(o.accuracy);
        acc_sum += o.accuracy;
        ce_sum += o.cross_entropy;
        sec_sum += o.seconds;
    }
    const double dn = static_cast<double>(n);
    report.mean_accuracy = acc_sum / dn;
    report.mean_cross_entropy = ce_sum / dn;
    report.mean_episode_seconds = sec_sum / dn;
    if (n > 1) {
        double ss = 0.0;
        for (double a : report.per_episode_accuracy) {
            const double d = a - report.mean_accuracy;
            ss += d * d;
        }
        const double sample_std = std::sqrt(ss / (dn - 1.0));
        report.ci95_half_width = 1.96 * sample_std / std::sqrt(dn);
    }
    return report;
}

}  // namespace nbnn
