#include "nbnn/trace.hpp"

#include <json.hpp>

namespace nbnn {

using json = nlohmann::ordered_json;

std::string selection_trace_json(const Classification& result, const SupportPool& pool,
                                 Method method, ScoreRule rule, const std::string& query_id) {
    json doc;
    doc["query_id"] = query_id;
    doc["method"] = to_string(method);
    doc["score"] = to_string(rule);
    doc["selection"] = to_string(result.selection.method);
    doc["fallback"] = result.selection.used_fallback;
    json pairs = json::array();
    for (const auto& p : result.selection.pairs) {
        const PoolEntry& origin = pool.provenance(p.pool_index);
        json entry;
        entry["query_index"] = p.query_index;
        entry["pool_index"] = p.pool_index;
        entry["class"] = pool.class_id(origin.class_index);
        entry["within_class_index"] = origin.within_class_index;
        entry["similarity"] = p.similarity;
        if (p.tau.has_value()) {
            entry["tau"] = *p.tau;
        }
        pairs.push_back(std::move(entry));
    }
    doc["pairs"] = std::move(pairs);
    doc["predicted_class"] = pool.class_id(result.predicted_class);
    doc["score_kind"] = to_string(result.scores.kind);
    json scores = json::array();
    for (std::size_t c = 0; c < pool.class_count(); ++c) {
        scores.push_back({{"class", pool.class_id(c)}, {"score", result.scores.values[c]}});
    }
    doc["scores"] = std::move(scores);
    return doc.dump(2);
}

std::string eval_report_json(const EvalReport& report) {
    const ProtocolConfig& c = report.config;
    json doc;
    json config;
    config["method"] = to_string(c.method);
    config["score"] = to_string(c.score_rule);
    config["ways"] = c.n_ways;
    config["shots"] = c.k_shots;
    config["queries_per_class"] = c.queries_per_class;
    config["episodes"] = c.episode_count;
    config["merge"] = to_string(c.merge_strategy);
    if (c.method == Method::ODM) {
        config["odm_k_percent"] = c.odm_k_percent;
    }
    config["semi"] = c.use_unlabeled;
    if (c.use_unlabeled) {
        config["unlabeled_per_class"] = c.unlabeled_per_class;
        config["distractors"] = c.include_distractors;
        if (c.include_distractors) {
            config["distractor_ways"] = c.distractor_ways;
        }
    }
    config["seed"] = c.master_seed;
    doc["config"] = std::move(config);
    doc["episode_count"] = report.episode_count;
    doc["accuracy"] = report.mean_accuracy;
    doc["ci95_half_width"] = report.ci95_half_width;
    doc["mean_cross_entropy"] = report.mean_cross_entropy;
    doc["per_episode_accuracy"] = report.per_episode_accuracy;
    doc["timing"] = {{"mean_episode_seconds", report.mean_episode_seconds}};
    return doc.dump(2);
}

}  // namespace nbnn
