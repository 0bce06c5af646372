// Command-line interface: episodic evaluation, single-image classification,
// selection traces and synthetic dataset generation.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "nbnn/classify.hpp"
#include "nbnn/descriptor_file.hpp"
#include "nbnn/episodes.hpp"
#include "nbnn/manifest.hpp"
#include "nbnn/synth.hpp"
#include "nbnn/trace.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

nbnn::Method parse_method(const std::string& s) {
    if (s == "dn4") return nbnn::Method::DN4;
    if (s == "mn4") return nbnn::Method::MN4;
    if (s == "dmn4") return nbnn::Method::DMN4;
    if (s == "odm") return nbnn::Method::ODM;
    throw CLI::ValidationError("--method", "must be one of dn4|mn4|dmn4|odm");
}

nbnn::ScoreRule parse_score(const std::string& s) {
    if (s == "nbnn") return nbnn::ScoreRule::NBNN;
    if (s == "logodds") return nbnn::ScoreRule::LOG_ODDS;
    if (s == "rank") return nbnn::ScoreRule::RANK;
    throw CLI::ValidationError("--score", "must be one of nbnn|logodds|rank");
}

nbnn::MergeStrategy parse_merge(const std::string& s) {
    if (s == "mean") return nbnn::MergeStrategy::MEAN;
    if (s == "union") return nbnn::MergeStrategy::UNION;
    throw CLI::ValidationError("--merge", "must be mean or union");
}

void emit(const std::string& text, const std::string& out_path) {
    std::cout << text << "\n";
    if (!out_path.empty()) {
        std::ofstream out(out_path, std::ios::trunc);
        if (!out) {
            throw nbnn::IoError("cannot write " + out_path);
        }
        out << text << "\n";
    }
}

struct ProtocolFlags {
    std::string method = "mn4";
    std::string score = "nbnn";
    std::string merge = "union";
    int ways = 5;
    int shots = 1;
    int queries = 15;
    int episodes = 600;
    double k_percent = 20.0;
    bool semi = false;
    bool distractors = false;
    std::uint64_t seed = 0;

    // Options registered so manifest defaults can fill flags the user left
    // unset.
    std::map<std::string, CLI::Option*> opts;

    void add_to(CLI::App& app, bool with_episode_flags) {
        opts["method"] = app.add_option("--method", method, "dn4|mn4|dmn4|odm");
        opts["score"] = app.add_option("--score", score, "nbnn|logodds|rank");
        opts["merge"] = app.add_option("--merge", merge, "K-shot merge: mean|union");
        opts["k_percent"] =
            app.add_option("--k-percent", k_percent, "selected query percentage for odm");
        opts["seed"] = app.add_option("--seed", seed, "master seed");
        if (with_episode_flags) {
            opts["ways"] = app.add_option("--ways", ways, "classes per episode");
            opts["shots"] = app.add_option("--shots", shots, "support images per class");
            opts["queries"] = app.add_option("--queries", queries, "query images per class");
            opts["episodes"] = app.add_option("--episodes", episodes, "episode count");
            opts["semi"] = app.add_flag("--semi", semi, "semi-supervised pseudo-labeling");
            opts["distractors"] =
                app.add_flag("--distractors", distractors, "add distractor-class unlabeled images");
        }
    }

    void apply_manifest_defaults(const std::map<std::string, std::string>& defaults) {
        for (const auto& [key, value] : defaults) {
            auto it = opts.find(key);
            if (it == opts.end() || it->second->count() > 0) {
                continue;  // unknown key or explicitly set by the user
            }
            it->second->clear();
            it->second->add_result(value);
            it->second->run_callback();
        }
    }

    nbnn::ProtocolConfig to_config() const {
        nbnn::ProtocolConfig cfg;
        cfg.method = parse_method(method);
        cfg.score_rule = parse_score(score);
        cfg.merge_strategy = parse_merge(merge);
        cfg.n_ways = ways;
        cfg.k_shots = shots;
        cfg.queries_per_class = queries;
        cfg.episode_count = episodes;
        cfg.odm_k_percent = k_percent;
        cfg.use_unlabeled = semi;
        cfg.include_distractors = distractors;
        cfg.master_seed = seed;
        return cfg;
    }
};

// Support pool from every labeled item of a manifest dataset: each class's
// items are its shots, merged with the requested strategy.
nbnn::SupportPool pool_from_dataset(const nbnn::LabeledDataset& ds, nbnn::MergeStrategy merge) {
    std::vector<std::string> ids;
    std::vector<nbnn::DescriptorSet> sets;
    for (const auto& cls : ds.classes()) {
        std::vector<nbnn::DescriptorSet> shots;
        for (std::size_t idx : ds.class_items(cls)) {
            shots.push_back(ds.items()[idx].descriptors);
        }
        ids.push_back(cls);
        sets.push_back(nbnn::merge_shots(shots, merge));
    }
    return nbnn::SupportPool(std::move(ids), std::move(sets));
}

int run_eval(const std::string& manifest, ProtocolFlags& flags, int workers,
             const std::string& out_path) {
    const nbnn::LabeledDataset ds = nbnn::load_dataset(manifest);
    const nbnn::ProtocolConfig cfg = flags.to_config();
    const nbnn::EvalReport report = nbnn::evaluate(ds, cfg, workers);
    emit(nbnn::eval_report_json(report), out_path);
    return 0;
}

int run_classify(const std::string& manifest, const std::string& query_path,
                 ProtocolFlags& flags, bool trace, const std::string& out_path) {
    const nbnn::LabeledDataset ds = nbnn::load_dataset(manifest);
    const nbnn::DescriptorSet query = nbnn::read_descriptor_file(query_path);
    nbnn::SupportPool pool = pool_from_dataset(ds, parse_merge(flags.merge));
    if (flags.semi && !ds.unlabeled().empty()) {
        std::vector<nbnn::DescriptorSet> unlabeled;
        for (const auto& u : ds.unlabeled()) {
            unlabeled.push_back(u.descriptors);
        }
        pool = nbnn::pseudo_label_augment(pool, unlabeled);
    }
    const nbnn::Method method = parse_method(flags.method);
    const nbnn::ScoreRule rule = parse_score(flags.score);
    const nbnn::Classification result =
        nbnn::classify(query, pool, method, rule, flags.k_percent);
    if (trace) {
        emit(nbnn::selection_trace_json(result, pool, method, rule, query_path), out_path);
        return 0;
    }
    ordered_json doc;
    doc["query"] = query_path;
    doc["method"] = nbnn::to_string(method);
    doc["score"] = nbnn::to_string(rule);
    doc["predicted_class"] = pool.class_id(result.predicted_class);
    ordered_json scores = ordered_json::array();
    for (std::size_t c = 0; c < pool.class_count(); ++c) {
        scores.push_back({{"class", pool.class_id(c)}, {"score", result.scores.values[c]}});
    }
    doc["scores"] = std::move(scores);
    emit(doc.dump(2), out_path);
    return 0;
}

int run_gen_synth(const nbnn::SynthSpec& spec, const std::string& out_dir) {
    const nbnn::LabeledDataset ds = nbnn::synth_generate(spec);
    const fs::path base(out_dir);
    fs::create_directories(base);
    nbnn::Manifest manifest;
    for (const auto& item : ds.items()) {
        const fs::path rel = fs::path(item.class_id) / (item.id.substr(item.id.find('/') + 1) + ".dsc");
        fs::create_directories(base / rel.parent_path());
        nbnn::write_descriptor_file(base / rel, item.descriptors);
        manifest.items.push_back({item.id, item.class_id, rel.generic_string()});
    }
    manifest.distractor_classes = ds.distractor_classes();
    nbnn::write_manifest(base / "manifest.json", manifest);
    std::cout << "wrote " << ds.items().size() << " descriptor files and manifest.json under "
              << base.string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Descriptor-set few-shot classification engine"};
    app.require_subcommand(1);

    // eval
    auto* eval = app.add_subcommand("eval", "episodic evaluation over a dataset manifest");
    std::string eval_manifest;
    std::string eval_out;
    int workers = 1;
    eval->add_option("--manifest", eval_manifest, "dataset manifest path")->required();
    eval->add_option("--workers", workers, "parallel episode workers");
    eval->add_option("--out", eval_out, "also write the report to this file");
    ProtocolFlags eval_flags;
    eval_flags.add_to(*eval, true);

    // classify
    auto* cls = app.add_subcommand("classify", "classify one query descriptor file");
    std::string cls_manifest, cls_query, cls_out;
    cls->add_option("--manifest", cls_manifest, "support manifest path")->required();
    cls->add_option("--query", cls_query, "query descriptor file")->required();
    cls->add_option("--out", cls_out, "also write the result to this file");
    ProtocolFlags cls_flags;
    cls_flags.add_to(*cls, false);
    cls->add_flag("--semi", cls_flags.semi, "augment with the manifest's unlabeled items");

    // trace
    auto* trace = app.add_subcommand("trace", "classify and emit the full selection trace");
    std::string trace_manifest, trace_query, trace_out;
    trace->add_option("--manifest", trace_manifest, "support manifest path")->required();
    trace->add_option("--query", trace_query, "query descriptor file")->required();
    trace->add_option("--out", trace_out, "also write the trace to this file");
    ProtocolFlags trace_flags;
    trace_flags.add_to(*trace, false);
    trace->add_flag("--semi", trace_flags.semi, "augment with the manifest's unlabeled items");

    // gen-synth
    auto* gen = app.add_subcommand("gen-synth", "generate a synthetic clutter-model dataset");
    nbnn::SynthSpec spec;
    std::string gen_out;
    gen->add_option("--out", gen_out, "output directory")->required();
    gen->add_option("--classes", spec.n_classes, "number of classes");
    gen->add_option("--images-per-class", spec.images_per_class, "images per class");
    gen->add_option("--descriptors", spec.descriptors_per_image, "descriptors per image");
    gen->add_option("--dim", spec.dim, "descriptor dimension");
    gen->add_option("--signal-fraction", spec.signal_fraction, "fraction of signal descriptors");
    gen->add_option("--signal-noise", spec.signal_noise, "signal offset magnitude");
    gen->add_option("--clutter-noise", spec.clutter_noise, "clutter offset magnitude");
    gen->add_option("--distractor-classes", spec.distractor_classes,
                    "extra classes never used as support");
    gen->add_option("--seed", spec.seed, "generator seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e);  // --help
        }
        app.exit(e);
        return 1;
    }

    try {
        if (eval->parsed()) {
            const nbnn::Manifest m = nbnn::read_manifest(eval_manifest);
            eval_flags.apply_manifest_defaults(m.defaults);
            return run_eval(eval_manifest, eval_flags, workers, eval_out);
        }
        if (cls->parsed()) {
            return run_classify(cls_manifest, cls_query, cls_flags, false, cls_out);
        }
        if (trace->parsed()) {
            return run_classify(trace_manifest, trace_query, trace_flags, true, trace_out);
        }
        if (gen->parsed()) {
            return run_gen_synth(spec, gen_out);
        }
    } catch (const CLI::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const nbnn::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
