#include "nbnn/manifest.hpp"

#include <fstream>

#include <json.hpp>

#include "nbnn/descriptor_file.hpp"

namespace nbnn {

using json = nlohmann::ordered_json;

Manifest read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open manifest " + path.string());
    }
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw InvalidSpec("manifest " + path.string() + " is not valid JSON: " + e.what());
    }
    if (!doc.is_object() || !doc.contains("items") || !doc["items"].is_array()) {
        throw InvalidSpec("manifest " + path.string() + " needs an \"items\" array");
    }
    Manifest m;
    for (const auto& entry : doc["items"]) {
        if (!entry.contains("id") || !entry.contains("class") || !entry.contains("path")) {
            throw InvalidSpec("manifest item needs id, class and path");
        }
        m.items.push_back({entry["id"].get<std::string>(), entry["class"].get<std::string>(),
                           entry["path"].get<std::string>()});
    }
    if (doc.contains("distractor_classes")) {
        for (const auto& d : doc["distractor_classes"]) {
            m.distractor_classes.push_back(d.get<std::string>());
        }
    }
    if (doc.contains("defaults") && doc["defaults"].is_object()) {
        for (const auto& [key, value] : doc["defaults"].items()) {
            m.defaults[key] = value.is_string() ? value.get<std::string>() : value.dump();
        }
    }
    return m;
}

void write_manifest(const std::filesystem::path& path, const Manifest& manifest) {
    json doc;
    doc["items"] = json::array();
    for (const auto& item : manifest.items) {
        doc["items"].push_back({{"id", item.id}, {"class", item.class_id}, {"path", item.path}});
    }
    if (!manifest.distractor_classes.empty()) {
        doc["distractor_classes"] = manifest.distractor_classes;
    }
    if (!manifest.defaults.empty()) {
        json defaults = json::object();
        for (const auto& [key, value] : manifest.defaults) {
            defaults[key] = value;
        }
        doc["defaults"] = defaults;
    }
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw IoError("cannot write manifest " + path.string());
    }
    out << doc.dump(2) << "\n";
}

LabeledDataset load_dataset(const std::filesystem::path& manifest_path) {
    const Manifest m = read_manifest(manifest_path);
    const auto base = manifest_path.parent_path();
    std::vector<DatasetItem> items;
    std::vector<UnlabeledItem> unlabeled;
    for (const auto& entry : m.items) {
        DescriptorSet set = read_descriptor_file(base / entry.path);
        if (entry.class_id == kUnlabeledClass) {
            unlabeled.push_back({entry.id, std::move(set)});
        } else {
            items.push_back({entry.id, entry.class_id, std::move(set)});
        }
    }
    return LabeledDataset(std::move(items), std::move(unlabeled), m.distractor_classes);
}

}  // namespace nbnn
