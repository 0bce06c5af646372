#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nbnn/episodes.hpp"

namespace nbnn {

// JSON dataset manifest:
// {
//   "items": [{"id": "...", "class": "<class id>" | "UNLABELED", "path": "rel/file.dsc"}, ...],
//   "distractor_classes": ["..."],            // optional
//   "defaults": {"ways": 5, "shots": 1, ...}  // optional protocol defaults
// }
// Paths are resolved relative to the manifest's directory.

struct ManifestItem {
    std::string id;
    std::string class_id;  // "UNLABELED" marks unlabeled items
    std::string path;
};

struct Manifest {
    std::vector<ManifestItem> items;
    std::vector<std::string> distractor_classes;
    // Raw protocol defaults, applied by the CLI for flags the user left unset.
    std::map<std::string, std::string> defaults;
};

inline constexpr const char* kUnlabeledClass = "UNLABELED";

Manifest read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const Manifest& manifest);

// Decode every referenced descriptor file into a dataset.
LabeledDataset load_dataset(const std::filesystem::path& manifest_path);

}  // namespace nbnn
