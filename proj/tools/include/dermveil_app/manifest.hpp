#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "dermveil/annotate.hpp"

namespace dermveil::app {

enum class Split { Train, Test, All };

Split parse_split(std::string_view text);
std::string_view to_string(Split split);

struct ManifestEntry {
  std::filesystem::path image_path;       // resolved against the manifest directory
  std::filesystem::path annotation_path;  // likewise
  Split split = Split::All;
  std::string image_id;  // from the annotation
};

/// CSV with header image_path,annotation_path,split. Every referenced file
/// must exist and image ids must be unique.
struct DatasetManifest {
  std::vector<ManifestEntry> entries;

  /// Entries whose split is `split`; All selects everything.
  std::vector<ManifestEntry> select(Split split) const;
};

DatasetManifest load_manifest(const std::filesystem::path& path);

}  // namespace dermveil::app
