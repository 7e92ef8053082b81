#include "dermveil_app/manifest.hpp"

#include <set>

#include "dermveil/csv.hpp"
#include "dermveil/error.hpp"
#include "dermveil/image_io.hpp"

namespace dermveil::app {

Split parse_split(std::string_view text) {
  if (text == "train") return Split::Train;
  if (text == "test") return Split::Test;
  if (text == "all") return Split::All;
  throw Error(ErrorKind::Schema,
              "split: expected train, test or all, got '" + std::string(text) + "'");
}

std::string_view to_string(Split split) {
  switch (split) {
    case Split::Train: return "train";
    case Split::Test: return "test";
    case Split::All: return "all";
  }
  return "all";
}

std::vector<ManifestEntry> DatasetManifest::select(Split split) const {
  if (split == Split::All) return entries;
  std::vector<ManifestEntry> out;
  for (const ManifestEntry& e : entries) {
    if (e.split == split) out.push_back(e);
  }
  return out;
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  const std::string source = path.string();
  const CsvTable table = parse_csv(read_file(path), source);
  const std::size_t image_col = table.column("image_path");
  const std::size_t annotation_col = table.column("annotation_path");
  const std::size_t split_col = table.column("split");
  const std::filesystem::path base = path.parent_path();

  DatasetManifest manifest;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    const std::string where = source + " row " + std::to_string(i + 1);
    ManifestEntry entry;
    entry.image_path = base / row[image_col];
    entry.annotation_path = base / row[annotation_col];
    try {
      entry.split = parse_split(row[split_col]);
    } catch (const Error& e) {
      throw Error(ErrorKind::Schema, where + ": " + e.what());
    }
    for (const auto& p : {entry.image_path, entry.annotation_path}) {
      if (!std::filesystem::exists(p)) {
        throw Error(ErrorKind::Io, where + ": " + p.string() + " does not exist");
      }
    }
    entry.image_id = load_annotation(entry.annotation_path).record.image_id;
    if (!seen.insert(entry.image_id).second) {
      throw Error(ErrorKind::Schema, where + ": duplicate image_id '" + entry.image_id + "'");
    }
    manifest.entries.push_back(std::move(entry));
  }
  return manifest;
}

}  // namespace dermveil::app
