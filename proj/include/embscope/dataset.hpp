#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "embscope/detail/json_io.hpp"
#include "embscope/error.hpp"
#include "embscope/linkage.hpp"
#include "embscope/model.hpp"

namespace embscope {

inline constexpr const char* kManifestFile = "dataset.json";
inline constexpr const char* kLinksFile = "links.json";

/// Precomputed cosine distances of every canonical language pair of every
/// group at every layer: table[layer][gid].
struct LinkTable {
  std::vector<std::vector<std::vector<PairDistance>>> layers;

  std::size_t layer_count() const noexcept { return layers.size(); }

  /// Threshold-filtered links of one layer, ordered by gid then pair.
  std::vector<DistanceLink> links(std::size_t layer, double threshold) const {
    std::vector<DistanceLink> out;
    const auto& groups = layers.at(layer);
    for (std::size_t gid = 0; gid < groups.size(); ++gid) {
      auto l = links_from_pairs(gid, layer, groups[gid], threshold);
      out.insert(out.end(), l.begin(), l.end());
    }
    return out;
  }
  bool operator==(const LinkTable&) const = default;
};

/// Distances are written with full round-trip precision so thresholds
/// applied after loading see exactly the computed values.
inline nlohmann::ordered_json to_json(const LinkTable& table) {
  detail::ordered_json layers = detail::ordered_json::array();
  for (std::size_t l = 0; l < table.layers.size(); ++l) {
    detail::ordered_json pairs = detail::ordered_json::array();
    for (std::size_t gid = 0; gid < table.layers[l].size(); ++gid) {
      for (const auto& p : table.layers[l][gid]) {
        pairs.push_back({{"gid", gid}, {"lang_a", p.lang_a}, {"lang_b", p.lang_b}, {"distance", p.distance}});
      }
    }
    layers.push_back({{"index", l}, {"pairs", std::move(pairs)}});
  }
  return {{"layer_count", table.layers.size()}, {"layers", std::move(layers)}};
}

/// Parses and checks a link table against the dataset's languages and
/// sentence count: every group must list every canonical pair once.
inline LinkTable links_from_json(const nlohmann::json& j, std::span<const std::string> languages,
                                 std::size_t sentence_count) {
  std::vector<std::string> sorted(languages.begin(), languages.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::pair<std::string, std::string>> canonical;
  for (std::size_t a = 0; a < sorted.size(); ++a) {
    for (std::size_t b = a + 1; b < sorted.size(); ++b) canonical.emplace_back(sorted[a], sorted[b]);
  }

  LinkTable table;
  const std::size_t t = detail::index_field(j, "$", "layer_count");
  const auto& layers = detail::array_field(j, "$", "layers");
  if (layers.size() != t) throw ValidationError("$.layers", "length differs from layer_count");
  for (std::size_t l = 0; l < t; ++l) {
    const std::string base = detail::at("$.layers", l);
    if (detail::index_field(layers[l], base, "index") != l) {
      throw ValidationError(base + ".index", "expected " + std::to_string(l));
    }
    const auto& pairs = detail::array_field(layers[l], base, "pairs");
    if (pairs.size() != sentence_count * canonical.size()) {
      throw ValidationError(base + ".pairs", "expected " + std::to_string(sentence_count * canonical.size()) +
                                                 " pairs, found " + std::to_string(pairs.size()));
    }
    std::vector<std::vector<PairDistance>> groups(sentence_count);
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      const std::string pb = detail::at(base + ".pairs", p);
      const std::size_t gid = detail::index_field(pairs[p], pb, "gid");
      const auto& expect = canonical[p % canonical.size()];
      PairDistance pd{detail::string_field(pairs[p], pb, "lang_a"),
                      detail::string_field(pairs[p], pb, "lang_b"), 0.0};
      if (gid != p / canonical.size() || pd.lang_a != expect.first || pd.lang_b != expect.second) {
        throw ValidationError(pb, "pairs must list every group's canonical language pairs in order");
      }
      const auto& dist = detail::field(pairs[p], pb, "distance");
      if (!dist.is_number()) throw ValidationError(pb + ".distance", "expected a number");
      pd.distance = dist.get<double>();
      if (!(pd.distance >= 0.0 && pd.distance <= 2.0)) {
        throw ValidationError(pb + ".distance", "cosine distance outside [0, 2]");
      }
      groups[gid].push_back(std::move(pd));
    }
    table.layers.push_back(std::move(groups));
  }
  return table;
}

/// Immutable in-memory snapshot of one dataset directory.
struct Dataset {
  std::filesystem::path root;
  DatasetManifest manifest;
  std::map<std::string, MultiscaleDocument> multiscale;
  std::map<std::string, LayerDocument> layers;
  LinkTable links;

  bool has_language(const std::string& lang) const { return multiscale.count(lang) != 0; }
};

/// Loads the manifest and every member document, checking cross-file
/// invariants (languages, sentence and layer counts, link coverage).
inline std::shared_ptr<const Dataset> load_dataset(const std::filesystem::path& root) {
  const auto manifest_path = root / kManifestFile;
  if (!std::filesystem::exists(manifest_path)) {
    throw ValidationError(manifest_path.string(), "manifest not found");
  }
  auto ds = std::make_shared<Dataset>();
  ds->root = root;
  try {
    ds->manifest = manifest_from_json(detail::parse_json_file(manifest_path));
  } catch (const ValidationError& e) {
    if (e.where().starts_with("$")) throw ValidationError(manifest_path.string() + " " + e.where(), e.what());
    throw;
  }
  const auto& m = ds->manifest;

  const auto member = [&](const std::string& rel) {
    const auto path = root / rel;
    if (!std::filesystem::exists(path)) throw ValidationError(path.string(), "file referenced by manifest not found");
    return path;
  };

  for (const auto& lang : m.languages) {
    const auto& files = m.files.at(lang);
    const auto ms_path = member(files.multiscale);
    auto doc = import_multiscale(ms_path);
    if (doc.language != lang) {
      throw ValidationError(ms_path.string() + " $.language",
                            "expected '" + lang + "', found '" + doc.language + "'");
    }
    if (doc.sentences.size() != m.sentence_count) {
      throw ValidationError(ms_path.string(), "has " + std::to_string(doc.sentences.size()) +
                                                  " sentences, manifest says " + std::to_string(m.sentence_count));
    }
    if (!m.has_tokens()) {
      for (const auto& s : doc.sentences) {
        if (!s.tokens.empty()) {
          throw ValidationError(ms_path.string(), "token coordinates present but manifest has no token granularity");
        }
      }
    }
    ds->multiscale.emplace(lang, std::move(doc));

    if (files.layers) {
      const auto ly_path = member(*files.layers);
      auto ly = import_layers(ly_path);
      if (ly.language != lang) {
        throw ValidationError(ly_path.string() + " $.language",
                              "expected '" + lang + "', found '" + ly.language + "'");
      }
      if (ly.layers.size() != m.layer_count) {
        throw ValidationError(ly_path.string(), "has " + std::to_string(ly.layers.size()) +
                                                    " layers, manifest says " + std::to_string(m.layer_count));
      }
      if (ly.layers.front().points.size() != m.sentence_count) {
        throw ValidationError(ly_path.string(), "layers have " + std::to_string(ly.layers.front().points.size()) +
                                                    " points, manifest says " + std::to_string(m.sentence_count));
      }
      ds->layers.emplace(lang, std::move(ly));
    }
  }

  if (m.layer_count > 0) {
    const auto links_path = member(kLinksFile);
    try {
      ds->links = links_from_json(detail::parse_json_file(links_path), m.languages, m.sentence_count);
    } catch (const ValidationError& e) {
      if (e.where().starts_with("$")) throw ValidationError(links_path.string() + " " + e.where(), e.what());
      throw;
    }
    if (ds->links.layer_count() != m.layer_count) {
      throw ValidationError(links_path.string(), "layer count differs from manifest");
    }
  }
  return ds;
}

/// Every immediate subdirectory holding a manifest; ids must be unique.
inline std::vector<std::shared_ptr<const Dataset>> load_data_root(const std::filesystem::path& root) {
  if (!std::filesystem::is_directory(root)) throw ValidationError(root.string(), "data root is not a directory");
  std::vector<std::filesystem::path> dirs;
  for (const auto& entry : std::filesystem::directory_iterator(root)) {
    if (entry.is_directory() && std::filesystem::exists(entry.path() / kManifestFile)) dirs.push_back(entry.path());
  }
  std::sort(dirs.begin(), dirs.end());
  std::vector<std::shared_ptr<const Dataset>> out;
  std::set<std::string> ids;
  for (const auto& dir : dirs) {
    std::shared_ptr<const Dataset> ds;
    try {
      ds = load_dataset(dir);
    } catch (const ValidationError& e) {
      throw ValidationError("dataset '" + dir.filename().string() + "'", e.what());
    }
    if (!ids.insert(ds->manifest.id).second) {
      throw ValidationError("dataset '" + dir.filename().string() + "'", "duplicate dataset id '" + ds->manifest.id + "'");
    }
    out.push_back(std::move(ds));
  }
  return out;
}

}  // namespace embscope
