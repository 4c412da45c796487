#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "embscope/error.hpp"
#include "embscope/ingest.hpp"

namespace embscope {

inline constexpr double kDefaultLinkThreshold = 1.0;

/// A pair of parallel sentences at one layer. lang_a < lang_b.
struct DistanceLink {
  std::size_t gid = 0;
  std::string lang_a;
  std::string lang_b;
  std::size_t layer = 0;
  double distance = 0.0;
  bool is_max_pair = false;
  bool operator==(const DistanceLink&) const = default;
};

/// 1 - cos(u, v), clamped to [0, 2].
inline double cosine_distance(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) {
    throw ValidationError("cosine_distance", "dimension mismatch (" + std::to_string(u.size()) +
                                                 " vs " + std::to_string(v.size()) + ")");
  }
  double dot = 0.0, uu = 0.0, vv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    uu += u[i] * u[i];
    vv += v[i] * v[i];
  }
  if (uu == 0.0 || vv == 0.0) throw ValidationError("cosine_distance", "zero vector");
  return std::clamp(1.0 - dot / (std::sqrt(uu) * std::sqrt(vv)), 0.0, 2.0);
}

/// Every unordered language pair of one group at one layer, before any
/// threshold is applied.
struct PairDistance {
  std::string lang_a;
  std::string lang_b;
  double distance = 0.0;
  bool operator==(const PairDistance&) const = default;
};

/// Flags the first maximum pair (in canonical order) and keeps the pairs
/// strictly above the threshold.
inline std::vector<DistanceLink> links_from_pairs(std::size_t gid, std::size_t layer,
                                                  std::span<const PairDistance> pairs,
                                                  double threshold) {
  std::vector<DistanceLink> out;
  if (pairs.empty()) return out;
  std::size_t max_at = 0;
  for (std::size_t p = 1; p < pairs.size(); ++p) {
    if (pairs[p].distance > pairs[max_at].distance) max_at = p;
  }
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    if (pairs[p].distance > threshold) {
      out.push_back({gid, pairs[p].lang_a, pairs[p].lang_b, layer, pairs[p].distance, p == max_at});
    }
  }
  return out;
}

/// Cosine distance for each unordered pair of members, languages in
/// lexicographic order. `rows` maps language to that layer's matrix.
inline std::vector<PairDistance> group_pair_distances(
    const ParallelGroup& group, const std::map<std::string, const EmbeddingMatrix*>& rows) {
  std::vector<std::pair<std::string, std::span<const double>>> members;
  for (const auto& [lang, index] : group.members) {  // std::map: already sorted
    const auto it = rows.find(lang);
    if (it == rows.end() || it->second == nullptr || index >= it->second->rows()) {
      throw ValidationError("group " + std::to_string(group.gid),
                            "missing representation for language '" + lang + "'");
    }
    members.emplace_back(lang, it->second->row(index));
  }
  std::vector<PairDistance> out;
  for (std::size_t a = 0; a < members.size(); ++a) {
    for (std::size_t b = a + 1; b < members.size(); ++b) {
      out.push_back({members[a].first, members[b].first,
                     cosine_distance(members[a].second, members[b].second)});
    }
  }
  return out;
}

/// Links of one group at one layer whose distance is strictly above
/// `threshold`; the group's most distant pair carries is_max_pair.
inline std::vector<DistanceLink> translation_links(
    const ParallelGroup& group, const std::map<std::string, const EmbeddingMatrix*>& layer_reprs,
    std::size_t layer, double threshold = kDefaultLinkThreshold) {
  const auto pairs = group_pair_distances(group, layer_reprs);
  return links_from_pairs(group.gid, layer, pairs, threshold);
}

namespace detail {

inline std::size_t common_layer_count(std::span<const LayerStack> stacks) {
  if (stacks.empty()) throw ValidationError("layers", "no layer stacks");
  const std::size_t t = stacks.front().layer_count();
  for (const auto& s : stacks) {
    if (s.layer_count() != t) {
      throw ValidationError("layers", "inconsistent layer counts: '" + stacks.front().language +
                                          "' has " + std::to_string(t) + ", '" + s.language +
                                          "' has " + std::to_string(s.layer_count()));
    }
  }
  return t;
}

}  // namespace detail

/// All pair distances per layer: result[layer][group] lists the group's
/// canonical pairs.
inline std::vector<std::vector<std::vector<PairDistance>>> layer_pair_distances(
    std::span<const ParallelGroup> groups, std::span<const LayerStack> stacks) {
  const std::size_t t = detail::common_layer_count(stacks);
  std::vector<std::vector<std::vector<PairDistance>>> out(t);
  for (std::size_t layer = 0; layer < t; ++layer) {
    std::map<std::string, const EmbeddingMatrix*> rows;
    for (const auto& s : stacks) rows[s.language] = &s.layers[layer];
    out[layer].reserve(groups.size());
    for (const auto& g : groups) out[layer].push_back(group_pair_distances(g, rows));
  }
  return out;
}

/// Threshold-filtered links, indexed by layer.
inline std::vector<std::vector<DistanceLink>> layer_link_sets(
    std::span<const ParallelGroup> groups, std::span<const LayerStack> stacks,
    double threshold = kDefaultLinkThreshold) {
  const auto distances = layer_pair_distances(groups, stacks);
  std::vector<std::vector<DistanceLink>> out(distances.size());
  for (std::size_t layer = 0; layer < distances.size(); ++layer) {
    for (std::size_t g = 0; g < groups.size(); ++g) {
      auto links = links_from_pairs(groups[g].gid, layer, distances[layer][g], threshold);
      out[layer].insert(out[layer].end(), links.begin(), links.end());
    }
  }
  return out;
}

}  // namespace embscope
