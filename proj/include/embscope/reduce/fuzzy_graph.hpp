#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <utility>
#include <vector>

#include "embscope/error.hpp"
#include "embscope/reduce/neighbors.hpp"
#include "embscope/reduce/smooth_knn.hpp"

namespace embscope::reduce {

struct WeightedEdge {
  std::size_t from = 0;
  std::size_t to = 0;
  double weight = 0.0;
  bool operator==(const WeightedEdge&) const = default;
};

/// Symmetric membership graph. `edges` holds both directions of every
/// undirected edge, sorted by (from, to).
struct FuzzyGraph {
  std::size_t n = 0;
  std::vector<WeightedEdge> edges;

  double max_weight() const {
    double m = 0.0;
    for (const auto& e : edges) m = std::max(m, e.weight);
    return m;
  }
};

/// exp(-max(0, d - rho) / sigma); exactly 1 when d <= rho.
inline double membership(double distance, double rho, double sigma) {
  return std::exp(-std::max(0.0, distance - rho) / sigma);
}

/// Directed weights of the kNN graph. Edges whose weight underflows to 0
/// are dropped so every returned weight lies in (0, 1].
inline std::vector<WeightedEdge> membership_strengths(const NeighborGraph& graph,
                                                      const SmoothCalibration& calib) {
  if (calib.rho.size() != graph.n || calib.sigma.size() != graph.n) {
    throw ValidationError("membership_strengths", "calibration rows do not match graph rows");
  }
  std::vector<WeightedEdge> out;
  out.reserve(graph.n * graph.k);
  for (std::size_t i = 0; i < graph.n; ++i) {
    const auto nbrs = graph.neighbors(i);
    const auto dists = graph.row_distances(i);
    for (std::size_t m = 0; m < graph.k; ++m) {
      const double w = membership(dists[m], calib.rho[i], calib.sigma[i]);
      if (w > 0.0) out.push_back({i, nbrs[m], w});
    }
  }
  return out;
}

/// Probabilistic t-conorm w_ij + w_ji - w_ij * w_ji, evaluated as
/// hi + lo * (1 - hi) so the result is symmetric and never below max(w).
inline double fuzzy_union(double w_ij, double w_ji) {
  const double hi = std::max(w_ij, w_ji);
  const double lo = std::min(w_ij, w_ji);
  return std::min(hi + lo * (1.0 - hi), 1.0);
}

inline FuzzyGraph symmetrize(std::size_t n, const std::vector<WeightedEdge>& directed) {
  std::map<std::pair<std::size_t, std::size_t>, double> weight;
  for (const auto& e : directed) {
    if (e.from == e.to) continue;
    if (!(e.weight > 0.0 && e.weight <= 1.0)) {
      throw ValidationError("symmetrize", "edge weight outside (0, 1]");
    }
    weight[{e.from, e.to}] = e.weight;
  }
  FuzzyGraph out{n, {}};
  out.edges.reserve(weight.size() * 2);
  for (const auto& [key, w_ij] : weight) {
    const auto [i, j] = key;
    const auto back = weight.find({j, i});
    const double w_ji = back == weight.end() ? 0.0 : back->second;
    const double b = fuzzy_union(w_ij, w_ji);
    out.edges.push_back({i, j, b});
    if (back == weight.end()) out.edges.push_back({j, i, b});
  }
  std::sort(out.edges.begin(), out.edges.end(), [](const auto& a, const auto& b) {
    return a.from != b.from ? a.from < b.from : a.to < b.to;
  });
  return out;
}

}  // namespace embscope::reduce
