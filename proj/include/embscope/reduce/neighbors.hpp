#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "embscope/error.hpp"
#include "embscope/ingest.hpp"

namespace embscope::reduce {

enum class Metric { euclidean, cosine };

/// Exact k nearest neighbours of every row, self excluded.
struct NeighborGraph {
  std::size_t n = 0;
  std::size_t k = 0;
  std::vector<std::size_t> indices;  // n*k, row-major
  std::vector<double> distances;     // n*k, ascending within each row

  std::span<const std::size_t> neighbors(std::size_t i) const { return {indices.data() + i * k, k}; }
  std::span<const double> row_distances(std::size_t i) const { return {distances.data() + i * k, k}; }
};

inline double euclidean_distance(std::span<const double> u, std::span<const double> v) {
  double sum = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double diff = u[i] - v[i];
    sum += diff * diff;
  }
  return std::sqrt(sum);
}

namespace detail {

inline std::vector<double> row_norms(const EmbeddingMatrix& points) {
  std::vector<double> norms(points.rows());
  for (std::size_t i = 0; i < points.rows(); ++i) {
    double sq = 0.0;
    for (double x : points.row(i)) sq += x * x;
    norms[i] = std::sqrt(sq);
    if (norms[i] == 0.0) {
      throw ValidationError("row " + std::to_string(i), "cosine metric undefined for a zero vector");
    }
  }
  return norms;
}

}  // namespace detail

/// Brute-force search. Ties are broken by the lower index.
inline NeighborGraph knn(const EmbeddingMatrix& points, std::size_t k, Metric metric) {
  const std::size_t n = points.rows();
  if (n == 0) throw ValidationError("knn", "empty matrix");
  if (k < 1 || k >= n) {
    throw ValidationError("knn", "k must satisfy 1 <= k < n (k=" + std::to_string(k) +
                                     ", n=" + std::to_string(n) + ")");
  }
  std::vector<double> norms;
  if (metric == Metric::cosine) norms = detail::row_norms(points);

  NeighborGraph graph{n, k, std::vector<std::size_t>(n * k), std::vector<double>(n * k)};
  std::vector<double> dist(n);
  std::vector<std::size_t> order(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    const auto xi = points.row(i);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      if (metric == Metric::euclidean) {
        dist[j] = euclidean_distance(xi, points.row(j));
      } else {
        const auto xj = points.row(j);
        double dot = 0.0;
        for (std::size_t c = 0; c < xi.size(); ++c) dot += xi[c] * xj[c];
        dist[j] = std::clamp(1.0 - dot / (norms[i] * norms[j]), 0.0, 2.0);
      }
    }
    std::size_t pos = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) order[pos++] = j;
    }
    const auto closer = [&](std::size_t a, std::size_t b) {
      return dist[a] < dist[b] || (dist[a] == dist[b] && a < b);
    };
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                      closer);
    for (std::size_t m = 0; m < k; ++m) {
      graph.indices[i * k + m] = order[m];
      graph.distances[i * k + m] = dist[order[m]];
    }
  }
  return graph;
}

}  // namespace embscope::reduce
