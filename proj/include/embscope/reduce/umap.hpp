#pragma once

#include <string>
#include <vector>

#include "embscope/ingest.hpp"
#include "embscope/reduce/curve.hpp"
#include "embscope/reduce/fuzzy_graph.hpp"
#include "embscope/reduce/layout.hpp"
#include "embscope/reduce/neighbors.hpp"
#include "embscope/reduce/smooth_knn.hpp"

namespace embscope::reduce {

struct UmapParams {
  std::size_t k = 15;
  Metric metric = Metric::euclidean;
  double min_dist = 0.1;
  double spread = 1.0;
  LayoutConfig layout;
};

/// Full UMAP pipeline to two dimensions. Warnings (e.g. a spectral
/// initialisation fallback) are appended to `warnings` when given.
inline Projection project(const EmbeddingMatrix& points, const UmapParams& params,
                          std::vector<std::string>* warnings = nullptr) {
  params.layout.validate();
  validate_curve_inputs(params.min_dist, params.spread);

  const auto graph = knn(points, params.k, params.metric);
  const auto calib = calibrate(graph);
  const auto fuzzy = symmetrize(points.rows(), membership_strengths(graph, calib));
  const auto curve = fit_curve(params.min_dist, params.spread);
  auto init = init_layout(fuzzy, params.layout);
  if (init.warning && warnings) warnings->push_back(*init.warning);
  return optimize_layout(std::move(init.projection), fuzzy, curve, params.layout);
}

}  // namespace embscope::reduce
