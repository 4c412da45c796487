#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "embscope/error.hpp"
#include "embscope/reduce/neighbors.hpp"

namespace embscope::reduce {

inline constexpr int kBandwidthMaxIterations = 64;

struct RowCalibration {
  double rho = 0.0;
  double sigma = 0.0;
  bool clamped = false;  // sigma was raised to the floor
};

/// Per-row rho and sigma for a whole neighbour graph.
struct SmoothCalibration {
  std::vector<double> rho;
  std::vector<double> sigma;
};

/// 1e-3 of the row's mean distance, or 1e-3 * 1e-3 for an all-zero row.
inline double sigma_floor(std::span<const double> distances) {
  const double mean =
      std::accumulate(distances.begin(), distances.end(), 0.0) / static_cast<double>(distances.size());
  return 1e-3 * (mean > 0.0 ? mean : 1e-3);
}

/// Sum of exp(-max(0, d - rho) / sigma) over the row.
inline double membership_sum(std::span<const double> distances, double rho, double sigma) {
  double sum = 0.0;
  for (double d : distances) sum += std::exp(-std::max(0.0, d - rho) / sigma);
  return sum;
}

/// Finds sigma with membership_sum == log2(k) by bisection. The sum rises
/// monotonically from the count of distances <= rho (sigma -> 0) to k
/// (sigma -> inf); outside that open range the target is unreachable and
/// sigma is clamped to the floor.
inline RowCalibration smooth_knn(std::span<const double> distances) {
  if (distances.empty()) throw ValidationError("smooth_knn", "empty distance row");
  const double k = static_cast<double>(distances.size());
  const double target = std::log2(k);

  RowCalibration out;
  for (double d : distances) {
    if (d > 0.0) {
      out.rho = d;
      break;
    }
  }
  const double floor = sigma_floor(distances);

  double at_zero = 0.0;
  for (double d : distances) at_zero += d <= out.rho ? 1.0 : 0.0;
  if (!(at_zero < target && target < k)) {
    out.sigma = floor;
    out.clamped = true;
    return out;
  }

  double lo = 0.0;
  double hi = 1.0;
  while (membership_sum(distances, out.rho, hi) < target) hi *= 2.0;
  // Bisect the full iteration budget: the residual tolerance is a bound
  // on the result, not an early exit.
  double mid = hi;
  for (int it = 0; it < kBandwidthMaxIterations; ++it) {
    mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    const double sum = membership_sum(distances, out.rho, mid);
    if (sum == target) break;
    (sum > target ? hi : lo) = mid;
  }
  out.sigma = mid;
  if (out.sigma < floor) {
    out.sigma = floor;
    out.clamped = true;
  }
  return out;
}

inline SmoothCalibration calibrate(const NeighborGraph& graph) {
  SmoothCalibration calib{std::vector<double>(graph.n), std::vector<double>(graph.n)};
  for (std::size_t i = 0; i < graph.n; ++i) {
    const auto row = smooth_knn(graph.row_distances(i));
    calib.rho[i] = row.rho;
    calib.sigma[i] = row.sigma;
  }
  return calib;
}

}  // namespace embscope::reduce
