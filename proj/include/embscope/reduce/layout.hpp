#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "embscope/detail/random.hpp"
#include "embscope/error.hpp"
#include "embscope/reduce/curve.hpp"
#include "embscope/reduce/fuzzy_graph.hpp"

namespace embscope::reduce {

/// n x 2 layout, row-major.
struct Projection {
  std::vector<double> coords;

  std::size_t rows() const noexcept { return coords.size() / 2; }
  double x(std::size_t i) const { return coords[2 * i]; }
  double y(std::size_t i) const { return coords[2 * i + 1]; }
  bool operator==(const Projection&) const = default;
};

enum class InitMethod { random, spectral };

struct LayoutConfig {
  int n_epochs = 500;
  double initial_lr = 1.0;
  int negative_sample_rate = 5;
  std::uint64_t seed = 42;
  InitMethod init = InitMethod::random;

  // Zero epochs and zero negative samples are accepted; they are the
  // degenerate no-op and pure-attraction settings.
  void validate() const {
    if (n_epochs < 0) throw ValidationError("n_epochs", "must be non-negative");
    if (!(initial_lr > 0.0)) throw ValidationError("initial_lr", "must be positive");
    if (negative_sample_rate < 0) {
      throw ValidationError("negative_sample_rate", "must be non-negative");
    }
  }
};

inline constexpr double kInitExtent = 10.0;
inline constexpr double kGradientClip = 4.0;

struct InitResult {
  Projection projection;
  std::optional<std::string> warning;
};

inline Projection random_layout(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Projection out{std::vector<double>(2 * n)};
  for (double& c : out.coords) c = embscope::detail::uniform(rng, -kInitExtent, kInitExtent);
  return out;
}

namespace detail {

inline bool is_connected(const FuzzyGraph& graph) {
  if (graph.n == 0) return false;
  std::vector<std::vector<std::size_t>> adj(graph.n);
  for (const auto& e : graph.edges) adj[e.from].push_back(e.to);
  std::vector<bool> seen(graph.n, false);
  std::vector<std::size_t> stack{0};
  seen[0] = true;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const auto v = stack.back();
    stack.pop_back();
    for (auto w : adj[v]) {
      if (!seen[w]) {
        seen[w] = true;
        ++reached;
        stack.push_back(w);
      }
    }
  }
  return reached == graph.n;
}

}  // namespace detail

/// Eigenvectors of the symmetric normalized Laplacian for its 2nd and 3rd
/// smallest eigenvalues, computed by block subspace iteration on
/// (I + D^-1/2 A D^-1/2) / 2 with the trivial vector sqrt(deg) deflated.
/// Returns nullopt when the graph is disconnected or too small.
inline std::optional<Eigen::MatrixXd> laplacian_eigenmap(const FuzzyGraph& graph,
                                                         std::uint64_t seed) {
  const auto n = static_cast<Eigen::Index>(graph.n);
  if (n < 3 || !detail::is_connected(graph)) return std::nullopt;

  Eigen::VectorXd degree = Eigen::VectorXd::Zero(n);
  for (const auto& e : graph.edges) degree[static_cast<Eigen::Index>(e.from)] += e.weight;
  const Eigen::VectorXd inv_sqrt = degree.cwiseSqrt().cwiseInverse();

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(graph.edges.size() + graph.n);
  for (const auto& e : graph.edges) {
    const auto i = static_cast<Eigen::Index>(e.from);
    const auto j = static_cast<Eigen::Index>(e.to);
    triplets.emplace_back(i, j, 0.5 * e.weight * inv_sqrt[i] * inv_sqrt[j]);
  }
  for (Eigen::Index i = 0; i < n; ++i) triplets.emplace_back(i, i, 0.5);
  Eigen::SparseMatrix<double> op(n, n);
  op.setFromTriplets(triplets.begin(), triplets.end());

  const Eigen::VectorXd trivial = degree.cwiseSqrt().normalized();
  const Eigen::Index block = std::min<Eigen::Index>(4, n - 1);

  std::mt19937_64 rng(seed);
  Eigen::MatrixXd q(n, block);
  for (Eigen::Index c = 0; c < block; ++c) {
    for (Eigen::Index r = 0; r < n; ++r) q(r, c) = embscope::detail::uniform(rng, -1.0, 1.0);
  }
  const auto orthonormalize = [&](Eigen::MatrixXd& m) {
    m -= trivial * (trivial.transpose() * m);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
    m = qr.householderQ() * Eigen::MatrixXd::Identity(n, block);
  };
  orthonormalize(q);

  constexpr int kMaxIterations = 20000;
  constexpr double kResidualTolerance = 1e-9;
  Eigen::MatrixXd ritz;
  for (int it = 1; it <= kMaxIterations; ++it) {
    Eigen::MatrixXd z = op * q;
    orthonormalize(z);
    q = std::move(z);
    if (it % 10 != 0 && it != kMaxIterations) continue;
    const Eigen::MatrixXd h = q.transpose() * (op * q);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small(h);
    // Ascending eigenvalues; the two largest of the operator are wanted.
    ritz = q * small.eigenvectors().rightCols(2).rowwise().reverse();
    const Eigen::Vector2d theta = small.eigenvalues().tail(2).reverse();
    const Eigen::MatrixXd residual = op * ritz - ritz * theta.asDiagonal();
    if (residual.colwise().norm().maxCoeff() < kResidualTolerance) break;
  }
  return ritz;
}

/// Random: i.i.d. uniform in [-10, 10]^2. Spectral: Laplacian eigenmap
/// scaled so the largest magnitude is 10, falling back to random (with a
/// warning) on disconnected graphs.
inline InitResult init_layout(const FuzzyGraph& graph, const LayoutConfig& config) {
  if (config.init == InitMethod::random) return {random_layout(graph.n, config.seed), std::nullopt};

  auto vectors = laplacian_eigenmap(graph, config.seed);
  if (!vectors) {
    return {random_layout(graph.n, config.seed),
            "spectral initialisation needs a connected graph with at least 3 nodes; "
            "using random initialisation"};
  }
  Eigen::MatrixXd& v = *vectors;
  for (Eigen::Index c = 0; c < v.cols(); ++c) {
    Eigen::Index arg = 0;
    v.col(c).cwiseAbs().maxCoeff(&arg);
    if (v(arg, c) < 0.0) v.col(c) *= -1.0;
  }
  const double scale = kInitExtent / v.cwiseAbs().maxCoeff();
  Projection out{std::vector<double>(2 * graph.n)};
  for (std::size_t i = 0; i < graph.n; ++i) {
    out.coords[2 * i] = v(static_cast<Eigen::Index>(i), 0) * scale;
    out.coords[2 * i + 1] = v(static_cast<Eigen::Index>(i), 1) * scale;
  }
  return {std::move(out), std::nullopt};
}

/// Coefficient multiplying (y_i - y_j) for an attractive move; equals minus
/// the gradient of log(1 + a * D^b) per unit of (y_i - y_j), D = |y_i - y_j|^2.
inline double attractive_coefficient(double dist_sq, double a, double b) {
  if (dist_sq <= 0.0) return 0.0;
  return -2.0 * a * b * std::pow(dist_sq, b - 1.0) / (1.0 + a * std::pow(dist_sq, b));
}

inline double repulsive_coefficient(double dist_sq, double a, double b) {
  return 2.0 * b / ((0.001 + dist_sq) * (1.0 + a * std::pow(dist_sq, b)));
}

/// Single-threaded SGD over the fuzzy graph in edge order. Edge e is
/// sampled every max_w / w_e epochs; each sample applies one attractive
/// move to both endpoints and `negative_sample_rate` repulsive moves to
/// its source. The learning rate decays linearly to 0.
inline Projection optimize_layout(Projection layout, const FuzzyGraph& graph,
                                  const CurveParams& curve, const LayoutConfig& config) {
  config.validate();
  if (layout.rows() != graph.n) {
    throw ValidationError("optimize_layout", "layout rows do not match graph nodes");
  }
  if (config.n_epochs == 0 || graph.edges.empty()) return layout;

  const double max_w = graph.max_weight();
  std::vector<double> period(graph.edges.size());
  std::vector<double> next(graph.edges.size());
  for (std::size_t e = 0; e < graph.edges.size(); ++e) {
    period[e] = max_w / graph.edges[e].weight;
    next[e] = period[e];
  }

  std::mt19937_64 rng(config.seed ^ 0x9E3779B97F4A7C15ULL);
  auto& y = layout.coords;
  const auto clip = [](double g) { return std::clamp(g, -kGradientClip, kGradientClip); };
  const auto check = [&](std::size_t idx, int epoch, const WeightedEdge& edge) {
    if (!std::isfinite(y[2 * idx]) || !std::isfinite(y[2 * idx + 1])) {
      throw NumericError("non-finite coordinate at epoch " + std::to_string(epoch) + ", edge " +
                         std::to_string(edge.from) + "->" + std::to_string(edge.to));
    }
  };

  for (int epoch = 0; epoch < config.n_epochs; ++epoch) {
    const double alpha =
        config.initial_lr * (1.0 - static_cast<double>(epoch) / static_cast<double>(config.n_epochs));
    for (std::size_t e = 0; e < graph.edges.size(); ++e) {
      if (next[e] > static_cast<double>(epoch)) continue;
      const auto& edge = graph.edges[e];
      const std::size_t i = edge.from;
      const std::size_t j = edge.to;

      double dx = y[2 * i] - y[2 * j];
      double dy = y[2 * i + 1] - y[2 * j + 1];
      double coeff = attractive_coefficient(dx * dx + dy * dy, curve.a, curve.b);
      double gx = clip(coeff * dx);
      double gy = clip(coeff * dy);
      y[2 * i] += gx * alpha;
      y[2 * i + 1] += gy * alpha;
      y[2 * j] -= gx * alpha;
      y[2 * j + 1] -= gy * alpha;
      check(i, epoch, edge);
      check(j, epoch, edge);
      next[e] += period[e];

      for (int s = 0; s < config.negative_sample_rate; ++s) {
        const auto k = static_cast<std::size_t>(embscope::detail::uniform_index(rng, graph.n));
        if (k == i) continue;
        dx = y[2 * i] - y[2 * k];
        dy = y[2 * i + 1] - y[2 * k + 1];
        const double dist_sq = dx * dx + dy * dy;
        if (dist_sq <= 0.0) continue;
        coeff = repulsive_coefficient(dist_sq, curve.a, curve.b);
        gx = clip(coeff * dx);
        gy = clip(coeff * dy);
        y[2 * i] += gx * alpha;
        y[2 * i + 1] += gy * alpha;
        check(i, epoch, edge);
      }
    }
  }
  return layout;
}

}  // namespace embscope::reduce
