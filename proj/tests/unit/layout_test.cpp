#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "embscope/reduce/layout.hpp"

namespace embscope::reduce {
namespace {

FuzzyGraph barbell() {
  // Two 5-cliques joined by one weak bridge 4 -- 5.
  std::vector<WeightedEdge> edges;
  for (std::size_t c = 0; c < 2; ++c) {
    for (std::size_t i = 0; i < 5; ++i) {
      for (std::size_t j = 0; j < 5; ++j) {
        if (i != j) edges.push_back({5 * c + i, 5 * c + j, 1.0});
      }
    }
  }
  edges.push_back({4, 5, 0.1});
  edges.push_back({5, 4, 0.1});
  return symmetrize(10, edges);
}

TEST(InitLayout, RandomIsSeededAndBounded) {
  const auto g = barbell();
  LayoutConfig cfg;
  cfg.seed = 99;
  const auto a = init_layout(g, cfg);
  const auto b = init_layout(g, cfg);
  EXPECT_EQ(a.projection, b.projection);
  EXPECT_FALSE(a.warning);
  for (double c : a.projection.coords) {
    EXPECT_GE(c, -10.0);
    EXPECT_LE(c, 10.0);
  }
  cfg.seed = 100;
  EXPECT_NE(init_layout(g, cfg).projection, a.projection);
}

TEST(InitLayout, SpectralSeparatesBarbellLikeDenseOracle) {
  const auto g = barbell();
  LayoutConfig cfg;
  cfg.init = InitMethod::spectral;
  const auto out = init_layout(g, cfg);
  ASSERT_FALSE(out.warning);

  // Dense oracle: eigenvectors of I - D^-1/2 A D^-1/2.
  Eigen::MatrixXd adj = Eigen::MatrixXd::Zero(10, 10);
  for (const auto& e : g.edges) adj(e.from, e.to) = e.weight;
  const Eigen::VectorXd dinv = adj.rowwise().sum().cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd lap = Eigen::MatrixXd::Identity(10, 10) - dinv.asDiagonal() * adj * dinv.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(lap);
  const Eigen::VectorXd fiedler = solver.eigenvectors().col(1);

  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t j = 5; j < 10; ++j) {
      EXPECT_LT(out.projection.x(i) * out.projection.x(j), 0.0) << "clusters not split on x";
      EXPECT_LT(fiedler(i) * fiedler(j), 0.0);
    }
  }
  // First layout axis is the Fiedler vector up to sign and scale.
  Eigen::VectorXd x(10);
  for (int i = 0; i < 10; ++i) x(i) = out.projection.x(i);
  EXPECT_NEAR(std::abs(x.normalized().dot(fiedler.normalized())), 1.0, 1e-6);

  double max_abs = 0.0;
  for (double c : out.projection.coords) max_abs = std::max(max_abs, std::abs(c));
  EXPECT_NEAR(max_abs, 10.0, 1e-12);
}

TEST(InitLayout, SpectralFallsBackOnDisconnectedGraph) {
  const auto g = symmetrize(4, {{0, 1, 1.0}, {2, 3, 1.0}});
  LayoutConfig cfg;
  cfg.init = InitMethod::spectral;
  const auto out = init_layout(g, cfg);
  EXPECT_TRUE(out.warning);
  EXPECT_EQ(out.projection, random_layout(4, cfg.seed));
}

TEST(Gradient, AttractiveCoefficientMatchesFiniteDifferences) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> coord(-3.0, 3.0), pa(0.2, 3.0), pb(0.3, 1.5);
  for (int s = 0; s < 100; ++s) {
    const double a = pa(rng), b = pb(rng);
    double yi[2] = {coord(rng), coord(rng)}, yj[2] = {coord(rng), coord(rng)};
    const auto loss = [&](const double* p) {
      const double d = (p[0] - yj[0]) * (p[0] - yj[0]) + (p[1] - yj[1]) * (p[1] - yj[1]);
      return -std::log(1.0 / (1.0 + a * std::pow(d, b)));
    };
    const double dist_sq = (yi[0] - yj[0]) * (yi[0] - yj[0]) + (yi[1] - yj[1]) * (yi[1] - yj[1]);
    const double c = attractive_coefficient(dist_sq, a, b);
    for (int k = 0; k < 2; ++k) {
      const double h = 1e-6;
      double plus[2] = {yi[0], yi[1]}, minus[2] = {yi[0], yi[1]};
      plus[k] += h;
      minus[k] -= h;
      const double grad = (loss(plus) - loss(minus)) / (2 * h);
      const double move = c * (yi[k] - yj[k]);  // descent direction
      EXPECT_LE(std::abs(move + grad), 1e-4 * std::max(std::abs(grad), 1e-8));
    }
  }
}

TEST(OptimizeLayout, ZeroEpochsIsIdentity) {
  const auto g = barbell();
  LayoutConfig cfg;
  cfg.n_epochs = 0;
  const auto init = random_layout(10, 3);
  EXPECT_EQ(optimize_layout(init, g, fit_curve(0.1, 1.0), cfg), init);
}

TEST(OptimizeLayout, PureAttractionContracts) {
  const auto g = symmetrize(2, {{0, 1, 1.0}});
  LayoutConfig cfg;
  cfg.n_epochs = 50;
  cfg.negative_sample_rate = 0;
  const Projection init{{-5.0, 2.0, 6.0, -3.0}};
  const auto out = optimize_layout(init, g, fit_curve(0.1, 1.0), cfg);
  const double before = std::hypot(init.x(0) - init.x(1), init.y(0) - init.y(1));
  const double after = std::hypot(out.x(0) - out.x(1), out.y(0) - out.y(1));
  EXPECT_LE(after, before);
  EXPECT_LT(after, 1.0);
}

TEST(OptimizeLayout, DeterministicAndFinite) {
  const auto g = barbell();
  LayoutConfig cfg;
  cfg.n_epochs = 200;
  const auto curve = fit_curve(0.1, 1.0);
  const auto a = optimize_layout(random_layout(10, 1), g, curve, cfg);
  const auto b = optimize_layout(random_layout(10, 1), g, curve, cfg);
  EXPECT_EQ(a, b);
  for (double c : a.coords) EXPECT_TRUE(std::isfinite(c));
}

TEST(OptimizeLayout, RejectsMismatchedLayout) {
  EXPECT_THROW(optimize_layout(random_layout(3, 1), barbell(), fit_curve(0.1, 1.0), LayoutConfig{}),
               ValidationError);
}

TEST(OptimizeLayout, NonFiniteCoordinateIsAHardError) {
  const auto g = symmetrize(2, {{0, 1, 1.0}});
  LayoutConfig cfg;
  cfg.n_epochs = 5;
  const Projection init{{INFINITY, 0.0, 1.0, 0.0}};
  try {
    optimize_layout(init, g, fit_curve(0.1, 1.0), cfg);
    FAIL();
  } catch (const NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("epoch"), std::string::npos);
  }
}

}  // namespace
}  // namespace embscope::reduce
