#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "embscope/error.hpp"

namespace embscope::reduce {

/// Low-dimensional similarity kernel 1 / (1 + a * d^(2b)).
struct CurveParams {
  double a = 0.0;
  double b = 0.0;
  double min_dist = 0.0;
  double spread = 0.0;
};

inline constexpr std::size_t kCurveSamples = 300;
inline constexpr int kCurveMaxIterations = 1000;
inline constexpr double kCurveStepTolerance = 1e-8;

inline double kernel(double d, double a, double b) {
  if (d <= 0.0) return 1.0;
  return 1.0 / (1.0 + a * std::pow(d, 2.0 * b));
}

/// Target membership: 1 up to min_dist, exponential decay beyond it.
inline double target_membership(double d, double min_dist, double spread) {
  return d <= min_dist ? 1.0 : std::exp(-(d - min_dist) / spread);
}

inline void validate_curve_inputs(double min_dist, double spread) {
  if (!(spread > 0.0)) throw ValidationError("spread", "must be positive");
  if (!(min_dist >= 0.0 && min_dist < 3.0 * spread)) {
    throw ValidationError("min_dist", "must satisfy 0 <= min_dist < 3 * spread");
  }
}

struct KernelFit {
  double a = 0.0;
  double b = 0.0;
  double residual = 0.0;  // sum of squared errors
  int iterations = 0;
};

inline double kernel_residual(std::span<const double> xs, std::span<const double> ys, double a,
                              double b) {
  double sum = 0.0;
  for (std::size_t s = 0; s < xs.size(); ++s) {
    const double r = kernel(xs[s], a, b) - ys[s];
    sum += r * r;
  }
  return sum;
}

/// Least-squares fit of (a, b) by Levenberg-Marquardt with diagonal
/// (Marquardt) scaling. Stops once an accepted or trial step is below
/// kCurveStepTolerance in every coordinate.
inline KernelFit fit_kernel(std::span<const double> xs, std::span<const double> ys,
                            double a0 = 1.0, double b0 = 1.0) {
  double a = a0;
  double b = b0;
  double cost = kernel_residual(xs, ys, a, b);
  double lambda = 1e-3;
  for (int it = 1; it <= kCurveMaxIterations; ++it) {
    // Normal equations J^T J and gradient J^T r.
    double jaa = 0.0, jab = 0.0, jbb = 0.0, ga = 0.0, gb = 0.0;
    for (std::size_t s = 0; s < xs.size(); ++s) {
      const double d = xs[s];
      if (d <= 0.0) continue;  // kernel is 1 at the origin for every (a, b)
      const double p = std::pow(d, 2.0 * b);
      const double denom = 1.0 + a * p;
      const double f = 1.0 / denom;
      const double da = -p / (denom * denom);
      const double db = -a * p * 2.0 * std::log(d) / (denom * denom);
      const double r = f - ys[s];
      jaa += da * da;
      jab += da * db;
      jbb += db * db;
      ga += da * r;
      gb += db * r;
    }
    const double maa = jaa * (1.0 + lambda);
    const double mbb = jbb * (1.0 + lambda);
    const double det = maa * mbb - jab * jab;
    if (!(std::abs(det) > 0.0)) {
      throw NumericError("curve fit: singular normal equations");
    }
    const double step_a = -(mbb * ga - jab * gb) / det;
    const double step_b = -(maa * gb - jab * ga) / det;
    const bool tiny = std::abs(step_a) < kCurveStepTolerance && std::abs(step_b) < kCurveStepTolerance;

    const double na = a + step_a;
    const double nb = b + step_b;
    if (na > 0.0 && nb > 0.0) {
      const double trial = kernel_residual(xs, ys, na, nb);
      if (trial <= cost) {
        a = na;
        b = nb;
        cost = trial;
        lambda = std::max(lambda * 0.1, 1e-12);
        if (tiny) return {a, b, cost, it};
        continue;
      }
    }
    if (tiny) return {a, b, cost, it};
    lambda *= 10.0;
  }
  throw NumericError("curve fit did not converge after " + std::to_string(kCurveMaxIterations) +
                     " iterations");
}

/// Fits the kernel to the target sampled at 300 equispaced points of
/// [0, 3 * spread].
inline CurveParams fit_curve(double min_dist, double spread) {
  validate_curve_inputs(min_dist, spread);
  std::vector<double> xs(kCurveSamples);
  std::vector<double> ys(kCurveSamples);
  for (std::size_t s = 0; s < kCurveSamples; ++s) {
    xs[s] = 3.0 * spread * static_cast<double>(s) / static_cast<double>(kCurveSamples - 1);
    ys[s] = target_membership(xs[s], min_dist, spread);
  }
  const auto fit = fit_kernel(xs, ys);
  return {fit.a, fit.b, min_dist, spread};
}

}  // namespace embscope::reduce
