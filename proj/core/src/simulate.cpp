#include "cpred/simulate.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "cpred/basis.hpp"
#include "cpred/errors.hpp"

namespace cpred {

namespace {

std::vector<double> even_grid(double a, double b, int n) {
  if (n < 2) throw ValidationError("simulation needs n >= 2 points");
  std::vector<double> xs(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    xs[static_cast<std::size_t>(i)] =
        a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return xs;
}

Dataset assemble(std::vector<double> xs, std::vector<double> ys, double sigma,
                 std::uint64_t seed) {
  if (sigma < 0.0) throw ValidationError("noise sigma must be >= 0");
  if (sigma > 0.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, sigma);
    for (double& y : ys) y += noise(rng);
  }
  return Dataset({{"x", std::move(xs)}, {"y", std::move(ys)}}, "y", {"x"});
}

}  // namespace

Dataset simulate_sine(int n, double sigma, std::uint64_t seed) {
  auto xs = even_grid(-std::numbers::pi, std::numbers::pi, n);
  std::vector<double> ys(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) ys[i] = std::sin(xs[i]);
  return assemble(std::move(xs), std::move(ys), sigma, seed);
}

Dataset simulate_spline(const KnotSequence& knots, const Eigen::VectorXd& theta,
                        int n, double sigma, std::uint64_t seed) {
  auto xs = even_grid(knots.a(), knots.b(), n);
  std::vector<double> ys(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    ys[i] = eval_spline(xs[i], knots, theta);
  }
  return assemble(std::move(xs), std::move(ys), sigma, seed);
}

Dataset simulate_hormone(int n, double sigma, std::uint64_t seed) {
  const KnotSequence knots(4, {-1.0, 1.0}, {-0.2, -0.05, 0.05, 0.3, 0.6});
  Eigen::VectorXd theta(9);
  theta << -0.60, -0.68, -0.55, -0.40, 1.10, 1.55, 0.95, -0.30, -0.65;
  return simulate_spline(knots, theta, n, sigma, seed);
}

}  // namespace cpred
