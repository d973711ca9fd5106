#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "cpred/cnr.hpp"
#include "cpred/errors.hpp"

using cpred::CnrOptions;
using cpred::Dataset;
using cpred::KnotSequence;
using cpred::ValidationError;

namespace {

// Smooth two-predictor target sampled at fixed pseudo-random locations.
Dataset toy_surface(int n, double sigma, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> x1(static_cast<std::size_t>(n));
  std::vector<double> x2(static_cast<std::size_t>(n));
  std::vector<double> y(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double a = unif(rng);
    const double b = unif(rng);
    x1[static_cast<std::size_t>(i)] = a;
    x2[static_cast<std::size_t>(i)] = b;
    y[static_cast<std::size_t>(i)] = std::sin(3.0 * a) * (1.0 + b) +
                                     0.5 * b * b +
                                     sigma * gauss(rng);
  }
  return Dataset({{"x1", x1}, {"x2", x2}, {"y", y}}, "y", {"x1", "x2"});
}

std::vector<KnotSequence> toy_margins() {
  return {KnotSequence(3, {0.0, 1.0}, {0.25, 0.5, 0.75}),
          KnotSequence(2, {0.0, 1.0}, {1.0 / 3, 2.0 / 3})};
}

bool is_subset(const std::vector<double>& small,
               const std::vector<double>& big) {
  std::multiset<double> pool(big.begin(), big.end());
  for (double v : small) {
    auto it = pool.find(v);
    if (it == pool.end()) return false;
    pool.erase(it);
  }
  return true;
}

}  // namespace

TEST_CASE("an already knot-free reducible set gives a single fit") {
  const Dataset data = toy_surface(200, 0.0, 7);
  const std::vector<KnotSequence> margins{KnotSequence(3, {0.0, 1.0}, {}),
                                          KnotSequence(3, {0.0, 1.0}, {0.5})};
  CnrOptions options;
  options.reducible = {0};
  const auto run = cpred::cnr_run(data, margins, options);
  CHECK(run.size() == 1);
  CHECK(run.removed().empty());
  // The static margin keeps its knot.
  CHECK(run.nets()[0].margins[1].interior_count() == 1);
}

TEST_CASE("an empty reducible set is refused") {
  const Dataset data = toy_surface(100, 0.0, 7);
  CnrOptions options;
  CHECK_THROWS_AS(cpred::cnr_run(data, toy_margins(), options),
                  ValidationError);
  options.reducible = {2};
  CHECK_THROWS_AS(cpred::cnr_run(data, toy_margins(), options),
                  ValidationError);
}

TEST_CASE("the reduction fits once per removal plus the initial model") {
  const Dataset data = toy_surface(500, 0.05, 11);
  int fits = 0;
  CnrOptions options;
  options.reducible = {0, 1};
  options.fitter = [&](const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
    ++fits;
    return cpred::fit_ols(x, y);
  };
  const auto run = cpred::cnr_run(data, toy_margins(), options);
  CHECK(fits == 1 + 3 + 2);
  CHECK(run.size() == 6);
  CHECK(run.removed().size() == 5);

  // Per-margin nesting along the trajectory and rmse non-increasing.
  const auto rows = cpred::summarize(run);
  for (int i = 0; i + 1 < run.size(); ++i) {
    for (std::size_t m = 0; m < 2; ++m) {
      CHECK(is_subset(
          run.nets()[static_cast<std::size_t>(i)].margins[m].interior(),
          run.nets()[static_cast<std::size_t>(i + 1)].margins[m].interior()));
    }
    CHECK(rows[static_cast<std::size_t>(i + 1)].rmse <=
          rows[static_cast<std::size_t>(i)].rmse + 1e-9);
  }
  CHECK(rows.front().index == 1);
  CHECK(rows.front().dfs == 3 * 2);
  CHECK(rows.back().dfs == 6 * 4);
}

TEST_CASE("static margins are never scored or coarsened") {
  const Dataset data = toy_surface(400, 0.05, 13);
  CnrOptions options;
  options.reducible = {1};
  const auto run = cpred::cnr_run(data, toy_margins(), options);
  CHECK(run.size() == 3);  // margin 1 starts with 2 interior knots
  for (const auto& net : run.nets()) {
    CHECK(net.margins[0].interior() ==
          std::vector<double>{0.25, 0.5, 0.75});
  }
  for (const auto& removal : run.removed()) CHECK(removal.margin == 1);
}

TEST_CASE("every logged removal is the global minimum of its step") {
  const Dataset data = toy_surface(500, 0.05, 17);
  CnrOptions options;
  options.reducible = {0, 1};
  options.grid_p = 8;
  const auto run = cpred::cnr_run(data, toy_margins(), options);

  std::vector<std::vector<double>> cols{data.predictor_values(0),
                                        data.predictor_values(1)};
  const auto grid = cpred::make_margin_grid(cols, options.grid_p);
  for (std::size_t r = 0; r < run.removed().size(); ++r) {
    // The r-th removal was scored on the model with index size - r.
    const auto& net = run.net(run.size() - static_cast<int>(r));
    double global_min = std::numeric_limits<double>::infinity();
    for (int m : {0, 1}) {
      for (int j : net.margins[static_cast<std::size_t>(m)].interior_indices()) {
        global_min = std::min(global_min,
                              cpred::marginal_influence(net, m, j, grid));
      }
    }
    CHECK(run.removed()[r].weight == doctest::Approx(global_min));
  }
}

TEST_CASE("deterministic trajectories for identical inputs") {
  const Dataset data = toy_surface(300, 0.02, 19);
  CnrOptions options;
  options.reducible = {0, 1};
  const auto a = cpred::cnr_run(data, toy_margins(), options);
  const auto b = cpred::cnr_run(data, toy_margins(), options);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.removed().size(); ++i) {
    CHECK(a.removed()[i].margin == b.removed()[i].margin);
    CHECK(a.removed()[i].knot == b.removed()[i].knot);
    CHECK(a.removed()[i].weight == b.removed()[i].weight);
  }
}

TEST_CASE("an oversized tensor is refused without the override") {
  const Dataset data = toy_surface(100, 0.0, 23);
  std::vector<double> interior;
  for (int i = 1; i <= 20; ++i) interior.push_back(i / 21.0);
  const std::vector<KnotSequence> wide{
      KnotSequence(4, {0.0, 1.0}, interior),
      KnotSequence(4, {0.0, 1.0}, interior)};
  // (4+20)^2 = 576 coefficients > 100 rows.
  CHECK_THROWS_AS(cpred::fit_control_net(data, wide), ValidationError);
  try {
    (void)cpred::fit_control_net(data, wide);
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("576") != std::string::npos);
  }
}
