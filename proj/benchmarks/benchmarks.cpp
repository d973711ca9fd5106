#include <benchmark/benchmark.h>

#include <Eigen/Core>
#include <random>
#include <vector>

#include "cpred/basis.hpp"
#include "cpred/control_polygon.hpp"
#include "cpred/cpr.hpp"
#include "cpred/simulate.hpp"
#include "cpred/tensor.hpp"

namespace {

cpred::KnotSequence reference_knots() {
  return cpred::KnotSequence(4, {0.0, 6.0}, {1.0, 1.5, 2.3, 4.0, 4.5});
}

std::vector<double> grid(double a, double b, int n) {
  std::vector<double> xs(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) xs[static_cast<std::size_t>(i)] = a + (b - a) * i / double(n - 1);
  return xs;
}

void BM_BasisRow(benchmark::State& state) {
  const auto ks = reference_knots();
  double x = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(cpred::basis_row(x, ks));
    x += 0.37;
    if (x > 6.0) x -= 6.0;
  }
}
BENCHMARK(BM_BasisRow);

void BM_BasisMatrix(benchmark::State& state) {
  const auto ks = reference_knots();
  const auto xs = grid(0.0, 6.0, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(cpred::basis_matrix(xs, ks));
  }
}
BENCHMARK(BM_BasisMatrix)->Arg(500)->Arg(5000);

void BM_InfluenceOf(benchmark::State& state) {
  Eigen::VectorXd theta(9);
  theta << 1, 0, 3.5, 4.2, 3.7, -0.5, -0.7, 2, 1.5;
  const cpred::ControlPolygon cp(reference_knots(), theta);
  for (auto _ : state) {
    benchmark::DoNotOptimize(cpred::influence_of(cp));
  }
}
BENCHMARK(BM_InfluenceOf);

void BM_InsertKnot(benchmark::State& state) {
  const int l = static_cast<int>(state.range(0));
  std::vector<double> interior(static_cast<std::size_t>(l));
  for (int i = 0; i < l; ++i) {
    interior[static_cast<std::size_t>(i)] = (i + 1.0) / (l + 1.0);
  }
  const cpred::KnotSequence ks(4, {0.0, 1.0}, interior);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> unif(-2.0, 2.0);
  Eigen::VectorXd theta(ks.coefficient_count());
  for (auto& v : theta) v = unif(rng);
  const cpred::ControlPolygon cp(ks, theta);
  for (auto _ : state) {
    benchmark::DoNotOptimize(cpred::insert_knot(cp, 0.512345));
  }
}
BENCHMARK(BM_InsertKnot)->Arg(10)->Arg(100);

void BM_CprRunSine(benchmark::State& state) {
  const auto data = cpred::simulate_sine(200, 0.0, 1);
  std::vector<double> probs;
  const int l = static_cast<int>(state.range(0));
  for (int j = 1; j <= l; ++j) probs.push_back(double(j) / (l + 1));
  const auto& x = data.predictor_values(0);
  const cpred::KnotSequence ks(4, {x.front(), x.back()},
                               cpred::trimmed_quantile(x, probs));
  for (auto _ : state) {
    benchmark::DoNotOptimize(cpred::cpr_run(data, ks));
  }
}
BENCHMARK(BM_CprRunSine)->Arg(10)->Arg(25);

void BM_TensorBasis(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const cpred::KnotSequence m1(4, {0.0, 1.0}, {0.2, 0.4, 0.6, 0.8});
  const cpred::KnotSequence m2(3, {0.0, 1.0}, {0.25, 0.5, 0.75});
  const auto x1 = grid(0.0, 1.0, n);
  std::vector<double> x2 = x1;
  std::reverse(x2.begin(), x2.end());
  for (auto _ : state) {
    benchmark::DoNotOptimize(cpred::tensor_basis({x1, x2}, {m1, m2}));
  }
}
BENCHMARK(BM_TensorBasis)->Arg(500)->Arg(2000);

}  // namespace

int main(int argc, char** argv) {
  ::benchmark::Initialize(&argc, argv);
  if (::benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  ::benchmark::RunSpecifiedBenchmarks();
  ::benchmark::Shutdown();
  return 0;
}
