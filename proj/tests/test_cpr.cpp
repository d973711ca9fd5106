#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <set>
#include <vector>

#include "cpred/cpr.hpp"
#include "cpred/errors.hpp"
#include "cpred/simulate.hpp"

using cpred::CprOptions;
using cpred::Dataset;
using cpred::KnotSequence;
using cpred::ValidationError;

namespace {

KnotSequence quantile_knots(const Dataset& data, int order, int df) {
  const int l = df - order;
  const auto& x = data.predictor_values(0);
  if (l == 0) return KnotSequence(order, {x.front(), x.back()}, {});
  std::vector<double> probs;
  for (int j = 1; j <= l; ++j) probs.push_back(double(j) / (l + 1));
  return KnotSequence(order, {x.front(), x.back()},
                      cpred::trimmed_quantile(x, probs));
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

TEST_CASE("a knot-free start yields a single fit and no removals") {
  const Dataset data = cpred::simulate_sine(100, 0.0, 1);
  const auto run = cpred::cpr_run(data, quantile_knots(data, 4, 4));
  CHECK(run.size() == 1);
  CHECK(run.removed().empty());
  CHECK(run.polygons()[0].knots().interior_count() == 0);
  const auto rows = cpred::summarize(run);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].index == 1);
  CHECK(rows[0].dfs == 4);
}

TEST_CASE("the sine reduction performs exactly L+1 fits") {
  const Dataset data = cpred::simulate_sine(200, 0.0, 1);
  int fits = 0;
  CprOptions options;
  options.fitter = [&](const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
    ++fits;
    return cpred::fit_ols(x, y);
  };
  const auto run = cpred::cpr_run(data, quantile_knots(data, 4, 14), options);
  CHECK(fits == 11);
  CHECK(run.size() == 11);
  CHECK(run.removed().size() == 10);

  // Entry i has i interior knots and each knot set nests in the next.
  for (int i = 0; i < run.size(); ++i) {
    const auto& cp = run.polygons()[static_cast<std::size_t>(i)];
    CHECK(cp.knots().interior_count() == i);
    if (i + 1 < run.size()) {
      CHECK(is_subset(cp.knots().interior(),
                      run.polygons()[static_cast<std::size_t>(i + 1)]
                          .knots()
                          .interior()));
    }
  }
}

TEST_CASE("summary rows are ordered and rmse is non-increasing in index") {
  const Dataset data = cpred::simulate_sine(200, 0.0, 1);
  const auto run = cpred::cpr_run(data, quantile_knots(data, 4, 14));
  const auto rows = cpred::summarize(run);
  REQUIRE(rows.size() == 11);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].index == static_cast<int>(i) + 1);
    CHECK(rows[i].interior_count == static_cast<int>(i));
    CHECK(rows[i].dfs == 4 + static_cast<int>(i));
    if (i > 0) CHECK(rows[i].rmse <= rows[i - 1].rmse + 1e-9);
  }

  // Derived check: by two interior knots the sine is already tracked to
  // within a few percent of the response scale of the saturated model.
  const double rms_y = std::sqrt(
      Eigen::Map<const Eigen::VectorXd>(data.response_values().data(),
                                        static_cast<Eigen::Index>(data.rows()))
          .squaredNorm() /
      static_cast<double>(data.rows()));
  CHECK(std::abs(rows[2].rmse - rows[10].rmse) < 0.05 * rms_y);
}

TEST_CASE("identical inputs give identical trajectories") {
  const Dataset data = cpred::simulate_sine(150, 0.05, 42);
  const auto a = cpred::cpr_run(data, quantile_knots(data, 4, 12));
  const auto b = cpred::cpr_run(data, quantile_knots(data, 4, 12));
  REQUIRE(a.size() == b.size());
  for (int i = 0; i < a.size(); ++i) {
    CHECK(a.polygons()[static_cast<std::size_t>(i)].knots().full() ==
          b.polygons()[static_cast<std::size_t>(i)].knots().full());
    CHECK((a.polygons()[static_cast<std::size_t>(i)].ordinates() -
           b.polygons()[static_cast<std::size_t>(i)].ordinates())
              .cwiseAbs()
              .maxCoeff() == 0.0);
  }
  REQUIRE(a.removed().size() == b.removed().size());
  for (std::size_t i = 0; i < a.removed().size(); ++i) {
    CHECK(a.removed()[i].knot == b.removed()[i].knot);
    CHECK(a.removed()[i].weight == b.removed()[i].weight);
  }
}

TEST_CASE("each removal is the smallest-weight knot of its step") {
  const Dataset data = cpred::simulate_sine(200, 0.0, 1);
  const auto run = cpred::cpr_run(data, quantile_knots(data, 4, 10));
  // Rescore each stored polygon: the logged removal must match its rank-1.
  for (std::size_t r = 0; r < run.removed().size(); ++r) {
    const int index_with_l =
        run.size() - static_cast<int>(r);  // model the r-th removal came from
    const auto& cp = run.polygon(index_with_l);
    const auto report = cpred::influence_of(cp);
    const auto rank1 =
        std::find_if(report.entries.begin(), report.entries.end(),
                     [](const auto& e) { return e.rank == 1; });
    REQUIRE(rank1 != report.entries.end());
    CHECK(rank1->knot == run.removed()[r].knot);
    CHECK(rank1->weight == doctest::Approx(run.removed()[r].weight));
  }
}

TEST_CASE("a noisy spline with two sharp knots flattens at two knots") {
  // Recovery property: strong signal, small noise, m = 2 true knots.
  const KnotSequence truth(4, {0.0, 1.0}, {0.3, 0.7});
  Eigen::VectorXd theta(6);
  theta << 0.0, 2.0, -2.0, 3.0, -1.0, 0.5;
  const Dataset data = cpred::simulate_spline(truth, theta, 400, 0.01, 99);

  const auto run = cpred::cpr_run(data, quantile_knots(data, 4, 10));
  const auto rows = cpred::summarize(run);
  const int m = 2;
  const double before =
      (rows[m - 1].rmse - rows[m].rmse) / rows[m - 1].rmse;
  const double after = (rows[m].rmse - rows[m + 1].rmse) / rows[m].rmse;
  CHECK(before > 0.20);
  CHECK(after < 0.05);
}

TEST_CASE("selection cost table matches the closed forms") {
  const auto c20 = cpred::selection_cost_table(20);
  CHECK(c20.cpr == 21);
  CHECK(c20.backward == 211);
  CHECK(c20.grid == 1048576);

  const auto c50 = cpred::selection_cost_table(50);
  CHECK(c50.backward == 1276);
  const auto c100 = cpred::selection_cost_table(63);
  CHECK(c100.cpr == 64);

  CHECK(cpred::selection_cost_table(0).cpr == 1);
  CHECK(cpred::selection_cost_table(0).grid == 1);
  CHECK_THROWS_AS(cpred::selection_cost_table(-1), ValidationError);
  CHECK_THROWS_AS(cpred::selection_cost_table(64), ValidationError);
}

TEST_CASE("diagnostics carry vertices, traces, and the rmse curve") {
  const Dataset data = cpred::simulate_sine(200, 0.0, 1);
  const auto run = cpred::cpr_run(data, quantile_knots(data, 4, 10));

  const auto one = cpred::diagnostics(run, 1);
  CHECK(one.overlays.size() == 1);
  CHECK(one.rmse_by_index.size() == 1);

  const auto bundle = cpred::diagnostics(run, 5, 120);
  REQUIRE(bundle.overlays.size() == 5);
  for (int i = 0; i < 5; ++i) {
    const auto& series = bundle.overlays[static_cast<std::size_t>(i)];
    CHECK(series.index == i + 1);
    // One vertex per basis function: k + (index - 1).
    CHECK(series.vertex_x.size() == static_cast<std::size_t>(4 + i));
    CHECK(series.trace_x.size() == 120);
    CHECK(series.trace_x.front() == data.predictor_values(0).front());
    CHECK(series.trace_x.back() == data.predictor_values(0).back());
  }
  CHECK(bundle.rmse_by_index.size() == 5);

  CHECK_THROWS_AS(cpred::diagnostics(run, 0), ValidationError);
  CHECK_THROWS_AS(cpred::diagnostics(run, 99), ValidationError);
}

TEST_CASE("a df-54 run still serves the first ten rmse points") {
  const Dataset data = cpred::simulate_sine(500, 0.05, 21);
  const auto run = cpred::cpr_run(data, quantile_knots(data, 4, 54));
  REQUIRE(run.size() == 51);
  const auto bundle = cpred::diagnostics(run, 10);
  REQUIRE(bundle.rmse_by_index.size() == 10);
  for (int i = 0; i < 10; ++i) {
    CHECK(bundle.rmse_by_index[static_cast<std::size_t>(i)].first == i + 1);
  }
}

TEST_CASE("rank failure mid-run names the step") {
  // Three data points cannot identify a 4-df cubic, so the first fit fails.
  const Dataset tiny({{"x", {0.0, 0.5, 1.0}}, {"y", {0.0, 1.0, 0.0}}}, "y",
                     {"x"});
  const KnotSequence ks(4, {0.0, 1.0}, {0.5});
  try {
    (void)cpred::cpr_run(tiny, ks);
    FAIL("expected a RankError");
  } catch (const cpred::RankError& e) {
    CHECK(std::string(e.what()).find("step 1") != std::string::npos);
  }
}
