#include "cpred/cpr.hpp"

#include <algorithm>
#include <fmt/format.h>

#include "cpred/errors.hpp"

namespace cpred {

CprRun::CprRun(std::vector<ControlPolygon> polygons,
               std::vector<RemovalRecord> removed)
    : polygons_(std::move(polygons)), removed_(std::move(removed)) {
  if (polygons_.empty()) throw ValidationError("a run stores at least one fit");
  for (std::size_t i = 0; i < polygons_.size(); ++i) {
    if (polygons_[i].knots().interior_count() != static_cast<int>(i)) {
      throw ValidationError(
          fmt::format("trajectory entry {} should have {} interior knots",
                      i, i));
    }
  }
}

const ControlPolygon& CprRun::polygon(int index) const {
  if (index < 1 || index > size()) {
    throw ValidationError(fmt::format(
        "model index {} out of range [1, {}]", index, size()));
  }
  return polygons_[static_cast<std::size_t>(index - 1)];
}

CprRun cpr_run(const Dataset& data, const KnotSequence& initial_knots,
               const CprOptions& options) {
  const int L = initial_knots.interior_count();
  std::vector<ControlPolygon> trajectory;
  trajectory.reserve(static_cast<std::size_t>(L) + 1);
  std::vector<RemovalRecord> removed;
  removed.reserve(static_cast<std::size_t>(L));

  KnotSequence knots = initial_knots;
  int step = 0;
  while (true) {
    try {
      trajectory.push_back(
          fit_control_polygon(data, knots, options.keep_fit, options.fitter));
    } catch (const RankError& e) {
      throw RankError(fmt::format(
          "reduction step {} (with {} interior knots): {}", step + 1,
          knots.interior_count(), e.what()));
    }
    const ControlPolygon& cp = trajectory.back();
    if (cp.knots().interior_count() == 0) break;

    const InfluenceReport report = influence_of(cp);
    const auto least = std::find_if(
        report.entries.begin(), report.entries.end(),
        [](const InfluenceEntry& e) { return e.rank == 1; });
    ++step;
    removed.push_back(RemovalRecord{step, least->knot, least->weight});
    knots = cp.knots().without(least->index);
  }

  std::reverse(trajectory.begin(), trajectory.end());
  return CprRun(std::move(trajectory), std::move(removed));
}

std::vector<SummaryRow> summarize(const CprRun& run) {
  std::vector<SummaryRow> rows;
  rows.reserve(static_cast<std::size_t>(run.size()));
  for (int i = 0; i < run.size(); ++i) {
    const ControlPolygon& cp = run.polygons()[static_cast<std::size_t>(i)];
    SummaryRow row;
    row.index = i + 1;
    row.interior_count = cp.knots().interior_count();
    row.dfs = cp.knots().coefficient_count();
    row.rmse = cp.fit() ? cp.fit()->rmse : 0.0;
    row.loglik = cp.fit() ? cp.fit()->loglik : 0.0;
    rows.push_back(row);
  }
  return rows;
}

SelectionCost selection_cost_table(int L) {
  if (L < 0 || L > 63) {
    throw ValidationError(
        fmt::format("selection_cost_table expects 0 <= L <= 63, got {}", L));
  }
  const auto l = static_cast<std::uint64_t>(L);
  return SelectionCost{l + 1, l * (l + 1) / 2 + 1, std::uint64_t{1} << l};
}

DiagnosticBundle diagnostics(const CprRun& run, int to, int trace_points) {
  if (to < 1 || to > run.size()) {
    throw ValidationError(fmt::format(
        "diagnostic index {} out of range [1, {}]", to, run.size()));
  }
  if (trace_points < 2) {
    throw ValidationError("a spline trace needs at least 2 points");
  }

  DiagnosticBundle bundle;
  bundle.overlays.reserve(static_cast<std::size_t>(to));
  for (int index = 1; index <= to; ++index) {
    const ControlPolygon& cp = run.polygon(index);
    OverlaySeries series;
    series.index = index;
    series.vertex_x.assign(cp.abscissae().begin(), cp.abscissae().end());
    series.vertex_y.assign(cp.ordinates().begin(), cp.ordinates().end());
    const double a = cp.knots().a();
    const double b = cp.knots().b();
    series.trace_x.resize(static_cast<std::size_t>(trace_points));
    series.trace_y.resize(static_cast<std::size_t>(trace_points));
    for (int t = 0; t < trace_points; ++t) {
      const double x = a + (b - a) * static_cast<double>(t) /
                               static_cast<double>(trace_points - 1);
      series.trace_x[static_cast<std::size_t>(t)] = x;
      series.trace_y[static_cast<std::size_t>(t)] = cp.eval(x);
    }
    bundle.overlays.push_back(std::move(series));
    bundle.rmse_by_index.emplace_back(
        index, run.polygon(index).fit() ? run.polygon(index).fit()->rmse : 0.0);
  }
  return bundle;
}

}  // namespace cpred
