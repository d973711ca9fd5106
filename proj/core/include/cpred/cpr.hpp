#pragma once

#include <cstdint>
#include <vector>

#include "cpred/control_polygon.hpp"
#include "cpred/dataset.hpp"
#include "cpred/fit.hpp"

namespace cpred {

/// One coarsening step of a reduction run.
struct RemovalRecord {
  int step;  // 1-based removal order
  double knot;
  double weight;
};

/// One row of a run summary: index is 1-based with entry i describing the
/// model with i-1 interior knots; dfs = order + interior count.
struct SummaryRow {
  int index;
  int interior_count;
  int dfs;
  double rmse;
  double loglik;
};

struct CprOptions {
  bool keep_fit = false;  // retain residuals on every stored polygon
  Fitter fitter = {};     // defaults to fit_ols
};

/// The trajectory of a control polygon reduction: L+1 fitted polygons where
/// polygons()[i] has i interior knots, each knot set nested in the next.
class CprRun {
 public:
  CprRun(std::vector<ControlPolygon> polygons,
         std::vector<RemovalRecord> removed);

  /// Entry i has i interior knots; size is L+1.
  const std::vector<ControlPolygon>& polygons() const { return polygons_; }
  const std::vector<RemovalRecord>& removed() const { return removed_; }

  /// Polygon by 1-based summary index (entry index has index-1 interior
  /// knots).
  const ControlPolygon& polygon(int index) const;
  int size() const { return static_cast<int>(polygons_.size()); }

 private:
  std::vector<ControlPolygon> polygons_;
  std::vector<RemovalRecord> removed_;
};

/// Backward-step reduction: fit, score every interior knot, drop the one
/// with the smallest influence weight, refit; repeat until no interior knots
/// remain. Exactly L+1 fits for L initial interior knots. A rank-deficient
/// refit aborts with a RankError naming the step.
CprRun cpr_run(const Dataset& data, const KnotSequence& initial_knots,
               const CprOptions& options = {});

/// Per-index summary rows, ordered by index.
std::vector<SummaryRow> summarize(const CprRun& run);

/// Regression-fit counts for selecting among L candidate knots: this
/// reduction needs L+1 fits, a likelihood backward-step L(L+1)/2 + 1, and an
/// exhaustive grid search 2^L.
struct SelectionCost {
  std::uint64_t cpr;
  std::uint64_t backward;
  std::uint64_t grid;
};

SelectionCost selection_cost_table(int L);

/// Control polygon vertices plus a dense spline trace for one model index.
struct OverlaySeries {
  int index;
  std::vector<double> vertex_x;
  std::vector<double> vertex_y;
  std::vector<double> trace_x;
  std::vector<double> trace_y;
};

/// Pure plot data for the two selection diagnostics: sequential
/// control-polygon overlays and the rmse-versus-index curve.
struct DiagnosticBundle {
  std::vector<OverlaySeries> overlays;
  std::vector<std::pair<int, double>> rmse_by_index;
};

/// Builds diagnostics for indices 1..to (1 <= to <= L+1); each spline trace
/// has trace_points evenly spaced evaluation points.
DiagnosticBundle diagnostics(const CprRun& run, int to,
                             int trace_points = 200);

}  // namespace cpred
