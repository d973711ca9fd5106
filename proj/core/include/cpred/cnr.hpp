#pragma once

#include <vector>

#include "cpred/cpr.hpp"
#include "cpred/dataset.hpp"
#include "cpred/tensor.hpp"

namespace cpred {

/// One coarsening step of a control net reduction.
struct CnrRemoval {
  int step;    // 1-based removal order
  int margin;  // 0-based margin the knot came from
  double knot;
  double weight;
};

/// Summary row for one model of a net reduction trajectory. dfs is the total
/// tensor coefficient count.
struct CnrSummaryRow {
  int index;
  std::vector<int> interior_counts;  // per margin
  int dfs;
  double rmse;
  double loglik;
};

struct CnrOptions {
  std::vector<int> reducible;  // 0-based margins eligible for coarsening
  int grid_p = 20;
  bool keep_fit = false;
  bool allow_big_tensor = false;
  std::size_t slice_budget = kDefaultSliceBudget;
  Fitter fitter = {};
};

/// Trajectory of a control net reduction: entry i has i interior knots
/// summed over the reducible margins, entry sizes nest per margin.
class CnrRun {
 public:
  CnrRun(std::vector<ControlNet> nets, std::vector<CnrRemoval> removed,
         std::vector<int> reducible);

  const std::vector<ControlNet>& nets() const { return nets_; }
  const std::vector<CnrRemoval>& removed() const { return removed_; }
  const std::vector<int>& reducible() const { return reducible_; }

  /// Net by 1-based summary index.
  const ControlNet& net(int index) const;
  int size() const { return static_cast<int>(nets_.size()); }

 private:
  std::vector<ControlNet> nets_;
  std::vector<CnrRemoval> removed_;
  std::vector<int> reducible_;
};

/// Backward-step reduction across margins: fit, score every interior knot on
/// the reducible margins by marginal influence, drop the global minimum
/// regardless of margin, refit; repeat until the reducible margins have no
/// interior knots. Margins outside the reducible set are never touched.
/// Exactly 1 + (total reducible interior knots) fits are performed.
CnrRun cnr_run(const Dataset& data, const std::vector<KnotSequence>& margins,
               const CnrOptions& options);

std::vector<CnrSummaryRow> summarize(const CnrRun& run);

}  // namespace cpred
