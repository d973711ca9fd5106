#include "cpred/cnr.hpp"

#include <algorithm>
#include <fmt/format.h>
#include <limits>

#include "cpred/errors.hpp"

namespace cpred {

namespace {

int reducible_interior_total(const std::vector<KnotSequence>& margins,
                             const std::vector<int>& reducible) {
  int total = 0;
  for (int m : reducible) {
    total += margins[static_cast<std::size_t>(m)].interior_count();
  }
  return total;
}

}  // namespace

CnrRun::CnrRun(std::vector<ControlNet> nets, std::vector<CnrRemoval> removed,
               std::vector<int> reducible)
    : nets_(std::move(nets)),
      removed_(std::move(removed)),
      reducible_(std::move(reducible)) {
  if (nets_.empty()) throw ValidationError("a run stores at least one fit");
  for (std::size_t i = 0; i < nets_.size(); ++i) {
    if (reducible_interior_total(nets_[i].margins, reducible_) !=
        static_cast<int>(i)) {
      throw ValidationError(fmt::format(
          "trajectory entry {} should have {} reducible interior knots", i,
          i));
    }
  }
}

const ControlNet& CnrRun::net(int index) const {
  if (index < 1 || index > size()) {
    throw ValidationError(
        fmt::format("model index {} out of range [1, {}]", index, size()));
  }
  return nets_[static_cast<std::size_t>(index - 1)];
}

CnrRun cnr_run(const Dataset& data, const std::vector<KnotSequence>& margins,
               const CnrOptions& options) {
  if (margins.size() < 2) {
    throw ValidationError("control net reduction needs at least 2 margins");
  }
  std::vector<int> reducible = options.reducible;
  std::sort(reducible.begin(), reducible.end());
  reducible.erase(std::unique(reducible.begin(), reducible.end()),
                  reducible.end());
  if (reducible.empty()) {
    throw ValidationError("nothing to reduce: the reducible margin set is empty");
  }
  for (int m : reducible) {
    if (m < 0 || m >= static_cast<int>(margins.size())) {
      throw ValidationError(fmt::format(
          "reducible margin {} out of range [0, {})", m, margins.size()));
    }
  }

  // Conditioning grid from the observed data, fixed for the whole run.
  std::vector<std::vector<double>> columns;
  columns.reserve(margins.size());
  for (std::size_t i = 0; i < margins.size(); ++i) {
    columns.push_back(data.predictor_values(i));
  }
  const MarginGrid grid = make_margin_grid(columns, options.grid_p);

  std::vector<ControlNet> trajectory;
  std::vector<CnrRemoval> removed;
  std::vector<KnotSequence> current = margins;
  int step = 0;
  while (true) {
    try {
      trajectory.push_back(fit_control_net(data, current, options.keep_fit,
                                           options.allow_big_tensor,
                                           options.fitter));
    } catch (const RankError& e) {
      throw RankError(fmt::format("net reduction step {}: {}", step + 1,
                                  e.what()));
    }
    const ControlNet& net = trajectory.back();
    if (reducible_interior_total(current, reducible) == 0) break;

    // Global minimum across all interior knots of reducible margins; ties
    // resolve to the lower margin, then the lower knot index.
    int best_margin = -1;
    int best_index = -1;
    double best_weight = std::numeric_limits<double>::infinity();
    for (int m : reducible) {
      const KnotSequence& seq = current[static_cast<std::size_t>(m)];
      for (int j : seq.interior_indices()) {
        const double w =
            marginal_influence(net, m, j, grid, options.slice_budget);
        if (w < best_weight) {
          best_weight = w;
          best_margin = m;
          best_index = j;
        }
      }
    }

    ++step;
    removed.push_back(CnrRemoval{
        step, best_margin,
        current[static_cast<std::size_t>(best_margin)].at(best_index),
        best_weight});
    current[static_cast<std::size_t>(best_margin)] =
        current[static_cast<std::size_t>(best_margin)].without(best_index);
  }

  std::reverse(trajectory.begin(), trajectory.end());
  return CnrRun(std::move(trajectory), std::move(removed),
                std::move(reducible));
}

std::vector<CnrSummaryRow> summarize(const CnrRun& run) {
  std::vector<CnrSummaryRow> rows;
  rows.reserve(static_cast<std::size_t>(run.size()));
  for (int i = 0; i < run.size(); ++i) {
    const ControlNet& net = run.nets()[static_cast<std::size_t>(i)];
    CnrSummaryRow row;
    row.index = i + 1;
    for (const auto& m : net.margins) {
      row.interior_counts.push_back(m.interior_count());
    }
    row.dfs = static_cast<int>(tensor_coefficient_count(net.margins));
    row.rmse = net.fit ? net.fit->rmse : 0.0;
    row.loglik = net.fit ? net.fit->loglik : 0.0;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace cpred
