#pragma once

#include <Eigen/Core>
#include <optional>
#include <span>
#include <vector>

#include "cpred/control_polygon.hpp"
#include "cpred/dataset.hpp"
#include "cpred/fit.hpp"
#include "cpred/knots.hpp"

namespace cpred {

/// Tensor-product B-spline basis over m >= 2 margins. Columns follow the
/// Kronecker arrangement with the first margin's coefficient index varying
/// fastest, so flat_index and multi_index form the column bijection.
class TensorBasis {
 public:
  TensorBasis(std::vector<KnotSequence> margins, Eigen::MatrixXd values);

  const std::vector<KnotSequence>& margins() const { return margins_; }
  const Eigen::MatrixXd& values() const { return values_; }
  Eigen::Index rows() const { return values_.rows(); }
  Eigen::Index cols() const { return values_.cols(); }

  /// Flat column index of a multi-index (one 0-based coefficient index per
  /// margin, first margin fastest-varying).
  Eigen::Index flat_index(std::span<const int> multi) const;
  /// Inverse of flat_index.
  std::vector<int> multi_index(Eigen::Index flat) const;

 private:
  std::vector<KnotSequence> margins_;
  Eigen::MatrixXd values_;
};

/// Total coefficient count of a tensor product over the given margins.
Eigen::Index tensor_coefficient_count(std::span<const KnotSequence> margins);

/// Builds the tensor basis by folding margins left to right: each step is a
/// ones-vector Kronecker expansion followed by an element-wise product.
/// Requires m >= 2 margins and equal-length coordinate columns within each
/// margin's boundaries.
TensorBasis tensor_basis(const std::vector<std::vector<double>>& columns,
                         const std::vector<KnotSequence>& margins);

/// A fitted (or explicitly specified) tensor-product spline: the margins and
/// the coefficient vector theta in the tensor column ordering.
struct ControlNet {
  std::vector<KnotSequence> margins;
  Eigen::VectorXd theta;
  std::optional<FitStats> fit;
};

/// Single tensor-basis row at one point (matrix construction path).
Eigen::VectorXd tensor_row(std::span<const double> point,
                           std::span<const KnotSequence> margins);

/// Matrix-path evaluation of the net at one point.
double tensor_eval(std::span<const double> point, const ControlNet& net);

/// Nested-summation evaluation of the net: sums the product of per-margin
/// basis values over every multi-index. Deliberately independent of the
/// Kronecker fold; serves as the oracle for the matrix path.
double tensor_eval_sum(std::span<const double> point, const ControlNet& net);

/// Coefficients of the uni-variable spline obtained by conditioning every
/// margin except free_margin (0-based) at the given values (ordered by
/// margin index, the free margin skipped). Pairing the result with the free
/// margin's knot sequence yields the sliced control polygon.
Eigen::VectorXd conditional_ordinates(const ControlNet& net, int free_margin,
                                      std::span<const double> fixed);

/// Influence weight of one interior knot (1-based full-sequence index) of
/// the named margin on the control polygon sliced at the fixed values.
double conditional_influence(const ControlNet& net, int margin,
                             int knot_index, std::span<const double> fixed);

/// Evenly spaced conditioning values per margin: p points strictly inside
/// the observed data range of each margin, at t/(p+1) steps for t = 1..p.
struct MarginGrid {
  int p = 20;
  std::vector<std::vector<double>> values;  // one set per margin
};

MarginGrid make_margin_grid(const std::vector<std::vector<double>>& columns,
                            int p = 20);

/// Default cap on the number of conditioning slices a marginal influence
/// evaluation may enumerate (the Cartesian product of the other margins'
/// grids grows as p^(m-1)).
inline constexpr std::size_t kDefaultSliceBudget = 200000;

/// Relative influence of a knot on the whole net: the maximum conditional
/// influence over the Cartesian product of the other margins' grid values.
/// Throws when the grid is empty or the slice count exceeds the budget.
double marginal_influence(const ControlNet& net, int margin, int knot_index,
                          const MarginGrid& grid,
                          std::size_t slice_budget = kDefaultSliceBudget);

/// Tensor design matrix: tensor basis columns for the predictors followed by
/// covariate columns verbatim (no intercept).
Eigen::MatrixXd tensor_design_matrix(const Dataset& data,
                                     const std::vector<KnotSequence>& margins);

/// Fits the tensor-product regression. A basis with more coefficients than
/// data rows is refused unless allow_big is set: such models are rarely
/// identifiable and the QR solve cost grows cubically with the coefficient
/// count.
ControlNet fit_control_net(const Dataset& data,
                           const std::vector<KnotSequence>& margins,
                           bool keep_fit = false, bool allow_big = false,
                           const Fitter& fitter = {});

}  // namespace cpred
