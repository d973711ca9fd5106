#include "cpred/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "cpred/basis.hpp"
#include "cpred/errors.hpp"

namespace cpred {

namespace {

void require_margin_count(std::size_t m) {
  if (m < 2) {
    throw ValidationError(fmt::format(
        "a tensor product needs at least 2 margins, got {}", m));
  }
}

std::vector<Eigen::Index> margin_dims(std::span<const KnotSequence> margins) {
  std::vector<Eigen::Index> dims(margins.size());
  for (std::size_t i = 0; i < margins.size(); ++i) {
    dims[i] = margins[i].coefficient_count();
  }
  return dims;
}

void require_net(const ControlNet& net) {
  require_margin_count(net.margins.size());
  if (net.theta.size() != tensor_coefficient_count(net.margins)) {
    throw ValidationError(fmt::format(
        "control net has {} coefficients, expected {}", net.theta.size(),
        tensor_coefficient_count(net.margins)));
  }
}

// Iterates all combinations of indices below dims (odometer order, first
// position fastest) and calls fn with the current combination.
template <typename Fn>
void for_each_multi(std::span<const Eigen::Index> dims, Fn&& fn) {
  std::vector<Eigen::Index> idx(dims.size(), 0);
  while (true) {
    fn(std::span<const Eigen::Index>(idx));
    std::size_t pos = 0;
    while (pos < dims.size()) {
      if (++idx[pos] < dims[pos]) break;
      idx[pos] = 0;
      ++pos;
    }
    if (pos == dims.size()) return;
  }
}

}  // namespace

TensorBasis::TensorBasis(std::vector<KnotSequence> margins,
                         Eigen::MatrixXd values)
    : margins_(std::move(margins)), values_(std::move(values)) {
  require_margin_count(margins_.size());
  if (values_.cols() != tensor_coefficient_count(margins_)) {
    throw ValidationError(fmt::format(
        "tensor basis has {} columns, expected {}", values_.cols(),
        tensor_coefficient_count(margins_)));
  }
}

Eigen::Index TensorBasis::flat_index(std::span<const int> multi) const {
  if (multi.size() != margins_.size()) {
    throw ValidationError("multi-index length must match the margin count");
  }
  Eigen::Index flat = 0;
  Eigen::Index stride = 1;
  for (std::size_t i = 0; i < margins_.size(); ++i) {
    const Eigen::Index dim = margins_[i].coefficient_count();
    if (multi[i] < 0 || multi[i] >= dim) {
      throw ValidationError(fmt::format(
          "multi-index entry {} out of range [0, {}) on margin {}", multi[i],
          dim, i));
    }
    flat += stride * multi[i];
    stride *= dim;
  }
  return flat;
}

std::vector<int> TensorBasis::multi_index(Eigen::Index flat) const {
  if (flat < 0 || flat >= cols()) {
    throw ValidationError(
        fmt::format("flat index {} out of range [0, {})", flat, cols()));
  }
  std::vector<int> multi(margins_.size());
  for (std::size_t i = 0; i < margins_.size(); ++i) {
    const Eigen::Index dim = margins_[i].coefficient_count();
    multi[i] = static_cast<int>(flat % dim);
    flat /= dim;
  }
  return multi;
}

Eigen::Index tensor_coefficient_count(std::span<const KnotSequence> margins) {
  Eigen::Index count = 1;
  for (const auto& m : margins) count *= m.coefficient_count();
  return count;
}

TensorBasis tensor_basis(const std::vector<std::vector<double>>& columns,
                         const std::vector<KnotSequence>& margins) {
  require_margin_count(margins.size());
  if (columns.size() != margins.size()) {
    throw ValidationError(fmt::format(
        "got {} coordinate columns for {} margins", columns.size(),
        margins.size()));
  }
  const std::size_t n = columns.front().size();
  for (const auto& col : columns) {
    if (col.size() != n) {
      throw ValidationError("coordinate columns must have equal length");
    }
  }
  if (n == 0) throw ValidationError("tensor basis needs at least one row");

  // Left-to-right fold; each step multiplies the accumulated block by the
  // next margin's basis, keeping earlier margins fastest-varying.
  Eigen::MatrixXd acc = basis_matrix(columns[0], margins[0]).values;
  for (std::size_t i = 1; i < margins.size(); ++i) {
    const Eigen::MatrixXd bi = basis_matrix(columns[i], margins[i]).values;
    Eigen::MatrixXd next(acc.rows(), acc.cols() * bi.cols());
    for (Eigen::Index q = 0; q < bi.cols(); ++q) {
      next.middleCols(q * acc.cols(), acc.cols()) =
          acc.array().colwise() * bi.col(q).array();
    }
    acc = std::move(next);
  }
  return TensorBasis(margins, std::move(acc));
}

Eigen::VectorXd tensor_row(std::span<const double> point,
                           std::span<const KnotSequence> margins) {
  require_margin_count(margins.size());
  if (point.size() != margins.size()) {
    throw ValidationError("point dimension must match the margin count");
  }
  Eigen::VectorXd acc = basis_row(point[0], margins[0]);
  for (std::size_t i = 1; i < margins.size(); ++i) {
    const Eigen::VectorXd bi = basis_row(point[i], margins[i]);
    Eigen::VectorXd next(acc.size() * bi.size());
    for (Eigen::Index q = 0; q < bi.size(); ++q) {
      next.segment(q * acc.size(), acc.size()) = bi[q] * acc;
    }
    acc = std::move(next);
  }
  return acc;
}

double tensor_eval(std::span<const double> point, const ControlNet& net) {
  require_net(net);
  return tensor_row(point, net.margins).dot(net.theta);
}

double tensor_eval_sum(std::span<const double> point, const ControlNet& net) {
  require_net(net);
  if (point.size() != net.margins.size()) {
    throw ValidationError("point dimension must match the margin count");
  }
  std::vector<Eigen::VectorXd> rows(net.margins.size());
  for (std::size_t i = 0; i < net.margins.size(); ++i) {
    rows[i] = basis_row(point[i], net.margins[i]);
  }
  const auto dims = margin_dims(net.margins);
  double sum = 0.0;
  Eigen::Index flat = 0;
  for_each_multi(dims, [&](std::span<const Eigen::Index> idx) {
    double prod = 1.0;
    for (std::size_t i = 0; i < idx.size(); ++i) prod *= rows[i][idx[i]];
    sum += prod * net.theta[flat];
    ++flat;
  });
  return sum;
}

Eigen::VectorXd conditional_ordinates(const ControlNet& net, int free_margin,
                                      std::span<const double> fixed) {
  require_net(net);
  const auto m = static_cast<int>(net.margins.size());
  if (free_margin < 0 || free_margin >= m) {
    throw ValidationError(fmt::format(
        "margin index {} out of range [0, {})", free_margin, m));
  }
  if (fixed.size() != static_cast<std::size_t>(m) - 1) {
    throw ValidationError(fmt::format(
        "expected {} conditioning values, got {}", m - 1, fixed.size()));
  }

  std::vector<Eigen::VectorXd> rows(static_cast<std::size_t>(m));
  std::vector<Eigen::Index> strides(static_cast<std::size_t>(m));
  Eigen::Index stride = 1;
  std::size_t fi = 0;
  for (int i = 0; i < m; ++i) {
    if (i != free_margin) {
      rows[static_cast<std::size_t>(i)] =
          basis_row(fixed[fi++], net.margins[static_cast<std::size_t>(i)]);
    }
    strides[static_cast<std::size_t>(i)] = stride;
    stride *= net.margins[static_cast<std::size_t>(i)].coefficient_count();
  }

  const Eigen::Index free_dim =
      net.margins[static_cast<std::size_t>(free_margin)].coefficient_count();
  const Eigen::Index free_stride =
      strides[static_cast<std::size_t>(free_margin)];

  std::vector<Eigen::Index> other_dims;
  std::vector<Eigen::Index> other_strides;
  std::vector<std::size_t> other_margins;
  for (int i = 0; i < m; ++i) {
    if (i == free_margin) continue;
    other_dims.push_back(
        net.margins[static_cast<std::size_t>(i)].coefficient_count());
    other_strides.push_back(strides[static_cast<std::size_t>(i)]);
    other_margins.push_back(static_cast<std::size_t>(i));
  }

  Eigen::VectorXd out = Eigen::VectorXd::Zero(free_dim);
  for_each_multi(other_dims, [&](std::span<const Eigen::Index> idx) {
    double weight = 1.0;
    Eigen::Index base = 0;
    for (std::size_t i = 0; i < idx.size(); ++i) {
      weight *= rows[other_margins[i]][idx[i]];
      base += other_strides[i] * idx[i];
    }
    if (weight == 0.0) return;
    for (Eigen::Index j = 0; j < free_dim; ++j) {
      out[j] += weight * net.theta[base + j * free_stride];
    }
  });
  return out;
}

double conditional_influence(const ControlNet& net, int margin,
                             int knot_index, std::span<const double> fixed) {
  const ControlPolygon slice(
      net.margins[static_cast<std::size_t>(margin)],
      conditional_ordinates(net, margin, fixed));
  return knot_influence_weight(slice, knot_index);
}

MarginGrid make_margin_grid(const std::vector<std::vector<double>>& columns,
                            int p) {
  if (p < 1) {
    throw ValidationError(fmt::format("grid size p must be >= 1, got {}", p));
  }
  MarginGrid grid;
  grid.p = p;
  grid.values.reserve(columns.size());
  for (const auto& col : columns) {
    if (col.empty()) throw ValidationError("margin column is empty");
    const auto [lo_it, hi_it] = std::minmax_element(col.begin(), col.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    if (!(lo < hi)) {
      throw ValidationError("margin data must span a positive range");
    }
    std::vector<double> u(static_cast<std::size_t>(p));
    for (int t = 1; t <= p; ++t) {
      u[static_cast<std::size_t>(t - 1)] =
          lo + static_cast<double>(t) / (p + 1) * (hi - lo);
    }
    grid.values.push_back(std::move(u));
  }
  return grid;
}

double marginal_influence(const ControlNet& net, int margin, int knot_index,
                          const MarginGrid& grid, std::size_t slice_budget) {
  require_net(net);
  const auto m = static_cast<int>(net.margins.size());
  if (margin < 0 || margin >= m) {
    throw ValidationError(
        fmt::format("margin index {} out of range [0, {})", margin, m));
  }
  if (grid.values.size() != static_cast<std::size_t>(m)) {
    throw ValidationError(fmt::format(
        "grid covers {} margins, expected {}", grid.values.size(), m));
  }

  std::vector<Eigen::Index> dims;
  std::vector<std::size_t> other;
  std::size_t slices = 1;
  for (int i = 0; i < m; ++i) {
    if (i == margin) continue;
    const auto& u = grid.values[static_cast<std::size_t>(i)];
    if (u.empty()) throw ValidationError("conditioning grid is empty");
    dims.push_back(static_cast<Eigen::Index>(u.size()));
    other.push_back(static_cast<std::size_t>(i));
    slices *= u.size();
  }
  if (slices > slice_budget) {
    throw ValidationError(fmt::format(
        "marginal influence would enumerate {} conditioning slices, above "
        "the budget of {}; lower the grid size or raise the budget",
        slices, slice_budget));
  }

  double best = 0.0;
  std::vector<double> fixed(other.size());
  for_each_multi(dims, [&](std::span<const Eigen::Index> idx) {
    for (std::size_t i = 0; i < idx.size(); ++i) {
      fixed[i] = grid.values[other[i]][static_cast<std::size_t>(idx[i])];
    }
    best = std::max(best,
                    conditional_influence(net, margin, knot_index, fixed));
  });
  return best;
}

Eigen::MatrixXd tensor_design_matrix(
    const Dataset& data, const std::vector<KnotSequence>& margins) {
  if (data.predictors().size() != margins.size()) {
    throw ValidationError(fmt::format(
        "dataset names {} predictors for {} margins",
        data.predictors().size(), margins.size()));
  }
  std::vector<std::vector<double>> columns;
  columns.reserve(margins.size());
  for (std::size_t i = 0; i < margins.size(); ++i) {
    columns.push_back(data.predictor_values(i));
  }
  const TensorBasis basis = tensor_basis(columns, margins);
  const Eigen::Index c = static_cast<Eigen::Index>(data.covariates().size());
  Eigen::MatrixXd design(basis.rows(), basis.cols() + c);
  design.leftCols(basis.cols()) = basis.values();
  for (Eigen::Index j = 0; j < c; ++j) {
    const auto& col = data.column(data.covariates()[static_cast<std::size_t>(j)]);
    design.col(basis.cols() + j) = Eigen::Map<const Eigen::VectorXd>(
        col.data(), static_cast<Eigen::Index>(col.size()));
  }
  return design;
}

ControlNet fit_control_net(const Dataset& data,
                           const std::vector<KnotSequence>& margins,
                           bool keep_fit, bool allow_big,
                           const Fitter& fitter) {
  const Eigen::Index coeffs = tensor_coefficient_count(margins);
  const auto n = static_cast<Eigen::Index>(data.rows());
  if (coeffs > n && !allow_big) {
    throw ValidationError(fmt::format(
        "tensor basis asks for {} regression coefficients but the data has "
        "only {} rows; a model this large is not identifiable and the solve "
        "cost grows cubically with the coefficient count. Pass the "
        "allow-big-tensor override to proceed anyway",
        coeffs, n));
  }

  const Eigen::MatrixXd x = tensor_design_matrix(data, margins);
  const auto& yv = data.response_values();
  const Eigen::Map<const Eigen::VectorXd> y(
      yv.data(), static_cast<Eigen::Index>(yv.size()));
  FitResult fit = fitter ? fitter(x, y) : fit_ols(x, y);

  FitStats stats;
  stats.rmse = fit.rmse;
  stats.loglik = fit.loglik;
  stats.coefficients = fit.coefficients;
  stats.vcov = std::move(fit.vcov);
  stats.covariate_count = static_cast<int>(data.covariates().size());
  if (keep_fit) stats.residuals = std::move(fit.residuals);

  return ControlNet{margins, fit.coefficients.head(coeffs),
                    std::move(stats)};
}

}  // namespace cpred
