#include "cpred/basis.hpp"

#include <algorithm>
#include <fmt/format.h>
#include <vector>

#include "cpred/errors.hpp"
#include "cpred/parallel.hpp"

namespace cpred {

namespace detail {

int find_span(double x, const KnotSequence& knots) {
  const auto& xi = knots.full();
  const int k = knots.order();
  const int last = knots.coefficient_count() - 1;  // k + l - 1
  auto it = std::upper_bound(xi.begin(), xi.end(), x);
  int span = static_cast<int>(it - xi.begin()) - 1;
  return std::clamp(span, k - 1, last);
}

void basis_nonzeros(double x, const KnotSequence& knots, int span,
                    double* values) {
  const auto& xi = knots.full();
  const int k = knots.order();
  // Triangular form of the de Boor recurrence over the located span. Every
  // denominator spans the nonzero-width interval [xi[span], xi[span+1]].
  std::vector<double> left(static_cast<std::size_t>(k));
  std::vector<double> right(static_cast<std::size_t>(k));
  values[0] = 1.0;
  for (int d = 1; d < k; ++d) {
    left[static_cast<std::size_t>(d)] =
        x - xi[static_cast<std::size_t>(span + 1 - d)];
    right[static_cast<std::size_t>(d)] =
        xi[static_cast<std::size_t>(span + d)] - x;
    double saved = 0.0;
    for (int r = 0; r < d; ++r) {
      const double denom = right[static_cast<std::size_t>(r + 1)] +
                           left[static_cast<std::size_t>(d - r)];
      const double tmp = values[r] / denom;
      values[r] = saved + right[static_cast<std::size_t>(r + 1)] * tmp;
      saved = left[static_cast<std::size_t>(d - r)] * tmp;
    }
    values[d] = saved;
  }
}

}  // namespace detail

namespace {

void require_in_support(double x, const KnotSequence& knots) {
  if (!(x >= knots.a() && x <= knots.b())) {
    throw ValidationError(
        fmt::format("x = {} is outside the spline support [{}, {}]", x,
                    knots.a(), knots.b()));
  }
}

}  // namespace

Eigen::VectorXd basis_row(double x, const KnotSequence& knots) {
  require_in_support(x, knots);
  Eigen::VectorXd row = Eigen::VectorXd::Zero(knots.coefficient_count());
  const int span = detail::find_span(x, knots);
  const int k = knots.order();
  std::vector<double> vals(static_cast<std::size_t>(k));
  detail::basis_nonzeros(x, knots, span, vals.data());
  for (int j = 0; j < k; ++j) row[span - k + 1 + j] = vals[static_cast<std::size_t>(j)];
  return row;
}

BasisMatrix basis_matrix(std::span<const double> xs,
                         const KnotSequence& knots) {
  if (xs.empty()) {
    throw ValidationError("basis_matrix requires a non-empty data vector");
  }
  for (double x : xs) require_in_support(x, knots);

  const int k = knots.order();
  const Eigen::Index n = static_cast<Eigen::Index>(xs.size());
  Eigen::MatrixXd values =
      Eigen::MatrixXd::Zero(n, knots.coefficient_count());
  parallel_for(xs.size(), [&](std::size_t i) {
    const double x = xs[i];
    const int span = detail::find_span(x, knots);
    double vals[32];
    std::vector<double> heap;
    double* v = vals;
    if (k > 32) {
      heap.resize(static_cast<std::size_t>(k));
      v = heap.data();
    }
    detail::basis_nonzeros(x, knots, span, v);
    for (int j = 0; j < k; ++j) {
      values(static_cast<Eigen::Index>(i), span - k + 1 + j) = v[j];
    }
  });

  const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
  return BasisMatrix{std::move(values), knots, greville_sites(knots), *lo,
                     *hi};
}

double eval_spline(double x, const KnotSequence& knots,
                   const Eigen::VectorXd& theta) {
  if (theta.size() != knots.coefficient_count()) {
    throw ValidationError(fmt::format(
        "coefficient vector has {} entries, expected {}", theta.size(),
        knots.coefficient_count()));
  }
  require_in_support(x, knots);
  const int span = detail::find_span(x, knots);
  const int k = knots.order();
  double vals[32];
  std::vector<double> heap;
  double* v = vals;
  if (k > 32) {
    heap.resize(static_cast<std::size_t>(k));
    v = heap.data();
  }
  detail::basis_nonzeros(x, knots, span, v);
  double sum = 0.0;
  for (int j = 0; j < k; ++j) sum += v[j] * theta[span - k + 1 + j];
  return sum;
}

}  // namespace cpred
