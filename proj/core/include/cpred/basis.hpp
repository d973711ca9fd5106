#pragma once

#include <Eigen/Core>
#include <span>

#include "cpred/knots.hpp"

namespace cpred {

/// Evaluation of a B-spline basis over a data vector. Rows are evaluation
/// points, columns the k + l basis functions. Every row is a convex-weight
/// vector: entries in [0, 1], at most k nonzero, summing to one.
struct BasisMatrix {
  Eigen::MatrixXd values;
  KnotSequence knots;
  Eigen::VectorXd greville;
  double x_min = 0.0;
  double x_max = 0.0;

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }
};

/// One basis row at x via the de Boor recurrence, restricted to the k
/// possibly-nonzero columns located by binary search. x must lie in [a, b];
/// there is no extrapolation. The last knot interval is treated as closed so
/// that the row at x = b is the last unit vector.
Eigen::VectorXd basis_row(double x, const KnotSequence& knots);

/// Rows of basis_row over xs (order preserved, xs need not be sorted).
/// Rows are computed independently and may be filled by several threads;
/// the result is bit-identical for any thread count.
BasisMatrix basis_matrix(std::span<const double> xs, const KnotSequence& knots);

/// Spline value at x for coefficients theta (|theta| = k + l).
double eval_spline(double x, const KnotSequence& knots,
                   const Eigen::VectorXd& theta);

namespace detail {

/// 0-based index mu into the full sequence with full[mu] <= x < full[mu+1],
/// clamped to the nonzero-width spans; x = b maps to the last span.
int find_span(double x, const KnotSequence& knots);

/// The k nonzero basis values at x for coefficient indices
/// span-k+1 .. span (0-based), written into values[0..k-1].
void basis_nonzeros(double x, const KnotSequence& knots, int span,
                    double* values);

}  // namespace detail

}  // namespace cpred
