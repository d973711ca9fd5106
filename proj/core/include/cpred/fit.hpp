#pragma once

#include <Eigen/Core>
#include <functional>

#include "cpred/control_polygon.hpp"
#include "cpred/dataset.hpp"
#include "cpred/knots.hpp"

namespace cpred {

/// Ordinary-least-squares output: coefficients minimizing ||y - Xc||, the
/// data rmse, the Gaussian profile log-likelihood, the coefficient
/// covariance sigma^2 (X'X)^-1, residuals, and the numerical rank used.
struct FitResult {
  Eigen::VectorXd coefficients;
  double rmse = 0.0;
  double loglik = 0.0;
  Eigen::MatrixXd vcov;
  Eigen::VectorXd residuals;
  Eigen::Index rank = 0;
};

/// The fitter contract: any regression backend mapping a design matrix and
/// response to a FitResult. The default backend is fit_ols; tests substitute
/// instrumented wrappers to count invocations.
using Fitter =
    std::function<FitResult(const Eigen::MatrixXd&, const Eigen::VectorXd&)>;

/// Numerical rank: the number of singular values above
/// max(rows, cols) * machine-epsilon * sigma_max.
Eigen::Index matrix_rank(const Eigen::MatrixXd& m);

/// Least squares via a column-pivoted QR factorization. With check_rank (the
/// default) a rank-deficient design raises RankError so callers can reject
/// the knot configuration that produced it.
FitResult fit_ols(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                  bool check_rank = true);

/// Basis columns for the (single) predictor followed by the covariate
/// columns verbatim. No intercept column: the basis is a partition of unity,
/// so a constant is already in its span.
Eigen::MatrixXd design_matrix(const Dataset& data, const KnotSequence& knots);

/// Fits the spline regression and wraps the basis coefficients as a control
/// polygon. Covariate coefficients are reported in the fit statistics but do
/// not contribute ordinates. With keep_fit the residual vector is retained;
/// otherwise only summary statistics are kept.
ControlPolygon fit_control_polygon(const Dataset& data,
                                   const KnotSequence& knots,
                                   bool keep_fit = false,
                                   const Fitter& fitter = {});

}  // namespace cpred
