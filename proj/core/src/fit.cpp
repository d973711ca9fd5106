#include "cpred/fit.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <numbers>

#include "cpred/basis.hpp"
#include "cpred/errors.hpp"

namespace cpred {

Eigen::Index matrix_rank(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
  const Eigen::VectorXd& sv = svd.singularValues();
  if (sv.size() == 0 || sv[0] == 0.0) return 0;
  const double tol = static_cast<double>(std::max(m.rows(), m.cols())) *
                     std::numeric_limits<double>::epsilon() * sv[0];
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv[i] > tol) ++rank;
  }
  return rank;
}

FitResult fit_ols(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                  bool check_rank) {
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();
  if (n != y.size()) {
    throw ValidationError(fmt::format(
        "design has {} rows but the response has {}", n, y.size()));
  }
  if (p == 0 || n < p) {
    throw RankError(fmt::format(
        "cannot fit {} coefficients with {} observations", p, n));
  }
  Eigen::Index rank = p;
  if (check_rank) {
    rank = matrix_rank(x);
    if (rank < p) {
      throw RankError(fmt::format(
          "design matrix is rank deficient: rank {} < {} columns", rank, p));
    }
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  FitResult out;
  out.rank = rank;
  out.coefficients = qr.solve(y);
  out.residuals = y - x * out.coefficients;
  const double rss = out.residuals.squaredNorm();
  out.rmse = std::sqrt(rss / static_cast<double>(n));

  // Profile Gaussian log-likelihood at the MLE variance rss/n.
  if (rss > 0.0) {
    out.loglik = -0.5 * static_cast<double>(n) *
                 (std::log(2.0 * std::numbers::pi) +
                  std::log(rss / static_cast<double>(n)) + 1.0);
  } else {
    out.loglik = std::numeric_limits<double>::infinity();
  }

  // vcov = sigma^2 (X'X)^-1 from the same factorization, with the unbiased
  // variance estimate rss/(n-p); zero matrix on a saturated fit.
  const Eigen::MatrixXd rmat = qr.matrixR()
                                   .topLeftCorner(p, p)
                                   .template triangularView<Eigen::Upper>();
  const Eigen::MatrixXd rinv =
      rmat.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(p, p));
  Eigen::MatrixXd xtx_inv = rinv * rinv.transpose();
  const auto& perm = qr.colsPermutation();
  xtx_inv = perm * xtx_inv * perm.transpose();
  const double sigma2 =
      n > p ? rss / static_cast<double>(n - p) : 0.0;
  out.vcov = sigma2 * xtx_inv;
  out.vcov = 0.5 * (out.vcov + out.vcov.transpose()).eval();
  return out;
}

Eigen::MatrixXd design_matrix(const Dataset& data, const KnotSequence& knots) {
  const BasisMatrix basis = basis_matrix(data.predictor_values(0), knots);
  const Eigen::Index n = basis.rows();
  const Eigen::Index c = static_cast<Eigen::Index>(data.covariates().size());
  Eigen::MatrixXd design(n, basis.cols() + c);
  design.leftCols(basis.cols()) = basis.values;
  for (Eigen::Index j = 0; j < c; ++j) {
    const auto& col = data.column(data.covariates()[static_cast<std::size_t>(j)]);
    design.col(basis.cols() + j) =
        Eigen::Map<const Eigen::VectorXd>(col.data(),
                                          static_cast<Eigen::Index>(col.size()));
  }
  return design;
}

ControlPolygon fit_control_polygon(const Dataset& data,
                                   const KnotSequence& knots, bool keep_fit,
                                   const Fitter& fitter) {
  const Eigen::MatrixXd x = design_matrix(data, knots);
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

  return ControlPolygon(knots, fit.coefficients.head(knots.coefficient_count()),
                        std::move(stats));
}

}  // namespace cpred
