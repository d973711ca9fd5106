#include "cpred/control_polygon.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <numeric>

#include "cpred/basis.hpp"
#include "cpred/errors.hpp"

namespace cpred {

namespace {

struct BidiagonalLs {
  Eigen::VectorXd solution;
  double residual_norm;
};

// Least squares for the (c+1) x c lower bi-diagonal refinement matrix via
// Givens rotations: O(c) work, no normal equations. The rotated rhs carries
// the residual norm in its last entry.
BidiagonalLs solve_bidiagonal_ls(const InsertionMatrix& w,
                                 const Eigen::VectorXd& rhs) {
  const Eigen::Index c = w.entries.cols();
  Eigen::VectorXd diag(c), sub(c);
  for (Eigen::Index j = 0; j < c; ++j) {
    diag[j] = w.entries(j, j);
    sub[j] = w.entries(j + 1, j);
  }

  Eigen::VectorXd q = rhs;
  Eigen::VectorXd rdiag(c), rsup(c);
  for (Eigen::Index j = 0; j < c; ++j) {
    const double alpha = diag[j];
    const double beta = sub[j];
    const double r = std::hypot(alpha, beta);
    if (r == 0.0) {
      throw RankError(fmt::format(
          "refinement matrix column {} is numerically dependent", j + 1));
    }
    const double cth = alpha / r;
    const double sth = beta / r;
    rdiag[j] = r;
    if (j + 1 < c) {
      // Column j+1 has entries only in rows j+1 and j+2; the rotation of
      // rows (j, j+1) creates the single superdiagonal fill-in.
      rsup[j] = sth * diag[j + 1];
      diag[j + 1] = cth * diag[j + 1];
    }
    const double qj = q[j];
    q[j] = cth * qj + sth * q[j + 1];
    q[j + 1] = -sth * qj + cth * q[j + 1];
  }

  Eigen::VectorXd t(c);
  t[c - 1] = q[c - 1] / rdiag[c - 1];
  for (Eigen::Index j = c - 2; j >= 0; --j) {
    t[j] = (q[j] - rsup[j] * t[j + 1]) / rdiag[j];
  }
  return BidiagonalLs{std::move(t), std::abs(q[c])};
}

InsertionMatrix coarsening_matrix(const ControlPolygon& cp, int full_index) {
  const KnotSequence& knots = cp.knots();
  if (!knots.is_interior_index(full_index)) {
    throw ValidationError(fmt::format(
        "index {} does not name an interior knot (valid range [{}, {}])",
        full_index, knots.order() + 1,
        knots.order() + knots.interior_count()));
  }
  const double value = knots.at(full_index);
  return insertion_matrix(knots.without(full_index), value);
}

}  // namespace

ControlPolygon::ControlPolygon(KnotSequence knots, Eigen::VectorXd ordinates,
                               std::optional<FitStats> fit)
    : knots_(std::move(knots)),
      ordinates_(std::move(ordinates)),
      abscissae_(greville_sites(knots_)),
      fit_(std::move(fit)) {
  if (ordinates_.size() != knots_.coefficient_count()) {
    throw ValidationError(fmt::format(
        "control polygon needs {} ordinates for this knot sequence, got {}",
        knots_.coefficient_count(), ordinates_.size()));
  }
  for (Eigen::Index i = 0; i < ordinates_.size(); ++i) {
    if (!std::isfinite(ordinates_[i])) {
      throw ValidationError("control polygon ordinates must be finite");
    }
  }
}

double ControlPolygon::eval(double x) const {
  return eval_spline(x, knots_, ordinates_);
}

InsertionMatrix insertion_matrix(const KnotSequence& knots, double xi_prime) {
  if (!std::isfinite(xi_prime) ||
      !(knots.a() < xi_prime && xi_prime < knots.b())) {
    throw ValidationError(fmt::format(
        "insertion point {} must lie strictly inside ({}, {})", xi_prime,
        knots.a(), knots.b()));
  }
  const int m = knots.coefficient_count();
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(m + 1, m);
  w(0, 0) = 1.0;
  w(m, m - 1) = 1.0;
  for (int i = 2; i <= m; ++i) {
    const double om = omega(xi_prime, i, knots);
    w(i - 1, i - 2) = 1.0 - om;
    w(i - 1, i - 1) = om;
  }
  return InsertionMatrix{std::move(w), knots, xi_prime};
}

ControlPolygon insert_knot(const ControlPolygon& cp, double xi_prime) {
  const InsertionMatrix w = insertion_matrix(cp.knots(), xi_prime);
  return ControlPolygon(cp.knots().with_inserted(xi_prime),
                        w.entries * cp.ordinates());
}

Eigen::VectorXd coarsened_ordinates(const ControlPolygon& cp, int full_index) {
  const InsertionMatrix w = coarsening_matrix(cp, full_index);
  return solve_bidiagonal_ls(w, cp.ordinates()).solution;
}

Eigen::VectorXd reinserted_ordinates(const ControlPolygon& cp,
                                     int full_index) {
  const InsertionMatrix w = coarsening_matrix(cp, full_index);
  return w.entries * solve_bidiagonal_ls(w, cp.ordinates()).solution;
}

double knot_influence_weight(const ControlPolygon& cp, int full_index) {
  const InsertionMatrix w = coarsening_matrix(cp, full_index);
  return solve_bidiagonal_ls(w, cp.ordinates()).residual_norm;
}

InfluenceReport influence_of(const ControlPolygon& cp,
                             std::span<const int> indices) {
  std::vector<int> idx(indices.begin(), indices.end());
  if (idx.empty()) {
    idx = cp.knots().interior_indices();
  } else {
    std::sort(idx.begin(), idx.end());
    for (int j : idx) {
      if (!cp.knots().is_interior_index(j)) {
        throw ValidationError(fmt::format(
            "index {} does not name an interior knot of the sequence", j));
      }
    }
  }

  InfluenceReport report{{}, cp, {}, {}};
  report.entries.reserve(idx.size());
  report.coarsened.reserve(idx.size());
  report.reinserted.reserve(idx.size());
  for (int j : idx) {
    const InsertionMatrix w = coarsening_matrix(cp, j);
    const BidiagonalLs ls = solve_bidiagonal_ls(w, cp.ordinates());
    report.entries.push_back(
        InfluenceEntry{j, cp.knots().at(j), ls.residual_norm, 0});
    report.coarsened.emplace_back(w.source_knots, ls.solution);
    report.reinserted.emplace_back(cp.knots(), w.entries * ls.solution);
  }

  // Rank 1 = least influential; equal weights resolve to the smaller index.
  std::vector<std::size_t> order(report.entries.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& ea = report.entries[a];
    const auto& eb = report.entries[b];
    if (ea.weight != eb.weight) return ea.weight < eb.weight;
    return ea.index < eb.index;
  });
  for (std::size_t r = 0; r < order.size(); ++r) {
    report.entries[order[r]].rank = static_cast<int>(r) + 1;
  }
  return report;
}

}  // namespace cpred
