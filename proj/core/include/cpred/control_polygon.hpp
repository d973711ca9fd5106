#pragma once

#include <Eigen/Core>
#include <optional>
#include <span>
#include <vector>

#include "cpred/knots.hpp"

namespace cpred {

/// Summary statistics of the regression fit behind a control polygon or
/// control net. rmse and loglik are always present; vcov holds the
/// coefficient covariance and residuals is only retained when a fit was run
/// with keep_fit enabled.
struct FitStats {
  double rmse = 0.0;
  double loglik = 0.0;
  Eigen::VectorXd coefficients;  // basis ordinates followed by covariate betas
  Eigen::MatrixXd vcov;
  Eigen::VectorXd residuals;  // empty unless keep_fit
  int covariate_count = 0;
};

/// The control polygon of a spline: vertices (greville abscissa, ordinate),
/// one per basis function. A piecewise-linear strong convex hull of the
/// spline it controls.
class ControlPolygon {
 public:
  ControlPolygon(KnotSequence knots, Eigen::VectorXd ordinates,
                 std::optional<FitStats> fit = std::nullopt);

  const KnotSequence& knots() const { return knots_; }
  const Eigen::VectorXd& ordinates() const { return ordinates_; }
  const Eigen::VectorXd& abscissae() const { return abscissae_; }
  const std::optional<FitStats>& fit() const { return fit_; }

  /// Spline value at x.
  double eval(double x) const;

 private:
  KnotSequence knots_;
  Eigen::VectorXd ordinates_;
  Eigen::VectorXd abscissae_;
  std::optional<FitStats> fit_;
};

/// The lower bi-diagonal refinement matrix mapping coefficients on
/// source_knots to coefficients on source_knots + {inserted_at}. Rows are
/// convex pairs, the first and last rows are unit vectors, and the matrix
/// has full column rank.
struct InsertionMatrix {
  Eigen::MatrixXd entries;  // (|theta|+1) x |theta|
  KnotSequence source_knots;
  double inserted_at;
};

/// Builds the refinement matrix for inserting xi_prime, which must lie
/// strictly inside the boundary interval.
InsertionMatrix insertion_matrix(const KnotSequence& knots, double xi_prime);

/// Boehm refinement: returns the polygon on knots + {xi_prime} whose spline
/// is pointwise identical to cp's. Fit statistics do not carry over.
ControlPolygon insert_knot(const ControlPolygon& cp, double xi_prime);

/// Least-squares coefficients on the coarsened sequence (interior knot at
/// 1-based full-sequence index removed), solved by an orthogonal
/// factorization of the bi-diagonal refinement matrix.
Eigen::VectorXd coarsened_ordinates(const ControlPolygon& cp, int full_index);

/// Orthogonal projection of cp's ordinates onto the column space of the
/// refinement matrix: the ordinates after removing and re-inserting the knot.
Eigen::VectorXd reinserted_ordinates(const ControlPolygon& cp, int full_index);

/// Euclidean distance between cp's ordinates and their projection onto the
/// knot-deleted coefficient space: the influence weight of the interior knot
/// at the given 1-based full-sequence index. Always >= 0; zero exactly when
/// the knot is redundant.
double knot_influence_weight(const ControlPolygon& cp, int full_index);

/// One scored interior knot. index is 1-based into the full knot sequence
/// (for order k the first interior knot has index k+1); rank 1 marks the
/// least influential knot, ties broken by ascending index.
struct InfluenceEntry {
  int index;
  double knot;
  double weight;
  int rank;
};

/// Influence weights for a set of interior knots, with the coarsened and
/// reinserted polygons retained for diagnostic overlays. Entries are ordered
/// by index; coarsened[i] / reinserted[i] belong to entries[i].
struct InfluenceReport {
  std::vector<InfluenceEntry> entries;
  ControlPolygon original;
  std::vector<ControlPolygon> coarsened;
  std::vector<ControlPolygon> reinserted;
};

/// Scores interior knots by influence weight. With an empty index list all
/// interior knots are scored; a polygon without interior knots yields an
/// empty report. Indices must name interior knots of cp's sequence.
InfluenceReport influence_of(const ControlPolygon& cp,
                             std::span<const int> indices = {});

}  // namespace cpred
