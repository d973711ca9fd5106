#pragma once

#include <Eigen/Core>
#include <span>
#include <utility>
#include <vector>

namespace cpred {

/// A B-spline knot sequence of polynomial order k with k-fold boundary knots
/// at (a, b) and l interior knots. The full sequence has 2k + l entries and
/// spans a coefficient space of dimension k + l.
///
/// Interior knots may repeat (each repeat lowers the continuity at that
/// location); every index-based operation treats repeats as distinct entries.
class KnotSequence {
 public:
  /// Assembles the full sequence from order, boundary pair, and interior
  /// knots. The interior list is sorted on construction. Throws
  /// ValidationError for order < 1, non-finite values, a >= b, or interior
  /// knots outside the open interval (a, b).
  KnotSequence(int order, std::pair<double, double> boundary,
               std::vector<double> interior);

  int order() const { return order_; }
  double a() const { return boundary_.first; }
  double b() const { return boundary_.second; }
  std::pair<double, double> boundary() const { return boundary_; }
  const std::vector<double>& interior() const { return interior_; }
  const std::vector<double>& full() const { return full_; }

  /// l, the number of interior knots.
  int interior_count() const { return static_cast<int>(interior_.size()); }
  /// k + l, the dimension of the spanned spline space.
  int coefficient_count() const { return order_ + interior_count(); }

  /// Knot value at a 1-based index into the full sequence.
  double at(int full_index) const;
  /// True when the 1-based full-sequence index names an interior knot,
  /// i.e. k+1 <= index <= k+l.
  bool is_interior_index(int full_index) const;
  /// 1-based full-sequence indices of all interior knots, in order.
  std::vector<int> interior_indices() const;

  /// Copy with one extra interior knot at xi_prime (strictly inside (a, b)).
  KnotSequence with_inserted(double xi_prime) const;
  /// Copy with the interior knot at the given 1-based full-sequence index
  /// removed. Throws ValidationError for boundary or out-of-range indices.
  KnotSequence without(int full_index) const;

  friend bool operator==(const KnotSequence&, const KnotSequence&) = default;

 private:
  int order_;
  std::pair<double, double> boundary_;
  std::vector<double> interior_;
  std::vector<double> full_;
};

/// The local blending ratio of the de Boor recurrence: 0 for x at or left of
/// knot j, 1 for x at or right of knot j+k-1, and the linear ramp between.
/// When knots j and j+k-1 coincide the two constant branches apply (0 for
/// x <= knot j, else 1), so no 0/0 arises. j is a 1-based coefficient index
/// in [1, k+l].
double omega(double x, int j, const KnotSequence& knots);

/// Greville abscissae: entry j is the mean of the k-1 knots following
/// position j. Non-decreasing and anchored at the boundary knots. Requires
/// order >= 2; control polygons are not defined for order-1 splines.
Eigen::VectorXd greville_sites(const KnotSequence& knots);

/// Quantiles of the unique values of data after dropping the smallest and
/// largest unique value, with linear interpolation between order statistics
/// (the classical type-7 rule). Used to seed interior knots strictly inside
/// the data range. Requires at least 3 unique values and probs in (0, 1).
std::vector<double> trimmed_quantile(std::span<const double> data,
                                     std::span<const double> probs);

}  // namespace cpred
