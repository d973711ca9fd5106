#include "cpred/knots.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "cpred/errors.hpp"

namespace cpred {

KnotSequence::KnotSequence(int order, std::pair<double, double> boundary,
                           std::vector<double> interior)
    : order_(order), boundary_(boundary), interior_(std::move(interior)) {
  if (order_ < 1) {
    throw ValidationError(fmt::format("order must be >= 1, got {}", order_));
  }
  if (!std::isfinite(boundary_.first) || !std::isfinite(boundary_.second)) {
    throw ValidationError("boundary knots must be finite");
  }
  if (!(boundary_.first < boundary_.second)) {
    throw ValidationError(
        fmt::format("boundary knots must satisfy a < b, got ({}, {})",
                    boundary_.first, boundary_.second));
  }
  for (double v : interior_) {
    if (!std::isfinite(v)) {
      throw ValidationError("interior knots must be finite");
    }
    if (!(boundary_.first < v && v < boundary_.second)) {
      throw ValidationError(fmt::format(
          "interior knot {} is outside the open boundary interval ({}, {})",
          v, boundary_.first, boundary_.second));
    }
  }
  std::sort(interior_.begin(), interior_.end());

  full_.reserve(2 * static_cast<std::size_t>(order_) + interior_.size());
  full_.insert(full_.end(), order_, boundary_.first);
  full_.insert(full_.end(), interior_.begin(), interior_.end());
  full_.insert(full_.end(), order_, boundary_.second);
}

double KnotSequence::at(int full_index) const {
  if (full_index < 1 || full_index > static_cast<int>(full_.size())) {
    throw ValidationError(
        fmt::format("knot index {} out of range [1, {}]", full_index,
                    full_.size()));
  }
  return full_[static_cast<std::size_t>(full_index - 1)];
}

bool KnotSequence::is_interior_index(int full_index) const {
  return full_index >= order_ + 1 && full_index <= order_ + interior_count();
}

std::vector<int> KnotSequence::interior_indices() const {
  std::vector<int> idx(static_cast<std::size_t>(interior_count()));
  for (int p = 0; p < interior_count(); ++p) idx[p] = order_ + 1 + p;
  return idx;
}

KnotSequence KnotSequence::with_inserted(double xi_prime) const {
  if (!std::isfinite(xi_prime) ||
      !(boundary_.first < xi_prime && xi_prime < boundary_.second)) {
    throw ValidationError(fmt::format(
        "inserted knot {} must lie strictly inside ({}, {})", xi_prime,
        boundary_.first, boundary_.second));
  }
  std::vector<double> interior = interior_;
  interior.insert(
      std::upper_bound(interior.begin(), interior.end(), xi_prime), xi_prime);
  return KnotSequence(order_, boundary_, std::move(interior));
}

KnotSequence KnotSequence::without(int full_index) const {
  if (!is_interior_index(full_index)) {
    throw ValidationError(fmt::format(
        "index {} does not name an interior knot (valid range [{}, {}])",
        full_index, order_ + 1, order_ + interior_count()));
  }
  std::vector<double> interior = interior_;
  interior.erase(interior.begin() + (full_index - order_ - 1));
  return KnotSequence(order_, boundary_, std::move(interior));
}

double omega(double x, int j, const KnotSequence& knots) {
  if (j < 1 || j > knots.coefficient_count()) {
    throw ValidationError(fmt::format("omega index {} out of range [1, {}]",
                                      j, knots.coefficient_count()));
  }
  const auto& xi = knots.full();
  const double lo = xi[static_cast<std::size_t>(j - 1)];
  const double hi = xi[static_cast<std::size_t>(j + knots.order() - 2)];
  if (lo == hi) return x <= lo ? 0.0 : 1.0;
  if (x <= lo) return 0.0;
  if (x >= hi) return 1.0;
  return (x - lo) / (hi - lo);
}

Eigen::VectorXd greville_sites(const KnotSequence& knots) {
  const int k = knots.order();
  if (k < 2) {
    throw ValidationError(
        "greville sites require order >= 2; a control polygon is not "
        "defined for order-1 splines");
  }
  const auto& xi = knots.full();
  Eigen::VectorXd sites(knots.coefficient_count());
  for (int j = 0; j < knots.coefficient_count(); ++j) {
    double sum = 0.0;
    for (int i = 1; i <= k - 1; ++i) sum += xi[static_cast<std::size_t>(j + i)];
    sites[j] = sum / (k - 1);
  }
  return sites;
}

std::vector<double> trimmed_quantile(std::span<const double> data,
                                     std::span<const double> probs) {
  for (double p : probs) {
    if (!(p > 0.0 && p < 1.0)) {
      throw ValidationError(
          fmt::format("quantile probability {} must lie in (0, 1)", p));
    }
  }
  std::vector<double> uniq(data.begin(), data.end());
  for (double v : uniq) {
    if (!std::isfinite(v)) throw ValidationError("data must be finite");
  }
  std::sort(uniq.begin(), uniq.end());
  uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
  if (uniq.size() < 3) {
    throw ValidationError(fmt::format(
        "trimmed_quantile needs at least 3 unique values, got {}",
        uniq.size()));
  }
  // Drop the extreme unique values, then interpolate order statistics.
  const std::size_t m = uniq.size() - 2;
  const double* v = uniq.data() + 1;

  std::vector<double> out;
  out.reserve(probs.size());
  for (double p : probs) {
    const double h = p * static_cast<double>(m - 1);
    const auto lo = static_cast<std::size_t>(h);
    if (lo + 1 >= m) {
      out.push_back(v[m - 1]);
    } else {
      const double frac = h - static_cast<double>(lo);
      out.push_back(v[lo] + frac * (v[lo + 1] - v[lo]));
    }
  }
  return out;
}

}  // namespace cpred
