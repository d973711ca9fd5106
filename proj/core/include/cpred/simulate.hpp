#pragma once

#include <Eigen/Core>
#include <cstdint>

#include "cpred/dataset.hpp"
#include "cpred/knots.hpp"

namespace cpred {

/// y = sin(x) + sigma * noise on n evenly spaced points over [-pi, pi].
/// Deterministic for a fixed seed; sigma = 0 draws no noise at all.
Dataset simulate_sine(int n, double sigma, std::uint64_t seed);

/// Noisy samples of an explicit spline on n evenly spaced points over its
/// boundary interval.
Dataset simulate_spline(const KnotSequence& knots, const Eigen::VectorXd& theta,
                        int n, double sigma, std::uint64_t seed);

/// A fixed hormone-profile-like shape on [-1, 1]: flat and low on the left
/// half, a steep rise just past zero, and a fall towards the right boundary.
Dataset simulate_hormone(int n, double sigma, std::uint64_t seed);

}  // namespace cpred
