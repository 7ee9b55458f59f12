// Binned marginal densities on [0,2π) and [0,2π)², and metrics comparing them
// against reference densities. Densities are normalized against dθ/(2π).

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "swarmkin/torus.hpp"

namespace swarmkin {

/// floor(θ·n_bins/2π), clamped to the last bin.
int bin_index(Phase theta, int n_bins);

/// Center of bin b on an n_bins grid.
double bin_center(int bin, int n_bins);

class Histogram1D {
 public:
  explicit Histogram1D(int n_bins = 64);

  void accumulate(Phase theta);
  void merge(const Histogram1D& other);

  int n_bins() const { return n_bins_; }
  std::uint64_t total() const { return total_; }
  std::span<const std::uint64_t> counts() const { return counts_; }

  /// counts_b · n_bins / total. Throws std::logic_error when empty.
  std::vector<double> density() const;

 private:
  int n_bins_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t total_ = 0;
};

/// Row-major counts: index = bin(θ1)·n_bins + bin(θ2).
class Histogram2D {
 public:
  explicit Histogram2D(int n_bins = 64);

  void accumulate(Phase theta1, Phase theta2);
  /// Adds both (θ1,θ2) and (θ2,θ1).
  void accumulate_symmetric(Phase theta1, Phase theta2);
  void merge(const Histogram2D& other);

  int n_bins() const { return n_bins_; }
  std::uint64_t total() const { return total_; }
  std::span<const std::uint64_t> counts() const { return counts_; }

  /// counts · n_bins² / total. Throws std::logic_error when empty.
  std::vector<double> density() const;

 private:
  int n_bins_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t total_ = 0;
};

struct ComparisonMetrics {
  double l1 = 0.0;    // Σ|e − r| · bin measure
  double linf = 0.0;  // max |e − r|
  double chi2 = 0.0;  // Σ (c − E)²/E over bins with E > 0; NaN without raw counts
  int dof = 0;        // bins with E > 0, minus one
};

/// l1 and linf between two densities on the same grid (1D when size = n, 2D
/// when size = n²; the bin measure is 1/size). chi2 is NaN.
ComparisonMetrics compare_densities(std::span<const double> empirical,
                                    std::span<const double> reference);

/// Empirical histogram against a reference density sampled per bin. chi2 uses
/// the raw counts against expected counts reference_b · total / size.
ComparisonMetrics compare(const Histogram1D& empirical, std::span<const double> reference);
ComparisonMetrics compare(const Histogram2D& empirical, std::span<const double> reference);

/// Upper critical value of the χ² distribution: P(X > x) = 1 − level.
double chi2_critical(int dof, double level);

/// Circular standard deviation √(−2 ln R) of θ1 − θ2 under a 2D density on an
/// n×n grid, with R the resultant length evaluated at bin centers.
double circular_std_of_difference(std::span<const double> density2d, int n_bins);

}  // namespace swarmkin
