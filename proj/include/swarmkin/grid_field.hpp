#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "swarmkin/torus.hpp"

namespace swarmkin {

/// Scalar field on a uniform periodic grid over [0,2π)^dims, row-major with the
/// last axis fastest. Node m sits at θ = 2πm/n_points.
struct GridField {
  int dims = 1;
  int n_points = 0;
  std::vector<double> values;

  GridField() = default;
  GridField(int dims_, int n_points_, double fill = 0.0);

  std::size_t size() const { return values.size(); }
  double node(int m) const { return kTwoPi * m / n_points; }

  /// Periodic trapezoid mean, i.e. ∫ f (dθ/2π)^dims.
  double mean() const;
  double max_abs() const;

  double& operator()(int i) { return values[static_cast<std::size_t>(i)]; }
  double operator()(int i) const { return values[static_cast<std::size_t>(i)]; }
  double& operator()(int i, int j) { return values[static_cast<std::size_t>(i) * n_points + j]; }
  double operator()(int i, int j) const { return values[static_cast<std::size_t>(i) * n_points + j]; }
};

/// "n_points,dims" header, the two values, then one row per line of the last
/// axis.
void write_grid_csv(std::ostream& os, const GridField& field);

}  // namespace swarmkin
