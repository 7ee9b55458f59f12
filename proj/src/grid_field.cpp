#include "swarmkin/grid_field.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace swarmkin {

GridField::GridField(int dims_, int n_points_, double fill) : dims(dims_), n_points(n_points_) {
  if (dims < 1 || dims > 3) throw std::invalid_argument("GridField: dims must be 1, 2 or 3");
  if (n_points < 1) throw std::invalid_argument("GridField: n_points must be >= 1");
  std::size_t total = 1;
  for (int d = 0; d < dims; ++d) total *= static_cast<std::size_t>(n_points);
  values.assign(total, fill);
}

double GridField::mean() const {
  double s = 0.0;
  for (const double v : values) s += v;
  return s / static_cast<double>(values.size());
}

double GridField::max_abs() const {
  double m = 0.0;
  for (const double v : values) m = std::max(m, std::abs(v));
  return m;
}

void write_grid_csv(std::ostream& os, const GridField& field) {
  os << "n_points,dims\n" << field.n_points << ',' << field.dims << '\n';
  os.precision(17);
  const auto row = static_cast<std::size_t>(field.n_points);
  for (std::size_t start = 0; start < field.values.size(); start += row) {
    for (std::size_t m = 0; m < row; ++m) {
      if (m) os << ',';
      os << field.values[start + m];
    }
    os << '\n';
  }
}

}  // namespace swarmkin
