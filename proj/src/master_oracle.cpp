#include "swarmkin/master_oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace swarmkin {

namespace {

void require_particles(const MasterField& f, int lo, int hi, const char* what) {
  if (f.n_particles() < lo || f.n_particles() > hi)
    throw std::invalid_argument(std::string(what) + ": unsupported number of particles");
}

// Coordinates of a flat index (last axis fastest).
std::array<int, 3> coords(std::size_t flat, int dims, int g) {
  std::array<int, 3> x{};
  for (int d = dims - 1; d >= 0; --d) {
    x[static_cast<std::size_t>(d)] = static_cast<int>(flat % static_cast<std::size_t>(g));
    flat /= static_cast<std::size_t>(g);
  }
  return x;
}

std::size_t flat_of(const std::array<int, 3>& x, int dims, int g) {
  std::size_t flat = 0;
  for (int d = 0; d < dims; ++d) flat = flat * static_cast<std::size_t>(g) + static_cast<std::size_t>(x[static_cast<std::size_t>(d)]);
  return flat;
}

// Flat index over the dims−1 axes that remain once `axis` is removed.
std::size_t flat_without(const std::array<int, 3>& x, int dims, int g, int axis) {
  std::size_t flat = 0;
  for (int d = 0; d < dims; ++d) {
    if (d == axis) continue;
    flat = flat * static_cast<std::size_t>(g) + static_cast<std::size_t>(x[static_cast<std::size_t>(d)]);
  }
  return flat;
}

std::vector<double> mean_over_axis(const GridField& f, int axis) {
  const int g = f.n_points;
  std::size_t out_size = 1;
  for (int d = 1; d < f.dims; ++d) out_size *= static_cast<std::size_t>(g);
  std::vector<double> out(out_size, 0.0);
  for (std::size_t flat = 0; flat < f.values.size(); ++flat) {
    out[flat_without(coords(flat, f.dims, g), f.dims, g, axis)] += f.values[flat];
  }
  for (double& v : out) v /= g;
  return out;
}

// Noise between grid nodes a and b, i.e. g((a − b)·2π/G).
double noise_between(const HalfStepTable& g, int a, int b) { return g.at(2L * (a - b)); }

// Midpoint half-step indices and bias half-step of the pre-collision cell (a, b).
struct CellGeometry {
  int n_mid = 1;
  std::array<long, 2> mid{};
  double weight = 1.0;
  long z = 0;
};

CellGeometry cell_geometry(int a, int b, int g) {
  const int d = ((b - a) % g + g) % g;
  CellGeometry c;
  if (g % 2 == 0 && d == g / 2) {
    c.n_mid = 2;
    c.weight = 0.5;
    c.mid = {(2L * a + d) % (2L * g), (2L * a + d + g) % (2L * g)};
    c.z = g / 2;
  } else if (2 * d < g) {
    c.mid[0] = (2L * a + d) % (2L * g);
    c.z = -d;
  } else {
    c.mid[0] = (2L * a + d + g) % (2L * g);
    c.z = g - d;
  }
  return c;
}

}  // namespace

// ---------------------------------------------------------------------------

MasterField::MasterField(int n_particles, int n_points, double fill) : field(n_particles, n_points, fill) {
  if (n_particles < 2 || n_particles > 3) throw std::invalid_argument("MasterField: N must be 2 or 3");
}

MasterField::MasterField(GridField f) : field(std::move(f)) {
  if (field.dims < 2 || field.dims > 3) throw std::invalid_argument("MasterField: N must be 2 or 3");
}

void MasterField::symmetrize() {
  const int n = n_particles();
  const int g = n_points();
  std::vector<double> out(field.values.size(), 0.0);
  std::array<int, 3> perm{0, 1, 2};
  int count = 0;
  do {
    for (std::size_t flat = 0; flat < out.size(); ++flat) {
      const auto x = coords(flat, n, g);
      std::array<int, 3> y{};
      for (int d = 0; d < n; ++d) y[static_cast<std::size_t>(d)] = x[static_cast<std::size_t>(perm[static_cast<std::size_t>(d)])];
      out[flat] += field.values[flat_of(y, n, g)];
    }
    ++count;
  } while (std::next_permutation(perm.begin(), perm.begin() + n));
  for (double& v : out) v /= count;
  field.values = std::move(out);
}

void MasterField::normalize() {
  const double m = mean();
  if (!(m > 0.0)) throw std::runtime_error("MasterField: cannot normalize a field with mean <= 0");
  for (double& v : field.values) v /= m;
}

bool MasterField::is_symmetric(double tol) const {
  MasterField s = *this;
  s.symmetrize();
  for (std::size_t i = 0; i < field.values.size(); ++i)
    if (std::abs(s.field.values[i] - field.values[i]) > tol) return false;
  return true;
}

HalfStepTable tabulate_half_steps(const std::function<double(double)>& f, int n_points) {
  if (n_points < 2) throw std::invalid_argument("tabulate_half_steps: n_points must be >= 2");
  HalfStepTable t{n_points, std::vector<double>(static_cast<std::size_t>(2 * n_points))};
  for (int s = 0; s < 2 * n_points; ++s)
    t.values[static_cast<std::size_t>(s)] = f(wrap_signed(std::numbers::pi * s / n_points));
  return t;
}

HalfStepTable tabulate_noise(const std::function<double(double)>& g, int n_points) {
  HalfStepTable t = tabulate_half_steps(g, n_points);
  for (int parity = 0; parity < 2; ++parity) {
    double sum = 0.0;
    for (int s = parity; s < 2 * n_points; s += 2) sum += t.values[static_cast<std::size_t>(s)];
    const double mean = sum / n_points;
    if (!(mean > 0.0)) throw std::invalid_argument("tabulate_noise: kernel has no mass on the grid");
    for (int s = parity; s < 2 * n_points; s += 2) t.values[static_cast<std::size_t>(s)] /= mean;
  }
  return t;
}

MasterOperator make_master_operator(const DynamicsConfig& cfg, int n_points) {
  MasterOperator op;
  op.kind = cfg.kind;
  const NoiseModel noise = cfg.noise;
  op.noise = tabulate_noise([&](double t) { return noise.density(t); }, n_points);
  if (cfg.kind == DynamicsKind::BiasedBDG) {
    const BiasModel bias = *cfg.bias;
    op.bias = tabulate_half_steps([&](double t) { return bias.acceptance(t); }, n_points);
  } else {
    op.bias = tabulate_half_steps([](double) { return 1.0; }, n_points);
  }
  return op;
}

// ---------------------------------------------------------------------------
// CL

MasterField cl_master_rhs(const MasterField& f, const HalfStepTable& g) {
  require_particles(f, 2, 3, "cl_master_rhs");
  const int n = f.n_particles();
  const int G = f.n_points();
  std::array<std::vector<double>, 3> without;
  for (int a = 0; a < n; ++a) without[static_cast<std::size_t>(a)] = mean_over_axis(f.field, a);
  const double pref = 2.0 / (n - 1);
  MasterField out(n, G, 0.0);
  const auto total = static_cast<long>(f.field.values.size());
#pragma omp parallel for schedule(static)
  for (long flat = 0; flat < total; ++flat) {
    const auto x = coords(static_cast<std::size_t>(flat), n, G);
    const double fx = f.field.values[static_cast<std::size_t>(flat)];
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const double gij = noise_between(g, x[static_cast<std::size_t>(i)], x[static_cast<std::size_t>(j)]);
        const double mj = without[static_cast<std::size_t>(j)][flat_without(x, n, G, j)];
        const double mi = without[static_cast<std::size_t>(i)][flat_without(x, n, G, i)];
        acc += 0.5 * gij * (mj + mi) - fx;
      }
    }
    out.field.values[static_cast<std::size_t>(flat)] = pref * acc;
  }
  return out;
}

MasterField cl_master_rhs_serial(const MasterField& f, const HalfStepTable& g) {
  require_particles(f, 2, 3, "cl_master_rhs");
  const int n = f.n_particles();
  const int G = f.n_points();
  MasterField out(n, G, 0.0);
  for (std::size_t flat = 0; flat < f.field.values.size(); ++flat) {
    const auto x = coords(flat, n, G);
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        // [F] with axis j integrated out, then with axis i integrated out
        double mj = 0.0, mi = 0.0;
        auto y = x;
        for (int m = 0; m < G; ++m) {
          y = x;
          y[static_cast<std::size_t>(j)] = m;
          mj += f.field.values[flat_of(y, n, G)];
          y = x;
          y[static_cast<std::size_t>(i)] = m;
          mi += f.field.values[flat_of(y, n, G)];
        }
        const double gij = g.at(2L * (x[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(j)]));
        acc += 0.5 * gij * (mj + mi) / G - f.field.values[flat];
      }
    }
    out.field.values[flat] = 2.0 / (n - 1) * acc;
  }
  return out;
}

// ---------------------------------------------------------------------------
// BDG, N = 2

namespace {

std::vector<double> bdg_midpoint_weights(const MasterField& f, const HalfStepTable& h) {
  const int G = f.n_points();
  std::vector<double> w(static_cast<std::size_t>(2 * G), 0.0);
  for (int a = 0; a < G; ++a) {
    for (int b = 0; b < G; ++b) {
      const CellGeometry c = cell_geometry(a, b, G);
      const double mass = h.at(c.z) * f.field(a, b) * c.weight;
      for (int k = 0; k < c.n_mid; ++k) w[static_cast<std::size_t>(c.mid[static_cast<std::size_t>(k)])] += mass;
    }
  }
  return w;
}

}  // namespace

GridField bdg_gain_term(const MasterField& f, const HalfStepTable& g, const HalfStepTable& h) {
  require_particles(f, 2, 2, "bdg_master_rhs");
  const int G = f.n_points();
  const auto w = bdg_midpoint_weights(f, h);
  GridField gain(2, G);
  const double inv = 1.0 / (static_cast<double>(G) * G);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < G; ++i) {
    for (int j = 0; j < G; ++j) {
      double acc = 0.0;
      for (int s = 0; s < 2 * G; ++s) acc += w[static_cast<std::size_t>(s)] * g.at(2L * i - s) * g.at(2L * j - s);
      gain(i, j) = acc * inv;
    }
  }
  return gain;
}

MasterField bdg_master_rhs(const MasterField& f, const HalfStepTable& g, const HalfStepTable& h) {
  require_particles(f, 2, 2, "bdg_master_rhs");
  const int G = f.n_points();
  MasterField out(bdg_gain_term(f, g, h));
  for (int a = 0; a < G; ++a) {
    for (int b = 0; b < G; ++b) {
      const CellGeometry c = cell_geometry(a, b, G);
      out.field(a, b) = 2.0 * (out.field(a, b) - h.at(c.z) * f.field(a, b));
    }
  }
  return out;
}

MasterField bdg_master_rhs_serial(const MasterField& f, const HalfStepTable& g, const HalfStepTable& h) {
  require_particles(f, 2, 2, "bdg_master_rhs");
  const int G = f.n_points();
  const double half_step = std::numbers::pi / G;
  // geometry of every pre-collision cell from the circle primitives
  struct Cell {
    std::vector<long> mids;
    double h = 0.0;
  };
  std::vector<Cell> cells(static_cast<std::size_t>(G) * G);
  for (int a = 0; a < G; ++a) {
    for (int b = 0; b < G; ++b) {
      const Phase pa(kTwoPi * a / G), pb(kTwoPi * b / G);
      Cell& c = cells[static_cast<std::size_t>(a) * G + b];
      if (const auto mid = pair_midpoint(pa, pb)) {
        c.mids.push_back(std::lround(mid->radians() / half_step));
        c.h = h.at(std::lround(*half_angle_offset(pa, pb) / half_step));
      } else {
        const long base = std::lround(pa.radians() / half_step);
        c.mids = {base + G / 2, base - G / 2};
        c.h = h.at(G / 2);
      }
    }
  }
  MasterField out(2, G, 0.0);
  for (int i = 0; i < G; ++i) {
    for (int j = 0; j < G; ++j) {
      double gain = 0.0;
      for (int a = 0; a < G; ++a) {
        for (int b = 0; b < G; ++b) {
          const Cell& c = cells[static_cast<std::size_t>(a) * G + b];
          const double share = f.field(a, b) * c.h / static_cast<double>(c.mids.size());
          for (const long u : c.mids) gain += share * g.at(2L * i - u) * g.at(2L * j - u);
        }
      }
      gain /= static_cast<double>(G) * G;
      out.field(i, j) = 2.0 * (gain - cells[static_cast<std::size_t>(i) * G + j].h * f.field(i, j));
    }
  }
  return out;
}

MasterField apply(const MasterOperator& op, const MasterField& f) {
  if (op.kind == DynamicsKind::CL) return cl_master_rhs(f, op.noise);
  return bdg_master_rhs(f, op.noise, op.bias);
}

MasterField apply_serial(const MasterOperator& op, const MasterField& f) {
  if (op.kind == DynamicsKind::CL) return cl_master_rhs_serial(f, op.noise);
  return bdg_master_rhs_serial(f, op.noise, op.bias);
}

// ---------------------------------------------------------------------------

MasterIntegration integrate_master(const MasterRhs& rhs, const MasterField& f0, double dt, double t_end) {
  if (!(dt > 0.0)) throw std::invalid_argument("integrate_master: dt must be > 0");
  MasterIntegration run{f0, 0, 0.0};
  if (t_end <= 0.0) return run;
  const auto steps = static_cast<long>(std::ceil(t_end / dt - 1e-12));
  const double h = t_end / static_cast<double>(steps);
  const std::size_t size = f0.field.values.size();

  auto axpy = [&](const MasterField& base, const MasterField& k, double c) {
    MasterField out = base;
    for (std::size_t i = 0; i < size; ++i) out.field.values[i] += c * k.field.values[i];
    return out;
  };

  MasterField& f = run.field;
  for (long s = 0; s < steps; ++s) {
    const MasterField k1 = rhs(f);
    const MasterField k2 = rhs(axpy(f, k1, 0.5 * h));
    const MasterField k3 = rhs(axpy(f, k2, 0.5 * h));
    const MasterField k4 = rhs(axpy(f, k3, h));
    for (std::size_t i = 0; i < size; ++i) {
      f.field.values[i] += h / 6.0 *
                           (k1.field.values[i] + 2.0 * k2.field.values[i] + 2.0 * k3.field.values[i] + k4.field.values[i]);
    }
    if (f.field.max_abs() > 1e6)
      throw std::runtime_error("integrate_master: blow-up at step " + std::to_string(s + 1) +
                               " (max |F| > 1e6); reduce dt");
    run.max_mass_drift = std::max(run.max_mass_drift, std::abs(f.mean() - 1.0));
    f.normalize();
    ++run.steps;
  }
  return run;
}

GridField marginalize(const MasterField& f, std::span<const int> keep) {
  const int n = f.n_particles();
  if (keep.empty()) throw std::invalid_argument("marginalize: keep must not be empty");
  for (std::size_t i = 0; i < keep.size(); ++i) {
    if (keep[i] < 0 || keep[i] >= n) throw std::invalid_argument("marginalize: axis out of range");
    if (i > 0 && keep[i] <= keep[i - 1]) throw std::invalid_argument("marginalize: keep must be increasing");
  }
  GridField current = f.field;
  for (int axis = n - 1; axis >= 0; --axis) {
    if (std::find(keep.begin(), keep.end(), axis) != keep.end()) continue;
    GridField next(current.dims - 1, current.n_points);
    next.values = mean_over_axis(current, axis);
    current = std::move(next);
  }
  return current;
}

// ---------------------------------------------------------------------------

namespace {

double max_diff(const GridField& a, const GridField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) m = std::max(m, std::abs(a.values[i] - b.values[i]));
  return m;
}

GridField cl_hierarchy_rhs(const MasterField& f, const HalfStepTable& g, int k) {
  const int n = f.n_particles();
  const int G = f.n_points();
  std::vector<int> keep(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) keep[static_cast<std::size_t>(i)] = i;
  const GridField fk = marginalize(f, keep);
  GridField out(k, G);
  const double pref = 2.0 / (n - 1);
  if (k == 1) {
    for (int x = 0; x < G; ++x) {
      double conv = 0.0;
      for (int y = 0; y < G; ++y) conv += noise_between(g, y, x) * fk(y);
      out(x) = pref * (n - 1) * 0.5 * (conv / G - fk(x));
    }
    return out;
  }
  const std::array<int, 1> first{0};
  const GridField f1 = marginalize(f, first);
  for (int x1 = 0; x1 < G; ++x1) {
    for (int x2 = 0; x2 < G; ++x2) {
      const double pair = 0.5 * noise_between(g, x1, x2) * (f1(x2) + f1(x1)) - fk(x1, x2);
      double c1 = 0.0, c2 = 0.0;
      for (int y = 0; y < G; ++y) {
        c1 += noise_between(g, y, x1) * fk(y, x2);
        c2 += noise_between(g, y, x2) * fk(x1, y);
      }
      const double third = 0.5 * (c1 / G + c2 / G) - fk(x1, x2);
      out(x1, x2) = pref * (pair + (n - 2) * third);
    }
  }
  return out;
}

GridField bdg_hierarchy_rhs_level1(const MasterField& f, const HalfStepTable& g, const HalfStepTable& h) {
  const int G = f.n_points();
  GridField out(1, G);
  for (int x = 0; x < G; ++x) {
    double gain = 0.0, loss = 0.0;
    for (int a = 0; a < G; ++a) {
      for (int b = 0; b < G; ++b) {
        const CellGeometry c = cell_geometry(a, b, G);
        const double mass = h.at(c.z) * f.field(a, b) * c.weight;
        for (int m = 0; m < c.n_mid; ++m) gain += mass * g.at(2L * x - c.mid[static_cast<std::size_t>(m)]);
      }
      loss += h.at(cell_geometry(x, a, G).z) * f.field(x, a);
    }
    out(x) = 2.0 * (gain / (static_cast<double>(G) * G) - loss / G);
  }
  return out;
}

}  // namespace

double bbgky_consistency(const MasterField& f, const MasterOperator& op, int k) {
  const int n = f.n_particles();
  std::vector<int> keep(static_cast<std::size_t>(std::max(k, 0)));
  for (int i = 0; i < k; ++i) keep[static_cast<std::size_t>(i)] = i;
  if (op.kind == DynamicsKind::CL) {
    if (!((n == 2 && k == 1) || (n == 3 && (k == 1 || k == 2))))
      throw std::invalid_argument("bbgky_consistency: unsupported (N, k) for CL");
    return max_diff(marginalize(cl_master_rhs(f, op.noise), keep), cl_hierarchy_rhs(f, op.noise, k));
  }
  if (!(n == 2 && k == 1)) throw std::invalid_argument("bbgky_consistency: unsupported (N, k) for BDG");
  return max_diff(marginalize(bdg_master_rhs(f, op.noise, op.bias), keep),
                  bdg_hierarchy_rhs_level1(f, op.noise, op.bias));
}

void write_master_csv(std::ostream& os, const MasterField& f) { write_grid_csv(os, f.field); }

}  // namespace swarmkin
