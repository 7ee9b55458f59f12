// Grid master equations for N = 2 (CL, BDG) and N = 3 (CL).
//
// Time is measured so that one unit equals N attempted interactions (ν = 1).
// Kernels are tabulated on half grid steps π/G; the noise table is normalized
// per parity so that its discrete mean is exactly 1, which makes both
// operators conserve discrete mass to rounding.

#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "swarmkin/grid_field.hpp"
#include "swarmkin/particle_sim.hpp"

namespace swarmkin {

/// N-particle density on a G^N grid (N = 2 or 3), mean 1 under (dθ/2π)^N.
struct MasterField {
  GridField field;

  MasterField(int n_particles, int n_points, double fill = 1.0);
  explicit MasterField(GridField f);

  int n_particles() const { return field.dims; }
  int n_points() const { return field.n_points; }
  double mean() const { return field.mean(); }

  /// Averages over all coordinate permutations.
  void symmetrize();
  void normalize();
  bool is_symmetric(double tol) const;
};

/// f(s·π/G) for s = 0..2G−1, argument wrapped to [−π, π).
struct HalfStepTable {
  int n_points = 0;
  std::vector<double> values;

  double at(long s) const {
    const long m = static_cast<long>(values.size());
    return values[static_cast<std::size_t>(((s % m) + m) % m)];
  }
};

HalfStepTable tabulate_half_steps(const std::function<double(double)>& f, int n_points);
/// As above, each parity class rescaled to mean 1.
HalfStepTable tabulate_noise(const std::function<double(double)>& g, int n_points);

struct MasterOperator {
  DynamicsKind kind = DynamicsKind::CL;
  HalfStepTable noise;
  HalfStepTable bias;  // ones for unbiased BDG, unused for CL
};

/// Operator for the dynamics of cfg with the finite-N noise and bias.
MasterOperator make_master_operator(const DynamicsConfig& cfg, int n_points);

MasterField cl_master_rhs(const MasterField& f, const HalfStepTable& g);
MasterField cl_master_rhs_serial(const MasterField& f, const HalfStepTable& g);

/// N = 2 only. Pre-collision cells are grouped by their midpoint on the half
/// grid; antipodal cells split their weight between both midpoints.
MasterField bdg_master_rhs(const MasterField& f, const HalfStepTable& g, const HalfStepTable& h);
MasterField bdg_master_rhs_serial(const MasterField& f, const HalfStepTable& g, const HalfStepTable& h);
/// Gain part of the BDG collision operator (without the 2ν/(N−1) factor).
GridField bdg_gain_term(const MasterField& f, const HalfStepTable& g, const HalfStepTable& h);

MasterField apply(const MasterOperator& op, const MasterField& f);
MasterField apply_serial(const MasterOperator& op, const MasterField& f);

using MasterRhs = std::function<MasterField(const MasterField&)>;

struct MasterIntegration {
  MasterField field;
  long steps = 0;
  double max_mass_drift = 0.0;  // largest |mean − 1| before each renormalization
};

/// Classical RK4 to t_end; throws std::runtime_error when max|F| exceeds 1e6.
MasterIntegration integrate_master(const MasterRhs& rhs, const MasterField& f0, double dt, double t_end);

/// Integrates out every axis not in keep (0-based, strictly increasing).
GridField marginalize(const MasterField& f, std::span<const int> keep);

/// max |d/dt F_k from the master equation − d/dt F_k from the hierarchy|.
/// Supported: CL with (N,k) ∈ {(2,1), (3,1), (3,2)}, BDG with (2,1).
double bbgky_consistency(const MasterField& f, const MasterOperator& op, int k);

void write_master_csv(std::ostream& os, const MasterField& f);

}  // namespace swarmkin
