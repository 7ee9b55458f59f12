// Solvers for the N → ∞ kinetic equations (collision rate ν = 1).
//
// CL levels 1 and 2 are linear and diagonal in Fourier space; they are advanced
// with an exact exponential integrator and the δ(θ1 − θ2) source lives in
// Fourier space. The BDG closure is a nonlinear diffusion advanced with a
// conservative central-flux finite-volume scheme.

#pragma once

#include <complex>
#include <span>
#include <vector>

#include "swarmkin/analytic_oracle.hpp"
#include "swarmkin/grid_field.hpp"

namespace swarmkin {

struct PdeParams {
  double sigma = 0.0;  // limit noise scale
  double tau = 0.0;    // limit bias scale (BDG only)
  double dt = 0.0;
  double t_end = 0.0;
};

/// ∂F/∂t = (σ²/2)∂²F, propagated exactly mode by mode to t_end.
GridField cl_f1_solve(const GridField& f0, const PdeParams& p);

/// Fourier-space state of the CL pair equation
///   ∂F2/∂t = (F1(θ1) + F1(θ2))δ(θ1 − θ2) − 2F2 + (σ²/2)ΔF2
/// on modes |n1|, |n2| <= max_mode. F1 follows the level-one heat equation from
/// its initial data. δ has unit mass against dθ/(2π), so the source has
/// coefficients 2F̂1(n1 + n2).
class ClPairSolver {
 public:
  using Complex = std::complex<double>;

  ClPairSolver(double sigma, int max_mode, std::span<const Complex> f1_coefficients,
               std::span<const Complex> f2_coefficients);
  ClPairSolver(double sigma, int max_mode, const GridField& f1_initial, const GridField& f2_initial);

  int max_mode() const { return max_mode_; }
  double time() const { return time_; }

  /// Exact update over one interval of length h.
  void advance(double h);
  /// Advances to time() + duration in steps of at most dt.
  void advance_by(double duration, double dt);

  Complex coefficient(int n1, int n2) const;
  /// F̂1(m) at the current time, |m| <= 2·max_mode.
  Complex f1_coefficient(int m) const;

  /// Synthesis of the truncated series on an n_points² grid.
  GridField to_grid(int n_points) const;

  /// Coefficient array for |n1|,|n2| <= max_mode (row-major in n1).
  static std::vector<Complex> coefficients_from_grid(const GridField& f2, int max_mode);
  static std::vector<Complex> f1_coefficients_from_grid(const GridField& f1, int max_mode);

 private:
  std::size_t index(int n1, int n2) const;

  double sigma_;
  int max_mode_;
  double time_ = 0.0;
  std::vector<Complex> f1_initial_;  // |m| <= 2·max_mode
  std::vector<Complex> f2_;
};

/// Solves the CL pair equation from (f1_initial, f2_initial) to p.t_end with
/// step p.dt and returns F2 on the grid of f2_initial. Modes up to
/// n_points/2 − 1 are retained.
GridField cl_f2_solve(const GridField& f1_initial, const GridField& f2_initial, const PdeParams& p);

struct DiffusionStep {
  GridField field;
  bool degenerate_time_scale = false;  // σ = τ: identity step
};

/// Largest stable explicit step Δθ²/(4·2(σ²−τ²)·max F).
double bdg_diffusion_max_dt(const GridField& f, const PdeParams& p);

/// One explicit finite-volume step of ∂F/∂t = 2(σ²−τ²)∂θ(F ∂θF) with step
/// p.dt. Throws std::domain_error for σ < τ (backwards diffusion) and
/// std::invalid_argument when p.dt exceeds the stability bound.
DiffusionStep bdg_nonlinear_diffusion_step(const GridField& f, const PdeParams& p);

/// D̄_ij f = (∂_i + ∂_j)² f, spectrally (axes are 0-based).
GridField apply_pair_operator(const GridField& f, int i, int j);

/// (σ² − τ²) Σ_{i<=k} (D̄_{i,k+1} F_{k+1})(θ1..θk, θ_i): right-hand side of the
/// level-k limit BDG hierarchy. f_kplus1 must have dims = k + 1 <= 3.
GridField bdg_hierarchy_rhs(const GridField& f_kplus1, const PdeParams& p, int k);

/// Stationary residual of the limit CL hierarchy at one tuple:
/// Σ_{i<j}[F̂_{k−1}(merge i→j) + F̂_{k−1}(merge j→i) − 2F̂_k(n)] − (σ²/2)Σn_i² F̂_k(n).
double cl_hierarchy_residual_at(const FourierMarginal& fm_k, const FourierMarginal& fm_km1,
                                const CorrelationParams& p, std::span<const int> tuple);

/// Max |residual| over stored tuples with max|n_i| <= n_max − 1.
double cl_hierarchy_residual_fourier(const FourierMarginal& fm_k, const FourierMarginal& fm_km1,
                                     const CorrelationParams& p);

}  // namespace swarmkin
