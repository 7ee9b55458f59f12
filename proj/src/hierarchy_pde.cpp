#include "swarmkin/hierarchy_pde.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "spectral.hpp"

namespace swarmkin {

using spectral::Complex;

namespace {

std::vector<Complex> to_complex(const GridField& f) {
  return std::vector<Complex>(f.values.begin(), f.values.end());
}

}  // namespace

GridField cl_f1_solve(const GridField& f0, const PdeParams& p) {
  if (f0.dims != 1) throw std::invalid_argument("cl_f1_solve: expected a 1D field");
  const int g = f0.n_points;
  auto c = to_complex(f0);
  spectral::transform(c, 1, g, false);
  const double rate = 0.5 * p.sigma * p.sigma;
  for (int m = 0; m < g; ++m) {
    const double n = spectral::wavenumber(m, g);
    c[static_cast<std::size_t>(m)] *= std::exp(-rate * n * n * p.t_end);
  }
  spectral::transform(c, 1, g, true);
  GridField out(1, g);
  for (int m = 0; m < g; ++m) out(m) = c[static_cast<std::size_t>(m)].real();
  return out;
}

// ---------------------------------------------------------------------------

ClPairSolver::ClPairSolver(double sigma, int max_mode, std::span<const Complex> f1_coefficients,
                           std::span<const Complex> f2_coefficients)
    : sigma_(sigma), max_mode_(max_mode) {
  if (max_mode < 0) throw std::invalid_argument("ClPairSolver: max_mode must be >= 0");
  const auto side = static_cast<std::size_t>(2 * max_mode + 1);
  if (f1_coefficients.size() != static_cast<std::size_t>(4 * max_mode + 1))
    throw std::invalid_argument("ClPairSolver: F1 needs coefficients for |m| <= 2·max_mode");
  if (f2_coefficients.size() != side * side)
    throw std::invalid_argument("ClPairSolver: F2 coefficient array has the wrong size");
  f1_initial_.assign(f1_coefficients.begin(), f1_coefficients.end());
  f2_.assign(f2_coefficients.begin(), f2_coefficients.end());
}

ClPairSolver::ClPairSolver(double sigma, int max_mode, const GridField& f1_initial,
                           const GridField& f2_initial)
    : ClPairSolver(sigma, max_mode, f1_coefficients_from_grid(f1_initial, max_mode),
                   coefficients_from_grid(f2_initial, max_mode)) {}

std::size_t ClPairSolver::index(int n1, int n2) const {
  const auto side = static_cast<std::size_t>(2 * max_mode_ + 1);
  return static_cast<std::size_t>(n1 + max_mode_) * side + static_cast<std::size_t>(n2 + max_mode_);
}

ClPairSolver::Complex ClPairSolver::coefficient(int n1, int n2) const {
  if (std::abs(n1) > max_mode_ || std::abs(n2) > max_mode_) return 0.0;
  return f2_[index(n1, n2)];
}

ClPairSolver::Complex ClPairSolver::f1_coefficient(int m) const {
  if (std::abs(m) > 2 * max_mode_) return 0.0;
  const double rate = 0.5 * sigma_ * sigma_;
  return f1_initial_[static_cast<std::size_t>(m + 2 * max_mode_)] * std::exp(-rate * m * m * time_);
}

void ClPairSolver::advance(double h) {
  if (!(h > 0.0)) return;
  const double half_s2 = 0.5 * sigma_ * sigma_;
  for (int n1 = -max_mode_; n1 <= max_mode_; ++n1) {
    for (int n2 = -max_mode_; n2 <= max_mode_; ++n2) {
      const double c = 2.0 + half_s2 * (static_cast<double>(n1) * n1 + static_cast<double>(n2) * n2);
      const int m = n1 + n2;
      const double b = half_s2 * m * m;
      const Complex a = 2.0 * f1_coefficient(m);
      const double d = c - b;
      // ∫_0^h e^{−c(h−s)} e^{−bs} ds, stable when c ≈ b
      const double phi = std::abs(d * h) < 1e-12 ? h : -std::expm1(-d * h) / d;
      Complex& y = f2_[index(n1, n2)];
      y = y * std::exp(-c * h) + a * std::exp(-b * h) * phi;
    }
  }
  time_ += h;
}

void ClPairSolver::advance_by(double duration, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("ClPairSolver: dt must be > 0");
  if (duration <= 0.0) return;
  const auto steps = static_cast<long>(std::ceil(duration / dt - 1e-12));
  const double h = duration / static_cast<double>(steps);
  for (long s = 0; s < steps; ++s) advance(h);
}

GridField ClPairSolver::to_grid(int n_points) const {
  const int side = 2 * max_mode_ + 1;
  const auto G = static_cast<std::size_t>(n_points);
  std::vector<Complex> phase(G * static_cast<std::size_t>(side));
  for (int n = -max_mode_; n <= max_mode_; ++n) {
    for (std::size_t j = 0; j < G; ++j) {
      const double a = n * kTwoPi * static_cast<double>(j) / n_points;
      phase[static_cast<std::size_t>(n + max_mode_) * G + j] = Complex(std::cos(a), std::sin(a));
    }
  }
  // partial[n1][j] = Σ_n2 c(n1,n2) e^{i n2 θ_j}
  std::vector<Complex> partial(static_cast<std::size_t>(side) * G);
  for (int n1 = -max_mode_; n1 <= max_mode_; ++n1) {
    for (int n2 = -max_mode_; n2 <= max_mode_; ++n2) {
      const Complex c = f2_[index(n1, n2)];
      if (c == 0.0) continue;
      const Complex* ph = &phase[static_cast<std::size_t>(n2 + max_mode_) * G];
      Complex* row = &partial[static_cast<std::size_t>(n1 + max_mode_) * G];
      for (std::size_t j = 0; j < G; ++j) row[j] += c * ph[j];
    }
  }
  GridField out(2, n_points);
  for (std::size_t i = 0; i < G; ++i) {
    for (std::size_t j = 0; j < G; ++j) {
      Complex acc = 0.0;
      for (int n1 = -max_mode_; n1 <= max_mode_; ++n1) {
        acc += partial[static_cast<std::size_t>(n1 + max_mode_) * G + j] *
               phase[static_cast<std::size_t>(n1 + max_mode_) * G + i];
      }
      out.values[i * G + j] = acc.real();
    }
  }
  return out;
}

std::vector<Complex> ClPairSolver::coefficients_from_grid(const GridField& f2, int max_mode) {
  if (f2.dims != 2) throw std::invalid_argument("ClPairSolver: expected a 2D field");
  const int g = f2.n_points;
  auto c = to_complex(f2);
  spectral::transform(c, 2, g, false);
  const auto side = static_cast<std::size_t>(2 * max_mode + 1);
  std::vector<Complex> out(side * side, 0.0);
  for (int a = 0; a < g; ++a) {
    const int n1 = spectral::wavenumber(a, g);
    if (std::abs(n1) > max_mode || (g % 2 == 0 && a == g / 2)) continue;
    for (int b = 0; b < g; ++b) {
      const int n2 = spectral::wavenumber(b, g);
      if (std::abs(n2) > max_mode || (g % 2 == 0 && b == g / 2)) continue;
      out[static_cast<std::size_t>(n1 + max_mode) * side + static_cast<std::size_t>(n2 + max_mode)] =
          c[static_cast<std::size_t>(a) * g + b];
    }
  }
  return out;
}

std::vector<Complex> ClPairSolver::f1_coefficients_from_grid(const GridField& f1, int max_mode) {
  if (f1.dims != 1) throw std::invalid_argument("ClPairSolver: expected a 1D field for F1");
  const int g = f1.n_points;
  auto c = to_complex(f1);
  spectral::transform(c, 1, g, false);
  std::vector<Complex> out(static_cast<std::size_t>(4 * max_mode + 1), 0.0);
  for (int a = 0; a < g; ++a) {
    const int m = spectral::wavenumber(a, g);
    if (std::abs(m) > 2 * max_mode || (g % 2 == 0 && a == g / 2)) continue;
    out[static_cast<std::size_t>(m + 2 * max_mode)] = c[static_cast<std::size_t>(a)];
  }
  return out;
}

GridField cl_f2_solve(const GridField& f1_initial, const GridField& f2_initial, const PdeParams& p) {
  if (f2_initial.dims != 2) throw std::invalid_argument("cl_f2_solve: expected a 2D field");
  const int max_mode = std::max(0, f2_initial.n_points / 2 - 1);
  ClPairSolver solver(p.sigma, max_mode, f1_initial, f2_initial);
  solver.advance_by(p.t_end, p.dt);
  return solver.to_grid(f2_initial.n_points);
}

// ---------------------------------------------------------------------------

double bdg_diffusion_max_dt(const GridField& f, const PdeParams& p) {
  const double coeff = 2.0 * (p.sigma * p.sigma - p.tau * p.tau);
  const double h = kTwoPi / f.n_points;
  const double fmax = std::max(f.max_abs(), 1e-300);
  if (coeff <= 0.0) return std::numeric_limits<double>::infinity();
  return h * h / (4.0 * coeff * fmax);
}

DiffusionStep bdg_nonlinear_diffusion_step(const GridField& f, const PdeParams& p) {
  if (f.dims != 1) throw std::invalid_argument("bdg_nonlinear_diffusion_step: expected a 1D field");
  if (p.sigma < p.tau)
    throw std::domain_error("backwards diffusion: sigma < tau, the closure is ill-posed");
  if (p.sigma == p.tau) return {f, true};
  if (!(p.dt > 0.0)) throw std::invalid_argument("bdg_nonlinear_diffusion_step: dt must be > 0");
  if (p.dt > bdg_diffusion_max_dt(f, p))
    throw std::invalid_argument("bdg_nonlinear_diffusion_step: dt exceeds the stability bound");

  const int g = f.n_points;
  const double coeff = 2.0 * (p.sigma * p.sigma - p.tau * p.tau);
  const double h = kTwoPi / g;
  // flux[m] through the face between cells m and m+1
  std::vector<double> flux(static_cast<std::size_t>(g));
  for (int m = 0; m < g; ++m) {
    const double left = f(m);
    const double right = f((m + 1) % g);
    flux[static_cast<std::size_t>(m)] = coeff * 0.5 * (left + right) * (right - left) / h;
  }
  DiffusionStep out{GridField(1, g), false};
  for (int m = 0; m < g; ++m) {
    const double in = flux[static_cast<std::size_t>((m + g - 1) % g)];
    out.field(m) = f(m) + p.dt / h * (flux[static_cast<std::size_t>(m)] - in);
  }
  return out;
}

GridField apply_pair_operator(const GridField& f, int i, int j) {
  if (i < 0 || j < 0 || i >= f.dims || j >= f.dims || i == j)
    throw std::invalid_argument("apply_pair_operator: bad axis pair");
  const int g = f.n_points;
  auto c = to_complex(f);
  spectral::transform(c, f.dims, g, false);
  std::vector<int> idx(static_cast<std::size_t>(f.dims));
  for (std::size_t flat = 0; flat < c.size(); ++flat) {
    std::size_t rest = flat;
    for (int d = f.dims - 1; d >= 0; --d) {
      idx[static_cast<std::size_t>(d)] = static_cast<int>(rest % static_cast<std::size_t>(g));
      rest /= static_cast<std::size_t>(g);
    }
    const double k = spectral::derivative_wavenumber(idx[static_cast<std::size_t>(i)], g) +
                     spectral::derivative_wavenumber(idx[static_cast<std::size_t>(j)], g);
    c[flat] *= -(k * k);
  }
  spectral::transform(c, f.dims, g, true);
  GridField out(f.dims, g);
  for (std::size_t flat = 0; flat < c.size(); ++flat) out.values[flat] = c[flat].real();
  return out;
}

GridField bdg_hierarchy_rhs(const GridField& f_kplus1, const PdeParams& p, int k) {
  if (k < 1) throw std::invalid_argument("bdg_hierarchy_rhs: k must be >= 1");
  if (k + 1 > 3) throw std::invalid_argument("bdg_hierarchy_rhs: k + 1 > 3 is unsupported");
  if (f_kplus1.dims != k + 1) throw std::invalid_argument("bdg_hierarchy_rhs: field must have k + 1 axes");
  const int g = f_kplus1.n_points;
  const auto G = static_cast<std::size_t>(g);
  const double scale = p.sigma * p.sigma - p.tau * p.tau;
  GridField out(k, g);
  std::vector<std::size_t> idx(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    const GridField d = apply_pair_operator(f_kplus1, i, k);
    for (std::size_t flat = 0; flat < out.values.size(); ++flat) {
      std::size_t rest = flat;
      for (int a = k - 1; a >= 0; --a) {
        idx[static_cast<std::size_t>(a)] = rest % G;
        rest /= G;
      }
      // restrict θ_{k+1} = θ_i
      const std::size_t src = flat * G + idx[static_cast<std::size_t>(i)];
      out.values[flat] += scale * d.values[src];
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

double cl_hierarchy_residual_at(const FourierMarginal& fm_k, const FourierMarginal& fm_km1,
                                const CorrelationParams& p, std::span<const int> tuple) {
  const int k = fm_k.k();
  if (fm_km1.k() != k - 1) throw std::invalid_argument("cl_hierarchy_residual: levels must be k and k−1");
  if (static_cast<int>(tuple.size()) != k) throw std::invalid_argument("cl_hierarchy_residual: tuple size");
  const double fk = fm_k.at(tuple);
  double r = 0.0;
  double sum_sq = 0.0;
  for (int i = 0; i < k; ++i) {
    sum_sq += static_cast<double>(tuple[i]) * tuple[i];
    for (int j = i + 1; j < k; ++j) {
      r += fm_km1.at(merge_indices(tuple, i, j)) + fm_km1.at(merge_indices(tuple, j, i)) - 2.0 * fk;
    }
  }
  return r - 0.5 * p.sigma * p.sigma * sum_sq * fk;
}

double cl_hierarchy_residual_fourier(const FourierMarginal& fm_k, const FourierMarginal& fm_km1,
                                     const CorrelationParams& p) {
  double worst = 0.0;
  const int limit = fm_k.n_max() - 1;
  fm_k.for_each([&](std::span<const int> tuple, double) {
    for (const int n : tuple)
      if (std::abs(n) > limit) return;
    worst = std::max(worst, std::abs(cl_hierarchy_residual_at(fm_k, fm_km1, p, tuple)));
  });
  return worst;
}

}  // namespace swarmkin
