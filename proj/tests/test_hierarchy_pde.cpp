#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>

#include "doctest.h"
#include "swarmkin/hierarchy_pde.hpp"

using namespace swarmkin;
using Complex = ClPairSolver::Complex;

namespace {

GridField grid1(int n, const std::function<double(double)>& f) {
  GridField g(1, n);
  for (int i = 0; i < n; ++i) g(i) = f(g.node(i));
  return g;
}

GridField grid2(int n, const std::function<double(double, double)>& f) {
  GridField g(2, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = f(g.node(i), g.node(j));
  return g;
}

double energy(const GridField& f) {
  double e = 0.0;
  for (const double v : f.values) e += v * v;
  return e / static_cast<double>(f.size());
}

}  // namespace

TEST_CASE("cl level one is the heat equation") {
  const double sigma = 0.4;
  const auto f0 = grid1(64, [](double t) { return 1.0 + std::cos(t) + 0.3 * std::sin(3 * t); });
  const auto f = cl_f1_solve(f0, {sigma, 0.0, 0.1, 2.5});
  const double d1 = std::exp(-sigma * sigma / 2 * 2.5);
  const double d3 = std::exp(-sigma * sigma * 9 / 2 * 2.5);
  double err = 0.0;
  for (int i = 0; i < 64; ++i) err = std::max(err, std::abs(f(i) - (1.0 + d1 * std::cos(f.node(i)) + 0.3 * d3 * std::sin(3 * f.node(i)))));
  CHECK(err < 1e-13);
  CHECK(f.mean() == doctest::Approx(1.0).epsilon(1e-14));

  const auto flat = cl_f1_solve(GridField(1, 32, 1.0), {sigma, 0.0, 0.1, 10.0});
  for (const double v : flat.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("cl pair modes from uniform data follow the closed form") {
  const double sigma = 0.5;
  const int k = 16;
  ClPairSolver s(sigma, k, GridField(1, 64, 1.0), GridField(2, 64, 1.0));
  CHECK(s.coefficient(0, 0).real() == doctest::Approx(1.0));
  CHECK(std::abs(s.coefficient(3, -3)) < 1e-15);
  s.advance_by(0.7, 0.13);
  CHECK(s.time() == doctest::Approx(0.7));
  for (int n = -k; n <= k; ++n) {
    const double c = 2.0 + sigma * sigma * n * n;
    const double expected = (n == 0 ? std::exp(-c * 0.7) : 0.0) + 2.0 / c * (1.0 - std::exp(-c * 0.7));
    REQUIRE(std::abs(s.coefficient(n, -n) - Complex(expected)) < 1e-14);
    REQUIRE(std::abs(s.coefficient(n, 1 - n)) < 1e-15);
  }
}

TEST_CASE("cl pair integrator is exact for any step size") {
  const double sigma = 0.3;
  const auto f1 = grid1(32, [](double t) { return 1.0 + std::cos(t); });
  const auto f2 = grid2(32, [](double a, double b) { return 1.0 + 0.5 * std::cos(a) + 0.2 * std::cos(a - b); });
  ClPairSolver coarse(sigma, 8, f1, f2), fine(sigma, 8, f1, f2);
  coarse.advance_by(1.3, 1.3);
  fine.advance_by(1.3, 0.01);
  for (int a = -8; a <= 8; ++a)
    for (int b = -8; b <= 8; ++b) REQUIRE(std::abs(coarse.coefficient(a, b) - fine.coefficient(a, b)) < 1e-13);
}

TEST_CASE("cl pair source mode against an RK4 oracle") {
  // y' = 2F̂1(1)(t) − (2 + σ²/2)y on mode (1,0), F̂1(1)(t) = e^{−σ²t/2}/2.
  const double sigma = 0.6;
  ClPairSolver s(sigma, 4, grid1(16, [](double t) { return 1.0 + std::cos(t); }), GridField(2, 16, 1.0));
  CHECK(std::abs(s.f1_coefficient(1) - Complex(0.5)) < 1e-15);
  s.advance_by(2.0, 0.25);
  CHECK(std::abs(s.f1_coefficient(1) - Complex(0.5 * std::exp(-sigma * sigma))) < 1e-15);

  const double c = 2.0 + sigma * sigma / 2;
  auto rhs = [&](double t, double y) { return std::exp(-sigma * sigma * t / 2) - c * y; };
  double y = 0.0, t = 0.0;
  const double h = 1e-4;
  for (int i = 0; i < 20000; ++i) {
    const double k1 = rhs(t, y), k2 = rhs(t + h / 2, y + h / 2 * k1);
    const double k3 = rhs(t + h / 2, y + h / 2 * k2), k4 = rhs(t + h, y + h * k3);
    y += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    t += h;
  }
  CHECK(s.coefficient(1, 0).real() == doctest::Approx(y).epsilon(1e-10));
  CHECK(s.coefficient(0, 1).real() == doctest::Approx(y).epsilon(1e-10));
  CHECK(std::abs(s.coefficient(1, 0).imag()) < 1e-15);
}

TEST_CASE("cl pair equilibrium is the pair correlation") {
  const auto p = CorrelationParams::from_gamma(0.05);
  const int n = 64;
  const auto f2 = cl_f2_solve(GridField(1, n, 1.0), GridField(2, n, 1.0), {p.sigma, 0.0, 0.5, 20.0});
  double err = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double series = 1.0;
      for (int m = 1; m < n / 2; ++m) series += 2 * m_fourier(m, p) * std::cos(m * (f2.node(i) - f2.node(j)));
      err = std::max(err, std::abs(f2(i, j) - series));
    }
  }
  CHECK(err < 1e-12);
  CHECK(f2.mean() == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("pair correlation is invariant and other modes decay") {
  const auto p = CorrelationParams::from_gamma(0.1);
  const int k = 12;
  std::vector<Complex> f1((4 * k) + 1, 0.0), f2((2 * k + 1) * (2 * k + 1), 0.0);
  f1[2 * k] = 1.0;
  for (int n = -k; n <= k; ++n) f2[(n + k) * (2 * k + 1) + (-n + k)] = m_fourier(n, p);
  f2[(2 + k) * (2 * k + 1) + (1 + k)] = 0.25;
  ClPairSolver s(p.sigma, k, f1, f2);
  s.advance_by(3.0, 0.1);
  for (int n = -k; n <= k; ++n) REQUIRE(std::abs(s.coefficient(n, -n) - Complex(m_fourier(n, p))) < 1e-14);
  const double rate = 2.0 + p.sigma * p.sigma / 2 * 5;
  CHECK(s.coefficient(2, 1).real() == doctest::Approx(0.25 * std::exp(-3.0 * rate)).epsilon(1e-10));
}

TEST_CASE("bdg diffusion") {
  PdeParams p{0.5, 0.3, 0.0, 0.0};
  const auto flat = GridField(1, 64, 1.0);
  p.dt = bdg_diffusion_max_dt(flat, p);
  const auto step = bdg_nonlinear_diffusion_step(flat, p);
  for (const double v : step.field.values) CHECK(v == 1.0);
  CHECK_FALSE(step.degenerate_time_scale);

  auto f = grid1(64, [](double t) { return 1.0 + 0.8 * std::cos(t) + 0.1 * std::sin(5 * t); });
  const double mass = f.mean();
  double e = energy(f);
  p.dt = 0.9 * bdg_diffusion_max_dt(f, p);
  for (int it = 0; it < 500; ++it) {
    f = bdg_nonlinear_diffusion_step(f, p).field;
    REQUIRE(std::abs(f.mean() - mass) < 1e-12);
    const double e2 = energy(f);
    REQUIRE(e2 <= e + 1e-15);
    e = e2;
  }
  CHECK(f.max_abs() < 1.8);

  PdeParams too_big = p;
  too_big.dt = 1.01 * bdg_diffusion_max_dt(f, p);
  CHECK_THROWS_AS(bdg_nonlinear_diffusion_step(f, too_big), std::invalid_argument);
  CHECK_THROWS_AS(bdg_nonlinear_diffusion_step(f, {0.3, 0.5, 1e-4, 0.0}), std::domain_error);
  const auto same = bdg_nonlinear_diffusion_step(f, {0.4, 0.4, 1.0, 0.0});
  CHECK(same.degenerate_time_scale);
  CHECK(same.field.values == f.values);
}

TEST_CASE("pair operator") {
  const int n = 32;
  const auto f = grid2(n, [](double a, double b) { return std::sin(a) * std::cos(2 * b) + std::cos(a - b); });
  const auto g = apply_pair_operator(f, 0, 1);
  double err = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      // (∂a + ∂b)² sin(a)cos(2b) = −sin a cos 2b − 4 cos a sin 2b − 4 sin a cos 2b
      const double a = f.node(i), b = f.node(j);
      const double exact = -5 * std::sin(a) * std::cos(2 * b) - 4 * std::cos(a) * std::sin(2 * b);
      err = std::max(err, std::abs(g(i, j) - exact));
    }
  CHECK(err < 1e-12);
}

TEST_CASE("bdg hierarchy right-hand side") {
  const PdeParams p{0.5, 0.2, 0.0, 0.0};
  const double c = p.sigma * p.sigma - p.tau * p.tau;
  const int n = 32;

  const auto zero = bdg_hierarchy_rhs(GridField(2, n, 1.0), p, 1);
  CHECK(zero.dims == 1);
  CHECK(zero.max_abs() < 1e-13);
  const auto diff = bdg_hierarchy_rhs(grid2(n, [](double a, double b) { return 1.0 + std::cos(3 * (a - b)); }), p, 1);
  CHECK(diff.max_abs() < 1e-12);

  // F2 = cos θ1 cos θ2 restricts to cos²θ, whose second derivative is −2cos 2θ
  const auto prod = bdg_hierarchy_rhs(grid2(n, [](double a, double b) { return std::cos(a) * std::cos(b); }), p, 1);
  double err = 0.0;
  for (int i = 0; i < n; ++i) err = std::max(err, std::abs(prod(i) + 2 * c * std::cos(2 * prod.node(i))));
  CHECK(err < 1e-12);

  GridField f3(3, 16);
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 16; ++j)
      for (int l = 0; l < 16; ++l)
        f3.values[(i * 16 + j) * 16 + l] = std::cos(f3.node(i)) * std::sin(f3.node(j)) * std::cos(f3.node(l));
  const auto r = bdg_hierarchy_rhs(f3, p, 2);
  CHECK(r.dims == 2);
  err = 0.0;
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 16; ++j) {
      const double a = r.node(i), b = r.node(j);
      const double exact = c * (-2 * std::cos(2 * a) * std::sin(b) - 2 * std::cos(a) * std::sin(2 * b));
      err = std::max(err, std::abs(r(i, j) - exact));
    }
  CHECK(err < 1e-12);

  CHECK_THROWS(bdg_hierarchy_rhs(GridField(3, 8, 1.0), p, 3));
  CHECK_THROWS(bdg_hierarchy_rhs(GridField(2, 8, 1.0), p, 2));
  CHECK_THROWS(bdg_hierarchy_rhs(GridField(1, 8, 1.0), p, 0));
}
