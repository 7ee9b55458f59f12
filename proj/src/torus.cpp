#include "swarmkin/torus.hpp"

#include <cmath>
#include <stdexcept>

namespace swarmkin {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDegenerateNorm = 1e-12;

// Sum of exp(-(x + k·period)²/(2s²)) over all k, stopping once a symmetric pair
// of images adds less than 1e-15 of the running total.
double periodized_gaussian_sum(double x, double s, double period, int min_terms) {
  const double inv = 1.0 / (2.0 * s * s);
  double sum = std::exp(-x * x * inv);
  for (int k = 1;; ++k) {
    const double a = x + k * period;
    const double b = x - k * period;
    const double term = std::exp(-a * a * inv) + std::exp(-b * b * inv);
    sum += term;
    if (k >= min_terms && term <= 1e-15 * sum) break;
    if (k > 100000) break;
  }
  return sum;
}

}  // namespace

double wrap(double x) {
  if (x >= 0.0 && x < kTwoPi) return x;
  // exact by Sterbenz, so identical to the fmod branch
  if (x >= kTwoPi && x < 2.0 * kTwoPi) return x - kTwoPi;
  if (!std::isfinite(x)) throw std::domain_error("wrap: non-finite angle");
  double r = std::fmod(x, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  // fmod of a tiny negative number plus 2π can round up to exactly 2π
  if (r >= kTwoPi) r = 0.0;
  return r;
}

double wrap_signed(double x) {
  double r = wrap(x + kPi) - kPi;
  return r;
}

std::optional<Phase> pair_midpoint(Phase theta_i, Phase theta_j) {
  const double x = std::cos(theta_i.radians()) + std::cos(theta_j.radians());
  const double y = std::sin(theta_i.radians()) + std::sin(theta_j.radians());
  if (std::hypot(x, y) < kDegenerateNorm) return std::nullopt;
  return Phase(std::atan2(y, x));
}

std::optional<double> half_angle_offset(Phase theta_i, Phase theta_j) {
  const auto mid = pair_midpoint(theta_i, theta_j);
  if (!mid) return std::nullopt;
  // arg(v̂* v_i) from the dot and cross products of the two unit vectors
  const double mx = std::cos(mid->radians());
  const double my = std::sin(mid->radians());
  const double vx = std::cos(theta_i.radians());
  const double vy = std::sin(theta_i.radians());
  double offset = std::atan2(mx * vy - my * vx, mx * vx + my * vy);
  if (offset <= -kPi / 2) offset += kPi;
  if (offset > kPi / 2) offset -= kPi;
  return offset;
}

double wrapped_gaussian_density(double theta, double sigma, int min_terms) {
  if (!(sigma > 0.0)) throw std::invalid_argument("wrapped_gaussian_density: sigma must be > 0");
  const double x = wrap_signed(theta);
  const double norm = kTwoPi / (sigma * std::sqrt(kTwoPi));
  return norm * periodized_gaussian_sum(x, sigma, kTwoPi, min_terms);
}

NoiseModel::NoiseModel(double gamma, int n_particles, int truncation_k)
    : gamma_(gamma), n_particles_(n_particles), truncation_k_(truncation_k) {
  if (!(gamma > 0.0) || !std::isfinite(gamma))
    throw std::invalid_argument("NoiseModel: gamma must be a finite value > 0");
  if (n_particles < 2) throw std::invalid_argument("NoiseModel: n_particles must be >= 2");
  if (truncation_k < 1) throw std::invalid_argument("NoiseModel: truncation_k must be >= 1");
  sigma_ = kTwoPi * gamma / std::sqrt(static_cast<double>(n_particles));
}

BiasModel::BiasModel(double gamma_prime, int n_particles)
    : gamma_prime_(gamma_prime), n_particles_(n_particles) {
  if (!(gamma_prime > 0.0) || !std::isfinite(gamma_prime))
    throw std::invalid_argument("BiasModel: gamma_prime must be a finite value > 0");
  if (n_particles < 2) throw std::invalid_argument("BiasModel: n_particles must be >= 2");
  tau_ = kTwoPi * gamma_prime / std::sqrt(static_cast<double>(n_particles));
  normalizer_ = periodized(0.0);
}

double BiasModel::periodized(double offset) const {
  return periodized_gaussian_sum(offset, tau_, kPi, 4);
}

double BiasModel::acceptance(double offset) const {
  // H has period π; reduce to [-π/2, π/2) before summing images
  double x = std::fmod(offset + kPi / 2, kPi);
  if (x < 0.0) x += kPi;
  x -= kPi / 2;
  const double h = periodized(x) / normalizer_;
  return h > 1.0 ? 1.0 : h;
}

}  // namespace swarmkin
