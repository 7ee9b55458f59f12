// Circular arithmetic and the wrapped-Gaussian noise / bias laws.
//
// Every density in this library is normalized against dθ/(2π), so the
// uniform law on the circle has density 1.

#pragma once

#include <numbers>
#include <optional>
#include <random>

namespace swarmkin {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Reduce an angle to [0, 2π). Throws std::domain_error on non-finite input.
double wrap(double x);

/// Reduce an angle to [-π, π).
double wrap_signed(double x);

/// An angle in canonical form, 0 <= theta < 2π.
class Phase {
 public:
  constexpr Phase() = default;
  explicit Phase(double radians) : theta_(wrap(radians)) {}

  constexpr double radians() const { return theta_; }

  friend constexpr bool operator==(Phase, Phase) = default;

 private:
  double theta_ = 0.0;
};

/// Phase of e^{iθi} + e^{iθj}, or nullopt when the two velocities are antipodal
/// (|e^{iθi} + e^{iθj}| < 1e-12).
std::optional<Phase> pair_midpoint(Phase theta_i, Phase theta_j);

/// Signed angle from the pair midpoint to v_i, in (-π/2, π/2]. This is the
/// representative of (θi - θj)/2 modulo π. nullopt for antipodal inputs.
std::optional<double> half_angle_offset(Phase theta_i, Phase theta_j);

/// 2π Σ_k N(θ + 2kπ; 0, σ²), summed until the last term drops below 1e-15 of the
/// running sum (at least `min_terms` images on each side).
double wrapped_gaussian_density(double theta, double sigma, int min_terms = 8);

/// Wrapped Gaussian with σ = 2πγ/√N.
class NoiseModel {
 public:
  NoiseModel(double gamma, int n_particles, int truncation_k = 8);

  double gamma() const { return gamma_; }
  int n_particles() const { return n_particles_; }
  double sigma() const { return sigma_; }
  int truncation_k() const { return truncation_k_; }

  double density(double theta) const {
    return wrapped_gaussian_density(theta, sigma_, truncation_k_);
  }

  /// Exact draw: wrap of a N(0, σ²) variate.
  template <class Rng>
  Phase sample(Rng& rng) const {
    std::normal_distribution<double> normal(0.0, sigma_);
    return Phase(normal(rng));
  }

  /// Raw N(0, σ²) increment; callers add it to a phase and wrap.
  template <class Rng>
  double sample_increment(Rng& rng) const {
    std::normal_distribution<double> normal(0.0, sigma_);
    return normal(rng);
  }

 private:
  double gamma_;
  int n_particles_;
  double sigma_;
  int truncation_k_;
};

/// Acceptance law of the biased collision. τ = 2πγ'/√N and
/// H(θ) = Σ_k exp(-(θ+kπ)²/2τ²) / Σ_k exp(-(kπ)²/2τ²), so H(0) = 1.
class BiasModel {
 public:
  BiasModel(double gamma_prime, int n_particles);

  double gamma_prime() const { return gamma_prime_; }
  int n_particles() const { return n_particles_; }
  double tau() const { return tau_; }

  double acceptance(double offset) const;

 private:
  double periodized(double offset) const;

  double gamma_prime_;
  int n_particles_;
  double tau_;
  double normalizer_;
};

inline double acceptance_probability(double offset, const BiasModel& bias) {
  return bias.acceptance(offset);
}

}  // namespace swarmkin
