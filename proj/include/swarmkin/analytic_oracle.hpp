// Closed-form equilibrium objects of the N → ∞ CL hierarchy.
//
// The stationary pair marginal is M(θ1 − θ2), the Green's function of
// −(σ²/2)∂² + 1 on the circle, with Fourier coefficients 1/(1 + σ̄²n²),
// σ̄ = σ/√2. Higher marginals are generated from the stationary Fourier
// recursion; their coefficients live on the lattice slice n1 + … + nk = 0.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "swarmkin/torus.hpp"

namespace swarmkin {

struct CorrelationParams {
  explicit CorrelationParams(double sigma);
  /// σ = 2πγ.
  static CorrelationParams from_gamma(double gamma);

  double sigma;
  double sigma_bar;  // σ/√2
};

/// Pair correlation normalized to mean 1 against dθ/(2π). Returns 0 when the
/// value underflows (see m_density_underflows).
double m_density(double theta, const CorrelationParams& p);
bool m_density_underflows(double theta, const CorrelationParams& p);

/// 1/(1 + σ̄²n²).
double m_fourier(int n, const CorrelationParams& p);

/// Fourier coefficients of a k-particle marginal on the box max|n_i| <= n_max,
/// restricted to n1 + … + nk = 0. Dense over the first k−1 indices.
class FourierMarginal {
 public:
  FourierMarginal(int k, int n_max);

  int k() const { return k_; }
  int n_max() const { return n_max_; }

  /// Coefficient at a k-tuple; zero when Σn ≠ 0 or outside the box.
  double at(std::span<const int> tuple) const;
  /// Throws when the tuple is not on the stored slice.
  void set(std::span<const int> tuple, double value);
  bool contains(std::span<const int> tuple) const;

  /// Visits every stored tuple (n1..nk) with its coefficient.
  template <class F>
  void for_each(F&& f) const {
    std::vector<int> t(static_cast<std::size_t>(k_));
    for (std::size_t idx = 0; idx < values_.size(); ++idx) {
      if (!decode(idx, t)) continue;
      f(std::span<const int>(t), values_[idx]);
    }
  }

  std::size_t stored_size() const;

 private:
  bool decode(std::size_t idx, std::vector<int>& tuple) const;
  std::size_t encode(std::span<const int> tuple) const;

  int k_;
  int n_max_;
  std::vector<double> values_;
};

/// F̂_[1] = δ(n).
FourierMarginal isotropic_marginal(int n_max);

/// Builds F̂_[k] from F̂_[1] = δ by the stationary recursion
/// F̂_[k](n) = Σ_{i<j}[F̂_[k−1](merge i into j) + F̂_[k−1](merge j into i)]
///           / ((σ²/2)Σn_i² + k(k−1)).
FourierMarginal marginal_recursion(int k, const CorrelationParams& p, int n_max);

/// One recursion level from a given F̂_[k−1].
FourierMarginal recursion_level(const FourierMarginal& lower, const CorrelationParams& p);

/// The (k−1)-tuple obtained by deleting entry `removed` and adding its value to
/// entry `target` (indices into the k-tuple).
std::vector<int> merge_indices(std::span<const int> tuple, int removed, int target);

/// Σ c(n) cos(n·θ) over the stored coefficients.
double eval_marginal(const FourierMarginal& fm, std::span<const double> thetas);

struct DeficiencyMetrics {
  double l1 = 0.0;
  double linf = 0.0;
};

/// Metrics of f2(θ1,θ2) − f1(θ1)f1(θ2) on an n×n grid (f2 row-major).
DeficiencyMetrics chaos_deficiency(std::span<const double> f2, std::span<const double> f1);

/// CSV rows "n1,…,nk,value" with a header line.
void write_fourier_csv(std::ostream& os, const FourierMarginal& fm);

}  // namespace swarmkin
