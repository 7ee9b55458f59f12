#include "swarmkin/analytic_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace swarmkin {

CorrelationParams::CorrelationParams(double sigma_) : sigma(sigma_), sigma_bar(sigma_ / std::sqrt(2.0)) {
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw std::invalid_argument("CorrelationParams: sigma must be a finite value > 0");
}

CorrelationParams CorrelationParams::from_gamma(double gamma) { return CorrelationParams(kTwoPi * gamma); }

namespace {

// log of M_norm at θ in [0, 2π], factored so nothing overflows:
// M = (π/σ̄)(e^{(θ−2π)/σ̄} + e^{−θ/σ̄}) / (1 − e^{−2π/σ̄}).
double log_m_density(double theta, double sb) {
  const double a = (theta - kTwoPi) / sb;
  const double b = -theta / sb;
  const double hi = std::max(a, b);
  const double lse = hi + std::log1p(std::exp(std::min(a, b) - hi));
  return std::log(std::numbers::pi / sb) + lse - std::log1p(-std::exp(-kTwoPi / sb));
}

}  // namespace

double m_density(double theta, const CorrelationParams& p) {
  const double t = wrap(theta);
  const double v = std::exp(log_m_density(t, p.sigma_bar));
  return v < std::numeric_limits<double>::min() ? 0.0 : v;
}

bool m_density_underflows(double theta, const CorrelationParams& p) {
  return log_m_density(wrap(theta), p.sigma_bar) < std::log(std::numeric_limits<double>::min());
}

double m_fourier(int n, const CorrelationParams& p) {
  const double x = p.sigma_bar * n;
  return 1.0 / (1.0 + x * x);
}

FourierMarginal::FourierMarginal(int k, int n_max) : k_(k), n_max_(n_max) {
  if (k < 1) throw std::invalid_argument("FourierMarginal: k must be >= 1");
  if (n_max < 0) throw std::invalid_argument("FourierMarginal: n_max must be >= 0");
  const double side = 2.0 * n_max + 1.0;
  const double size = std::pow(side, k - 1);
  if (size > 5e7) throw std::invalid_argument("FourierMarginal: coefficient box too large");
  values_.assign(static_cast<std::size_t>(size), 0.0);
}

std::size_t FourierMarginal::encode(std::span<const int> tuple) const {
  const std::size_t side = 2 * static_cast<std::size_t>(n_max_) + 1;
  std::size_t idx = 0;
  for (int i = 0; i + 1 < k_; ++i) idx = idx * side + static_cast<std::size_t>(tuple[i] + n_max_);
  return idx;
}

bool FourierMarginal::decode(std::size_t idx, std::vector<int>& tuple) const {
  const std::size_t side = 2 * static_cast<std::size_t>(n_max_) + 1;
  int sum = 0;
  for (int i = k_ - 2; i >= 0; --i) {
    tuple[static_cast<std::size_t>(i)] = static_cast<int>(idx % side) - n_max_;
    sum += tuple[static_cast<std::size_t>(i)];
    idx /= side;
  }
  const int last = -sum;
  tuple[static_cast<std::size_t>(k_ - 1)] = last;
  return std::abs(last) <= n_max_;
}

bool FourierMarginal::contains(std::span<const int> tuple) const {
  if (static_cast<int>(tuple.size()) != k_) return false;
  int sum = 0;
  for (const int n : tuple) {
    if (std::abs(n) > n_max_) return false;
    sum += n;
  }
  return sum == 0;
}

double FourierMarginal::at(std::span<const int> tuple) const {
  if (!contains(tuple)) return 0.0;
  return values_[encode(tuple)];
}

void FourierMarginal::set(std::span<const int> tuple, double value) {
  if (!contains(tuple)) throw std::out_of_range("FourierMarginal::set: tuple not on the Σn = 0 slice");
  values_[encode(tuple)] = value;
}

std::size_t FourierMarginal::stored_size() const {
  std::size_t count = 0;
  for_each([&](std::span<const int>, double) { ++count; });
  return count;
}

FourierMarginal isotropic_marginal(int n_max) {
  FourierMarginal f(1, n_max);
  const int zero[1] = {0};
  f.set(zero, 1.0);
  return f;
}

std::vector<int> merge_indices(std::span<const int> tuple, int removed, int target) {
  std::vector<int> out;
  out.reserve(tuple.size() - 1);
  for (int m = 0; m < static_cast<int>(tuple.size()); ++m) {
    if (m == removed) continue;
    out.push_back(m == target ? tuple[m] + tuple[removed] : tuple[m]);
  }
  return out;
}

FourierMarginal recursion_level(const FourierMarginal& lower, const CorrelationParams& p) {
  const int k = lower.k() + 1;
  FourierMarginal out(k, lower.n_max());
  const double half_s2 = 0.5 * p.sigma * p.sigma;
  const double kk = static_cast<double>(k) * (k - 1);

  // Coefficients are computed once per sorted tuple and copied to every
  // permutation, so permutation invariance holds bit for bit.
  std::vector<int> sorted;
  out.for_each([&](std::span<const int> tuple, double) {
    sorted.assign(tuple.begin(), tuple.end());
    std::sort(sorted.begin(), sorted.end());
    if (!std::equal(sorted.begin(), sorted.end(), tuple.begin())) return;
    double numer = 0.0;
    double sum_sq = 0.0;
    for (int i = 0; i < k; ++i) sum_sq += static_cast<double>(sorted[i]) * sorted[i];
    for (int i = 0; i < k; ++i) {
      for (int j = i + 1; j < k; ++j) {
        numer += lower.at(merge_indices(sorted, i, j));
        numer += lower.at(merge_indices(sorted, j, i));
      }
    }
    const double value = numer / (half_s2 * sum_sq + kk);
    std::vector<int> perm = sorted;
    do {
      out.set(perm, value);
    } while (std::next_permutation(perm.begin(), perm.end()));
  });
  return out;
}

FourierMarginal marginal_recursion(int k, const CorrelationParams& p, int n_max) {
  if (k < 2) throw std::invalid_argument("marginal_recursion: k must be >= 2");
  if (n_max < 1) throw std::invalid_argument("marginal_recursion: n_max must be >= 1");
  FourierMarginal level = isotropic_marginal(n_max);
  for (int m = 2; m <= k; ++m) level = recursion_level(level, p);
  return level;
}

double eval_marginal(const FourierMarginal& fm, std::span<const double> thetas) {
  if (static_cast<int>(thetas.size()) != fm.k())
    throw std::invalid_argument("eval_marginal: expected one phase per particle");
  double sum = 0.0;
  fm.for_each([&](std::span<const int> tuple, double c) {
    if (c == 0.0) return;
    double arg = 0.0;
    for (std::size_t i = 0; i < tuple.size(); ++i) arg += tuple[i] * thetas[i];
    sum += c * std::cos(arg);
  });
  return sum;
}

DeficiencyMetrics chaos_deficiency(std::span<const double> f2, std::span<const double> f1) {
  const std::size_t n = f1.size();
  if (n == 0 || f2.size() != n * n) throw std::invalid_argument("chaos_deficiency: grid mismatch");
  DeficiencyMetrics m;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double d = std::abs(f2[i * n + j] - f1[i] * f1[j]);
      m.l1 += d;
      m.linf = std::max(m.linf, d);
    }
  }
  m.l1 /= static_cast<double>(n * n);
  return m;
}

void write_fourier_csv(std::ostream& os, const FourierMarginal& fm) {
  for (int i = 1; i <= fm.k(); ++i) os << 'n' << i << ',';
  os << "value\n";
  os.precision(17);
  fm.for_each([&](std::span<const int> tuple, double c) {
    for (const int n : tuple) os << n << ',';
    os << c << '\n';
  });
}

}  // namespace swarmkin
