#include "swarmkin/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>

namespace swarmkin {

int bin_index(Phase theta, int n_bins) {
  const int b = static_cast<int>(theta.radians() * n_bins / kTwoPi);
  return std::min(b, n_bins - 1);
}

double bin_center(int bin, int n_bins) { return (bin + 0.5) * kTwoPi / n_bins; }

Histogram1D::Histogram1D(int n_bins) : n_bins_(n_bins) {
  if (n_bins < 1) throw std::invalid_argument("Histogram1D: n_bins must be >= 1");
  counts_.assign(static_cast<std::size_t>(n_bins), 0);
}

void Histogram1D::accumulate(Phase theta) {
  ++counts_[static_cast<std::size_t>(bin_index(theta, n_bins_))];
  ++total_;
}

void Histogram1D::merge(const Histogram1D& other) {
  if (other.n_bins_ != n_bins_) throw std::invalid_argument("Histogram1D::merge: bin mismatch");
  for (std::size_t b = 0; b < counts_.size(); ++b) counts_[b] += other.counts_[b];
  total_ += other.total_;
}

std::vector<double> Histogram1D::density() const {
  if (total_ == 0) throw std::logic_error("Histogram1D::density: empty histogram");
  std::vector<double> d(counts_.size());
  const double scale = static_cast<double>(n_bins_) / static_cast<double>(total_);
  for (std::size_t b = 0; b < d.size(); ++b) d[b] = static_cast<double>(counts_[b]) * scale;
  return d;
}

Histogram2D::Histogram2D(int n_bins) : n_bins_(n_bins) {
  if (n_bins < 1) throw std::invalid_argument("Histogram2D: n_bins must be >= 1");
  counts_.assign(static_cast<std::size_t>(n_bins) * n_bins, 0);
}

void Histogram2D::accumulate(Phase theta1, Phase theta2) {
  const auto i = static_cast<std::size_t>(bin_index(theta1, n_bins_));
  const auto j = static_cast<std::size_t>(bin_index(theta2, n_bins_));
  ++counts_[i * n_bins_ + j];
  ++total_;
}

void Histogram2D::accumulate_symmetric(Phase theta1, Phase theta2) {
  accumulate(theta1, theta2);
  accumulate(theta2, theta1);
}

void Histogram2D::merge(const Histogram2D& other) {
  if (other.n_bins_ != n_bins_) throw std::invalid_argument("Histogram2D::merge: bin mismatch");
  for (std::size_t b = 0; b < counts_.size(); ++b) counts_[b] += other.counts_[b];
  total_ += other.total_;
}

std::vector<double> Histogram2D::density() const {
  if (total_ == 0) throw std::logic_error("Histogram2D::density: empty histogram");
  std::vector<double> d(counts_.size());
  const double scale = static_cast<double>(counts_.size()) / static_cast<double>(total_);
  for (std::size_t b = 0; b < d.size(); ++b) d[b] = static_cast<double>(counts_[b]) * scale;
  return d;
}

ComparisonMetrics compare_densities(std::span<const double> empirical,
                                    std::span<const double> reference) {
  if (empirical.size() != reference.size() || empirical.empty())
    throw std::invalid_argument("compare: grid mismatch");
  ComparisonMetrics m;
  for (std::size_t b = 0; b < empirical.size(); ++b) {
    const double d = std::abs(empirical[b] - reference[b]);
    m.l1 += d;
    m.linf = std::max(m.linf, d);
  }
  m.l1 /= static_cast<double>(empirical.size());
  m.chi2 = std::numeric_limits<double>::quiet_NaN();
  return m;
}

namespace {

ComparisonMetrics compare_counts(std::span<const std::uint64_t> counts, std::uint64_t total,
                                 std::span<const double> empirical,
                                 std::span<const double> reference) {
  ComparisonMetrics m = compare_densities(empirical, reference);
  const double scale = static_cast<double>(total) / static_cast<double>(counts.size());
  m.chi2 = 0.0;
  int used = 0;
  for (std::size_t b = 0; b < counts.size(); ++b) {
    const double expected = reference[b] * scale;
    if (expected <= 0.0) continue;
    const double diff = static_cast<double>(counts[b]) - expected;
    m.chi2 += diff * diff / expected;
    ++used;
  }
  m.dof = std::max(used - 1, 0);
  return m;
}

}  // namespace

ComparisonMetrics compare(const Histogram1D& empirical, std::span<const double> reference) {
  if (reference.size() != static_cast<std::size_t>(empirical.n_bins()))
    throw std::invalid_argument("compare: grid mismatch");
  const auto e = empirical.density();
  return compare_counts(empirical.counts(), empirical.total(), e, reference);
}

ComparisonMetrics compare(const Histogram2D& empirical, std::span<const double> reference) {
  const auto n = static_cast<std::size_t>(empirical.n_bins());
  if (reference.size() != n * n) throw std::invalid_argument("compare: grid mismatch");
  const auto e = empirical.density();
  return compare_counts(empirical.counts(), empirical.total(), e, reference);
}

double chi2_critical(int dof, double level) {
  if (dof < 1) throw std::invalid_argument("chi2_critical: dof must be >= 1");
  boost::math::chi_squared dist(dof);
  return boost::math::quantile(dist, level);
}

double circular_std_of_difference(std::span<const double> density2d, int n_bins) {
  const auto n = static_cast<std::size_t>(n_bins);
  if (density2d.size() != n * n) throw std::invalid_argument("circular_std: grid mismatch");
  double c = 0.0, s = 0.0, mass = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double w = density2d[i * n + j];
      const double d = bin_center(static_cast<int>(i), n_bins) - bin_center(static_cast<int>(j), n_bins);
      c += w * std::cos(d);
      s += w * std::sin(d);
      mass += w;
    }
  }
  const double r = std::hypot(c, s) / mass;
  return std::sqrt(-2.0 * std::log(r));
}

}  // namespace swarmkin
