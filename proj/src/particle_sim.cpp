#include "swarmkin/particle_sim.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace swarmkin {

std::string_view to_string(DynamicsKind kind) {
  switch (kind) {
    case DynamicsKind::UnbiasedBDG: return "bdg";
    case DynamicsKind::BiasedBDG: return "biased_bdg";
    case DynamicsKind::CL: return "cl";
  }
  return "?";
}

DynamicsKind parse_dynamics_kind(std::string_view text) {
  if (text == "bdg") return DynamicsKind::UnbiasedBDG;
  if (text == "biased_bdg") return DynamicsKind::BiasedBDG;
  if (text == "cl") return DynamicsKind::CL;
  throw std::invalid_argument("unknown dynamics kind '" + std::string(text) +
                              "' (expected bdg, biased_bdg or cl)");
}

std::string_view to_string(StopReason reason) {
  return reason == StopReason::Converged ? "converged" : "max_iterations";
}

EnsembleState EnsembleState::uniform(int n, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, kTwoPi);
  EnsembleState s;
  s.phases.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) s.phases.emplace_back(u(rng));
  return s;
}

DynamicsConfig::DynamicsConfig(DynamicsKind kind_, int n, double gamma,
                               std::optional<double> gamma_prime)
    : kind(kind_), n_particles(n), noise(gamma, n) {
  if (kind == DynamicsKind::BiasedBDG) {
    if (!gamma_prime) throw std::invalid_argument("biased_bdg requires gamma_prime");
    bias.emplace(*gamma_prime, n);
  }
  max_iterations = 5000ULL * static_cast<std::uint64_t>(n);
}

std::uint64_t DynamicsConfig::kappa() const {
  const double k = std::round(kappa_factor * n_particles);
  return k < 1.0 ? 1 : static_cast<std::uint64_t>(k);
}

std::uint64_t DynamicsConfig::min_iterations() const {
  return static_cast<std::uint64_t>(std::ceil(lambda_min * n_particles));
}

void DynamicsConfig::validate() const {
  if (n_particles < 2) throw std::invalid_argument("n_particles must be >= 2");
  if (noise.n_particles() != n_particles) throw std::invalid_argument("noise N mismatch");
  if (kind == DynamicsKind::BiasedBDG && !bias) throw std::invalid_argument("biased_bdg requires a bias model");
  if (!(equil_tolerance > 0.0)) throw std::invalid_argument("equil_tolerance must be > 0");
  if (!(kappa_factor > 0.0) || !std::isfinite(kappa_factor))
    throw std::invalid_argument("kappa_factor must be a finite value > 0");
  if (!(lambda_min >= 0.0) || !std::isfinite(lambda_min))
    throw std::invalid_argument("lambda_min must be a finite value >= 0");
}

std::pair<int, int> sample_unordered_pair(int n, Rng& rng) {
  if (n < 2) throw std::invalid_argument("sample_unordered_pair: n must be >= 2");
  std::uniform_int_distribution<int> first(0, n - 1);
  std::uniform_int_distribution<int> second(0, n - 2);
  const int i = first(rng);
  int j = second(rng);
  if (j >= i) ++j;
  return i < j ? std::pair{i, j} : std::pair{j, i};
}

std::pair<int, int> sample_ordered_pair(int n, Rng& rng) {
  if (n < 2) throw std::invalid_argument("sample_ordered_pair: n must be >= 2");
  std::uniform_int_distribution<int> first(0, n - 1);
  std::uniform_int_distribution<int> second(0, n - 2);
  const int i = first(rng);
  int j = second(rng);
  if (j >= i) ++j;
  return {i, j};
}

namespace {

// Both particles jump to the midpoint plus independent noise.
StepChange collide(EnsembleState& state, int i, int j, Phase mid, const NoiseModel& noise,
                   Rng& rng) {
  StepChange change;
  change.count = 2;
  change.index = {i, j};
  change.before = {state.phases[i], state.phases[j]};
  const double wi = noise.sample_increment(rng);
  const double wj = noise.sample_increment(rng);
  state.phases[i] = Phase(mid.radians() + wi);
  state.phases[j] = Phase(mid.radians() + wj);
  return change;
}

}  // namespace

StepChange bdg_step(EnsembleState& state, const DynamicsConfig& cfg, Rng& rng) {
  const auto [i, j] = sample_unordered_pair(state.size(), rng);
  ++state.iteration;
  const auto mid = pair_midpoint(state.phases[i], state.phases[j]);
  if (!mid) return {};
  return collide(state, i, j, *mid, cfg.noise, rng);
}

StepChange biased_bdg_step(EnsembleState& state, const DynamicsConfig& cfg, Rng& rng) {
  if (!cfg.bias) throw std::invalid_argument("biased_bdg_step: missing bias model");
  const auto [i, j] = sample_unordered_pair(state.size(), rng);
  ++state.iteration;
  const auto offset = half_angle_offset(state.phases[i], state.phases[j]);
  if (!offset) return {};
  std::uniform_real_distribution<double> u(0.0, 1.0);
  if (!(u(rng) < cfg.bias->acceptance(*offset))) return {};
  const auto mid = pair_midpoint(state.phases[i], state.phases[j]);
  return collide(state, i, j, *mid, cfg.noise, rng);
}

StepChange cl_step(EnsembleState& state, const DynamicsConfig& cfg, Rng& rng) {
  const auto [follower, leader] = sample_ordered_pair(state.size(), rng);
  ++state.iteration;
  StepChange change;
  change.count = 1;
  change.index[0] = follower;
  change.before[0] = state.phases[follower];
  state.phases[follower] =
      Phase(state.phases[leader].radians() + cfg.noise.sample_increment(rng));
  return change;
}

StepChange step(EnsembleState& state, const DynamicsConfig& cfg, Rng& rng) {
  switch (cfg.kind) {
    case DynamicsKind::UnbiasedBDG: return bdg_step(state, cfg, rng);
    case DynamicsKind::BiasedBDG: return biased_bdg_step(state, cfg, rng);
    case DynamicsKind::CL: return cl_step(state, cfg, rng);
  }
  throw std::logic_error("step: unknown dynamics kind");
}

MacroObservables macro_observables(const EnsembleState& state) {
  MacroObservables m;
  if (state.phases.empty()) return m;
  double c = 0.0, s = 0.0;
  for (const Phase p : state.phases) {
    c += std::cos(p.radians());
    s += std::sin(p.radians());
  }
  const double n = static_cast<double>(state.phases.size());
  m.mean_velocity = {c / n, s / n};
  const double norm2 = m.mean_velocity[0] * m.mean_velocity[0] + m.mean_velocity[1] * m.mean_velocity[1];
  m.order_parameter = norm2;
  if (std::sqrt(norm2) >= 1e-12) m.mean_direction = Phase(std::atan2(m.mean_velocity[1], m.mean_velocity[0]));
  return m;
}

namespace {

// Running Σcos θ, Σsin θ over cached per-particle values, resummed every N
// updates to bound drift.
class VelocitySum {
 public:
  explicit VelocitySum(const EnsembleState& state) : cos_(state.phases.size()), sin_(state.phases.size()) {
    for (std::size_t i = 0; i < state.phases.size(); ++i) {
      cos_[i] = std::cos(state.phases[i].radians());
      sin_[i] = std::sin(state.phases[i].radians());
    }
    resum();
  }

  void apply(const EnsembleState& state, const StepChange& change) {
    for (int k = 0; k < change.count; ++k) {
      const auto idx = static_cast<std::size_t>(change.index[k]);
      const double after = state.phases[idx].radians();
      const double c = std::cos(after);
      const double s = std::sin(after);
      c_ += c - cos_[idx];
      s_ += s - sin_[idx];
      cos_[idx] = c;
      sin_[idx] = s;
    }
    if (++updates_ >= cos_.size()) resum();
  }

  double order_parameter(std::size_t n) const {
    const double vx = c_ / static_cast<double>(n);
    const double vy = s_ / static_cast<double>(n);
    return vx * vx + vy * vy;
  }

 private:
  void resum() {
    c_ = s_ = 0.0;
    for (std::size_t i = 0; i < cos_.size(); ++i) {
      c_ += cos_[i];
      s_ += sin_[i];
    }
    updates_ = 0;
  }

  std::vector<double> cos_, sin_;
  double c_ = 0.0, s_ = 0.0;
  std::size_t updates_ = 0;
};

bool settled(double alpha_now, double alpha_before, double eps) {
  const double diff = std::abs(alpha_now - alpha_before);
  if (std::abs(alpha_before) < eps) return diff < eps;
  return diff / std::abs(alpha_before) < eps;
}

}  // namespace

EquilibriumRun run_to_equilibrium(const DynamicsConfig& cfg, Rng& rng,
                                  std::optional<EnsembleState> initial) {
  cfg.validate();
  EquilibriumRun run;
  run.state = initial ? std::move(*initial) : EnsembleState::uniform(cfg.n_particles, rng);
  if (run.state.size() != cfg.n_particles)
    throw std::invalid_argument("run_to_equilibrium: initial state size differs from n_particles");
  run.state.iteration = 0;

  const std::uint64_t kappa = cfg.kappa();
  const std::uint64_t n_min = cfg.min_iterations();
  const std::size_t n = run.state.phases.size();

  // α history over the last κ iterations; slot n % (κ+1) holds α after n steps
  std::vector<double> history(kappa + 1);
  VelocitySum sum(run.state);
  history[0] = sum.order_parameter(n);

  auto& diag = run.diagnostics;
  diag.stop_reason = StopReason::MaxIterations;
  for (std::uint64_t it = 1; it <= cfg.max_iterations; ++it) {
    const StepChange change = step(run.state, cfg, rng);
    sum.apply(run.state, change);
    const double alpha = sum.order_parameter(n);
    history[it % (kappa + 1)] = alpha;
    if (it >= n_min) {
      const std::uint64_t ref = it >= kappa ? it - kappa : 0;
      if (settled(alpha, history[ref % (kappa + 1)], cfg.equil_tolerance)) {
        diag.stop_reason = StopReason::Converged;
        break;
      }
    }
  }
  diag.iterations = run.state.iteration;
  diag.order_parameter = macro_observables(run.state).order_parameter;
  return run;
}

namespace {

struct RunSample {
  Phase single;
  Phase first;
  Phase second;
  RunDiagnostics diagnostics;
};

RunSample sample_run(const DynamicsConfig& cfg, std::uint64_t master_seed, int run_index) {
  Rng rng = make_stream(master_seed, static_cast<std::uint64_t>(run_index));
  EquilibriumRun run = run_to_equilibrium(cfg, rng);
  std::uniform_int_distribution<int> pick(0, cfg.n_particles - 1);
  RunSample s;
  s.single = run.state.phases[static_cast<std::size_t>(pick(rng))];
  const auto [a, b] = sample_unordered_pair(cfg.n_particles, rng);
  s.first = run.state.phases[static_cast<std::size_t>(a)];
  s.second = run.state.phases[static_cast<std::size_t>(b)];
  s.diagnostics = run.diagnostics;
  return s;
}

EnsembleResult reduce_samples(const std::vector<RunSample>& samples, int n_bins) {
  EnsembleResult result{Histogram1D(n_bins), Histogram2D(n_bins), {}, 0};
  result.runs.reserve(samples.size());
  for (const RunSample& s : samples) {
    result.one_particle.accumulate(s.single);
    result.two_particle.accumulate_symmetric(s.first, s.second);
    result.runs.push_back(s.diagnostics);
    if (s.diagnostics.stop_reason == StopReason::MaxIterations) ++result.max_iteration_hits;
  }
  return result;
}

void check_ensemble_args(const DynamicsConfig& cfg, int n_runs, int n_bins) {
  cfg.validate();
  if (n_runs < 1) throw std::invalid_argument("ensemble_marginals: n_runs must be >= 1");
  if (n_bins < 1) throw std::invalid_argument("ensemble_marginals: n_bins must be >= 1");
}

}  // namespace

EnsembleResult ensemble_marginals(const DynamicsConfig& cfg, int n_runs,
                                  std::uint64_t master_seed, int n_bins) {
  check_ensemble_args(cfg, n_runs, n_bins);
  std::vector<RunSample> samples(static_cast<std::size_t>(n_runs));
#pragma omp parallel for schedule(dynamic, 1)
  for (int r = 0; r < n_runs; ++r) {
    samples[static_cast<std::size_t>(r)] = sample_run(cfg, master_seed, r);
  }
  return reduce_samples(samples, n_bins);
}

EnsembleResult ensemble_marginals_serial(const DynamicsConfig& cfg, int n_runs,
                                         std::uint64_t master_seed, int n_bins) {
  check_ensemble_args(cfg, n_runs, n_bins);
  std::vector<RunSample> samples;
  samples.reserve(static_cast<std::size_t>(n_runs));
  for (int r = 0; r < n_runs; ++r) samples.push_back(sample_run(cfg, master_seed, r));
  return reduce_samples(samples, n_bins);
}

}  // namespace swarmkin
