// Discrete-time BDG, biased BDG and CL dynamics, the equilibrium detector and
// the ensemble protocol that collects one- and two-particle marginals.
//
// One iteration is one attempted pair interaction (a rejected biased collision
// still counts). Step functions mutate the state in place.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "swarmkin/estimators.hpp"
#include "swarmkin/rng.hpp"
#include "swarmkin/torus.hpp"

namespace swarmkin {

enum class DynamicsKind { UnbiasedBDG, BiasedBDG, CL };

std::string_view to_string(DynamicsKind kind);
DynamicsKind parse_dynamics_kind(std::string_view text);

struct EnsembleState {
  std::vector<Phase> phases;
  std::uint64_t iteration = 0;

  int size() const { return static_cast<int>(phases.size()); }

  /// i.i.d. uniform phases.
  static EnsembleState uniform(int n, Rng& rng);
};

struct DynamicsConfig {
  DynamicsConfig(DynamicsKind kind, int n_particles, double gamma,
                 std::optional<double> gamma_prime = std::nullopt);

  DynamicsKind kind;
  int n_particles;
  NoiseModel noise;
  std::optional<BiasModel> bias;  // BiasedBDG only
  double equil_tolerance = 1e-3;
  double kappa_factor = 1.2;
  double lambda_min = 3.0;
  std::uint64_t max_iterations;  // default 5000·N

  /// round(kappa_factor·N), at least 1.
  std::uint64_t kappa() const;
  /// ceil(lambda_min·N).
  std::uint64_t min_iterations() const;
  void validate() const;
};

/// Unordered pair, each with probability 2/(N(N−1)); returned with i < j.
std::pair<int, int> sample_unordered_pair(int n, Rng& rng);
/// Ordered pair, each with probability 1/(N(N−1)).
std::pair<int, int> sample_ordered_pair(int n, Rng& rng);

/// Which entries a step rewrote, with their previous values.
struct StepChange {
  int count = 0;
  std::array<int, 2> index{};
  std::array<Phase, 2> before{};
};

StepChange bdg_step(EnsembleState& state, const DynamicsConfig& cfg, Rng& rng);
StepChange biased_bdg_step(EnsembleState& state, const DynamicsConfig& cfg, Rng& rng);
StepChange cl_step(EnsembleState& state, const DynamicsConfig& cfg, Rng& rng);
/// Dispatches on cfg.kind.
StepChange step(EnsembleState& state, const DynamicsConfig& cfg, Rng& rng);

struct MacroObservables {
  std::array<double, 2> mean_velocity{};
  std::optional<Phase> mean_direction;  // empty when |v̄| < 1e-12
  double order_parameter = 0.0;         // |v̄|²
};

MacroObservables macro_observables(const EnsembleState& state);

enum class StopReason { Converged, MaxIterations };
std::string_view to_string(StopReason reason);

struct RunDiagnostics {
  std::uint64_t iterations = 0;
  StopReason stop_reason = StopReason::Converged;
  double order_parameter = 0.0;
};

struct EquilibriumRun {
  EnsembleState state;
  RunDiagnostics diagnostics;
};

/// Steps until |α(n) − α(n−κ)| / |α(n−κ)| < ε with n ≥ ceil(λN); the test is
/// absolute when |α(n−κ)| < ε. Starts from i.i.d. uniform phases when no
/// initial state is supplied.
EquilibriumRun run_to_equilibrium(const DynamicsConfig& cfg, Rng& rng,
                                  std::optional<EnsembleState> initial = std::nullopt);

struct EnsembleResult {
  Histogram1D one_particle;
  Histogram2D two_particle;
  std::vector<RunDiagnostics> runs;
  std::uint64_t max_iteration_hits = 0;
};

/// Runs `n_runs` independent equilibrations in parallel (run r uses
/// make_stream(master_seed, r)), then samples one particle and one symmetrized
/// unordered pair per run. Results are merged in run order, so the output is
/// independent of the thread count.
EnsembleResult ensemble_marginals(const DynamicsConfig& cfg, int n_runs,
                                  std::uint64_t master_seed, int n_bins = 64);

/// Single-threaded reference for ensemble_marginals; identical output.
EnsembleResult ensemble_marginals_serial(const DynamicsConfig& cfg, int n_runs,
                                         std::uint64_t master_seed, int n_bins = 64);

}  // namespace swarmkin
