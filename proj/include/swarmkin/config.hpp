// Flat `key = value` experiment configuration with '#' comments.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "swarmkin/particle_sim.hpp"

namespace swarmkin {

enum class Command { Simulate, Oracle, Hierarchy, Master, Compare };

std::string_view to_string(Command c);
Command parse_command(std::string_view text);

struct ExperimentConfig {
  Command command = Command::Simulate;

  // dynamics
  DynamicsKind kind = DynamicsKind::CL;
  int n_particles = 0;
  double gamma = 0.0;
  std::optional<double> gamma_prime;
  double equil_tolerance = 1e-3;
  double kappa_factor = 1.2;
  double lambda_min = 3.0;
  std::uint64_t max_iterations = 0;  // 0: 5000·N

  // ensemble
  int n_runs = 1000;
  std::uint64_t master_seed = 1;
  int bins = 64;
  std::string output_dir = ".";

  // oracle
  int n_max = 64;
  int marginal_order = 2;
  int grid_points = 256;

  // hierarchy and master
  double dt = 0.05;
  double t_end = 10.0;
  int pde_modes = 64;
  int master_points = 128;

  // compare
  std::string histogram_file;
  std::string reference = "m_density";  // m_density | uniform | file
  std::string reference_file;

  DynamicsConfig dynamics() const;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Throws std::invalid_argument naming the offending key.
ExperimentConfig parse_config(std::string_view text);

/// Applies one "key=value" override on top of cfg and revalidates.
void apply_override(ExperimentConfig& cfg, std::string_view assignment);

void validate(const ExperimentConfig& cfg);

/// Every key in a fixed order; parse_config(serialize(c)) == c.
std::string serialize(const ExperimentConfig& cfg);

/// (key, value) pairs in serialization order.
std::vector<std::pair<std::string, std::string>> config_entries(const ExperimentConfig& cfg);

}  // namespace swarmkin
