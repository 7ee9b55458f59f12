// Command dispatch: each command writes its CSV artifacts plus manifest.json
// into cfg.output_dir.

#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "swarmkin/config.hpp"

namespace swarmkin {

inline constexpr const char* kArtifactVersion = "swarmkin-1";

struct RunManifest {
  nlohmann::json json;  // config, artifact_version, files, diagnostics, metrics, wall_clock_seconds, error
  bool ok() const { return json.value("error", nlohmann::json()).is_null(); }
};

/// Runs cfg.command. On failure, data files are removed and the manifest
/// records the error; the manifest itself is always written when possible.
RunManifest run_command(const ExperimentConfig& cfg);

/// Reference density for `compare` and `simulate` metrics: m_density of the
/// limit noise at bin centers (2D) or uniform.
std::vector<double> m_density_reference(double gamma, int n_bins);

}  // namespace swarmkin
