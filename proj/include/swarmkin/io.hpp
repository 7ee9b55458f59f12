// CSV readers and writers for binned densities, and an output directory that
// writes files atomically and can roll back.

#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace swarmkin {

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

/// "bin_center,density" rows.
void write_density_1d(std::ostream& os, std::span<const double> density);
/// "# density2d n_bins=<n>" then one row per θ1 bin.
void write_density_2d(std::ostream& os, std::span<const double> density, int n_bins);

struct DensityTable {
  int dims = 1;
  int n_bins = 0;
  std::vector<double> values;
};

/// Reads either format above; throws std::runtime_error on malformed input.
DensityTable read_density_csv(std::istream& is);
DensityTable read_density_file(const std::filesystem::path& path);

class OutputDir {
 public:
  explicit OutputDir(std::filesystem::path dir);

  /// Writes `name` through a temporary file and renames it into place.
  void write(const std::string& name, const std::function<void(std::ostream&)>& body);
  /// Removes every file written so far.
  void rollback();

  const std::filesystem::path& path() const { return dir_; }
  const std::vector<std::string>& files() const { return files_; }

 private:
  std::filesystem::path dir_;
  std::vector<std::string> files_;
};

}  // namespace swarmkin
