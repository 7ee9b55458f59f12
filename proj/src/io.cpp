#include "swarmkin/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "swarmkin/estimators.hpp"

namespace swarmkin {

std::string format_double(double v) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

void write_density_1d(std::ostream& os, std::span<const double> density) {
  const int n = static_cast<int>(density.size());
  os << "bin_center,density\n";
  for (int b = 0; b < n; ++b) os << format_double(bin_center(b, n)) << ',' << format_double(density[static_cast<std::size_t>(b)]) << '\n';
}

void write_density_2d(std::ostream& os, std::span<const double> density, int n_bins) {
  if (density.size() != static_cast<std::size_t>(n_bins) * n_bins)
    throw std::invalid_argument("write_density_2d: size is not n_bins²");
  os << "# density2d n_bins=" << n_bins << '\n';
  for (int i = 0; i < n_bins; ++i) {
    for (int j = 0; j < n_bins; ++j) {
      if (j) os << ' ';
      os << format_double(density[static_cast<std::size_t>(i) * n_bins + j]);
    }
    os << '\n';
  }
}

namespace {

double parse_number(std::string_view s, int line) {
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw std::runtime_error("density csv line " + std::to_string(line) + ": bad number '" + std::string(s) + "'");
  return v;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos <= line.size()) {
    const auto next = line.find(sep, pos);
    const auto piece = line.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos);
    if (!piece.empty()) out.push_back(piece);
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

}  // namespace

DensityTable read_density_csv(std::istream& is) {
  std::string header;
  if (!std::getline(is, header)) throw std::runtime_error("density csv: empty input");
  DensityTable t;
  std::string line;
  int line_no = 1;
  if (header == "bin_center,density") {
    t.dims = 1;
    while (std::getline(is, line)) {
      ++line_no;
      if (line.empty()) continue;
      const auto cells = split(line, ',');
      if (cells.size() != 2) throw std::runtime_error("density csv line " + std::to_string(line_no) + ": expected 2 columns");
      t.values.push_back(parse_number(cells[1], line_no));
    }
    t.n_bins = static_cast<int>(t.values.size());
  } else if (header.rfind("# density2d n_bins=", 0) == 0) {
    t.dims = 2;
    t.n_bins = static_cast<int>(parse_number(std::string_view(header).substr(19), 1));
    while (std::getline(is, line)) {
      ++line_no;
      if (line.empty()) continue;
      const auto cells = split(line, ' ');
      if (static_cast<int>(cells.size()) != t.n_bins)
        throw std::runtime_error("density csv line " + std::to_string(line_no) + ": expected n_bins columns");
      for (const auto c : cells) t.values.push_back(parse_number(c, line_no));
    }
    if (t.values.size() != static_cast<std::size_t>(t.n_bins) * t.n_bins)
      throw std::runtime_error("density csv: expected n_bins rows");
  } else {
    throw std::runtime_error("density csv: unrecognized header '" + header + "'");
  }
  if (t.n_bins < 1) throw std::runtime_error("density csv: no bins");
  return t;
}

DensityTable read_density_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_density_csv(in);
}

OutputDir::OutputDir(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
}

void OutputDir::write(const std::string& name, const std::function<void(std::ostream&)>& body) {
  const auto final_path = dir_ / name;
  const auto tmp_path = dir_ / (name + ".tmp");
  try {
    {
      std::ofstream out(tmp_path, std::ios::binary | std::ios::trunc);
      if (!out) throw std::runtime_error("cannot open " + tmp_path.string() + " for writing");
      body(out);
      out.flush();
      if (!out) throw std::runtime_error("write failed: " + tmp_path.string());
    }
    std::filesystem::rename(tmp_path, final_path);
  } catch (...) {
    std::error_code ec;
    std::filesystem::remove(tmp_path, ec);
    throw;
  }
  files_.push_back(name);
}

void OutputDir::rollback() {
  for (const auto& name : files_) {
    std::error_code ec;
    std::filesystem::remove(dir_ / name, ec);
  }
  files_.clear();
}

}  // namespace swarmkin
