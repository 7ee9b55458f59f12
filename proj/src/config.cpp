#include "swarmkin/config.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>
#include <stdexcept>

#include "swarmkin/io.hpp"

namespace swarmkin {

std::string_view to_string(Command c) {
  switch (c) {
    case Command::Simulate: return "simulate";
    case Command::Oracle: return "oracle";
    case Command::Hierarchy: return "hierarchy";
    case Command::Master: return "master";
    case Command::Compare: return "compare";
  }
  return "?";
}

Command parse_command(std::string_view text) {
  for (const Command c : {Command::Simulate, Command::Oracle, Command::Hierarchy, Command::Master, Command::Compare})
    if (to_string(c) == text) return c;
  throw std::invalid_argument("unknown command '" + std::string(text) + "'");
}

DynamicsConfig ExperimentConfig::dynamics() const {
  DynamicsConfig d(kind, n_particles, gamma, kind == DynamicsKind::BiasedBDG ? gamma_prime : std::nullopt);
  d.equil_tolerance = equil_tolerance;
  d.kappa_factor = kappa_factor;
  d.lambda_min = lambda_min;
  if (max_iterations > 0) d.max_iterations = max_iterations;
  d.validate();
  return d;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad(std::string_view key, const std::string& why) {
  throw std::invalid_argument("config key '" + std::string(key) + "': " + why);
}

double to_double(std::string_view key, std::string_view v) {
  double out = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) {
    // allow simple fractions such as 1/20
    const auto slash = v.find('/');
    if (slash == std::string_view::npos) bad(key, "expected a number, got '" + std::string(v) + "'");
    const double num = to_double(key, trim(v.substr(0, slash)));
    const double den = to_double(key, trim(v.substr(slash + 1)));
    if (den == 0.0) bad(key, "division by zero");
    return num / den;
  }
  return out;
}

template <class Int>
Int to_int(std::string_view key, std::string_view v) {
  Int out{};
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) bad(key, "expected an integer, got '" + std::string(v) + "'");
  return out;
}

struct Field {
  std::string key;
  std::function<void(ExperimentConfig&, std::string_view)> set;
  std::function<std::optional<std::string>(const ExperimentConfig&)> get;  // nullopt: not emitted
};

const std::vector<Field>& fields() {
  using C = ExperimentConfig;
  static const std::vector<Field> table = {
      {"command", [](C& c, std::string_view v) { c.command = parse_command(v); },
       [](const C& c) { return std::optional<std::string>(to_string(c.command)); }},
      {"kind", [](C& c, std::string_view v) { c.kind = parse_dynamics_kind(v); },
       [](const C& c) { return std::optional<std::string>(to_string(c.kind)); }},
      {"n_particles", [](C& c, std::string_view v) { c.n_particles = to_int<int>("n_particles", v); },
       [](const C& c) { return std::optional(std::to_string(c.n_particles)); }},
      {"gamma", [](C& c, std::string_view v) { c.gamma = to_double("gamma", v); },
       [](const C& c) { return std::optional(format_double(c.gamma)); }},
      {"gamma_prime", [](C& c, std::string_view v) { c.gamma_prime = to_double("gamma_prime", v); },
       [](const C& c) { return c.gamma_prime ? std::optional(format_double(*c.gamma_prime)) : std::nullopt; }},
      {"equil_tolerance", [](C& c, std::string_view v) { c.equil_tolerance = to_double("equil_tolerance", v); },
       [](const C& c) { return std::optional(format_double(c.equil_tolerance)); }},
      {"kappa_factor", [](C& c, std::string_view v) { c.kappa_factor = to_double("kappa_factor", v); },
       [](const C& c) { return std::optional(format_double(c.kappa_factor)); }},
      {"lambda_min", [](C& c, std::string_view v) { c.lambda_min = to_double("lambda_min", v); },
       [](const C& c) { return std::optional(format_double(c.lambda_min)); }},
      {"max_iterations", [](C& c, std::string_view v) { c.max_iterations = to_int<std::uint64_t>("max_iterations", v); },
       [](const C& c) { return std::optional(std::to_string(c.max_iterations)); }},
      {"n_runs", [](C& c, std::string_view v) { c.n_runs = to_int<int>("n_runs", v); },
       [](const C& c) { return std::optional(std::to_string(c.n_runs)); }},
      {"seed", [](C& c, std::string_view v) { c.master_seed = to_int<std::uint64_t>("seed", v); },
       [](const C& c) { return std::optional(std::to_string(c.master_seed)); }},
      {"bins", [](C& c, std::string_view v) { c.bins = to_int<int>("bins", v); },
       [](const C& c) { return std::optional(std::to_string(c.bins)); }},
      {"output_dir", [](C& c, std::string_view v) { c.output_dir = std::string(v); },
       [](const C& c) { return std::optional(c.output_dir); }},
      {"n_max", [](C& c, std::string_view v) { c.n_max = to_int<int>("n_max", v); },
       [](const C& c) { return std::optional(std::to_string(c.n_max)); }},
      {"marginal_order", [](C& c, std::string_view v) { c.marginal_order = to_int<int>("marginal_order", v); },
       [](const C& c) { return std::optional(std::to_string(c.marginal_order)); }},
      {"grid_points", [](C& c, std::string_view v) { c.grid_points = to_int<int>("grid_points", v); },
       [](const C& c) { return std::optional(std::to_string(c.grid_points)); }},
      {"dt", [](C& c, std::string_view v) { c.dt = to_double("dt", v); },
       [](const C& c) { return std::optional(format_double(c.dt)); }},
      {"t_end", [](C& c, std::string_view v) { c.t_end = to_double("t_end", v); },
       [](const C& c) { return std::optional(format_double(c.t_end)); }},
      {"pde_modes", [](C& c, std::string_view v) { c.pde_modes = to_int<int>("pde_modes", v); },
       [](const C& c) { return std::optional(std::to_string(c.pde_modes)); }},
      {"master_points", [](C& c, std::string_view v) { c.master_points = to_int<int>("master_points", v); },
       [](const C& c) { return std::optional(std::to_string(c.master_points)); }},
      {"histogram_file", [](C& c, std::string_view v) { c.histogram_file = std::string(v); },
       [](const C& c) { return c.histogram_file.empty() ? std::nullopt : std::optional(c.histogram_file); }},
      {"reference", [](C& c, std::string_view v) { c.reference = std::string(v); },
       [](const C& c) { return std::optional(c.reference); }},
      {"reference_file", [](C& c, std::string_view v) { c.reference_file = std::string(v); },
       [](const C& c) { return c.reference_file.empty() ? std::nullopt : std::optional(c.reference_file); }},
  };
  return table;
}

const Field& find_field(std::string_view key) {
  for (const Field& f : fields())
    if (f.key == key) return f;
  throw std::invalid_argument("unknown config key '" + std::string(key) + "'");
}

void assign(ExperimentConfig& cfg, std::string_view key, std::string_view value) {
  const Field& f = find_field(key);
  if (value.empty()) bad(key, "empty value");
  try {
    f.set(cfg, value);
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    if (msg.rfind("config key", 0) == 0) throw;
    bad(key, msg);
  }
}

std::pair<std::string_view, std::string_view> split_assignment(std::string_view line, int line_no) {
  const auto eq = line.find('=');
  if (eq == std::string_view::npos)
    throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key = value");
  return {trim(line.substr(0, eq)), trim(line.substr(eq + 1))};
}

}  // namespace

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig cfg;
  std::set<std::string, std::less<>> seen;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto [key, value] = split_assignment(line, line_no);
    if (!seen.insert(std::string(key)).second) bad(key, "given more than once");
    assign(cfg, key, value);
  }
  for (const char* required : {"kind", "n_particles", "gamma"})
    if (!seen.contains(std::string_view(required))) bad(required, "missing required key");
  validate(cfg);
  return cfg;
}

void apply_override(ExperimentConfig& cfg, std::string_view assignment) {
  const auto [key, value] = split_assignment(trim(assignment), 0);
  assign(cfg, key, value);
  validate(cfg);
}

void validate(const ExperimentConfig& c) {
  if (c.n_particles < 2) bad("n_particles", "must be >= 2");
  if (!(c.gamma > 0.0) || !std::isfinite(c.gamma)) bad("gamma", "must be a finite value > 0");
  if (c.kind == DynamicsKind::BiasedBDG) {
    if (!c.gamma_prime) bad("gamma_prime", "required for kind = biased_bdg");
    if (!(*c.gamma_prime > 0.0) || !std::isfinite(*c.gamma_prime)) bad("gamma_prime", "must be a finite value > 0");
  }
  if (!(c.equil_tolerance > 0.0)) bad("equil_tolerance", "must be > 0");
  if (!(c.kappa_factor > 0.0) || !std::isfinite(c.kappa_factor)) bad("kappa_factor", "must be a finite value > 0");
  if (!(c.lambda_min >= 0.0) || !std::isfinite(c.lambda_min)) bad("lambda_min", "must be a finite value >= 0");
  if (c.n_runs < 1) bad("n_runs", "must be >= 1");
  if (c.bins < 1) bad("bins", "must be >= 1");
  if (c.output_dir.empty()) bad("output_dir", "must not be empty");
  if (c.n_max < 1) bad("n_max", "must be >= 1");
  if (c.marginal_order < 2 || c.marginal_order > 4) bad("marginal_order", "must be 2, 3 or 4");
  if (c.grid_points < 2) bad("grid_points", "must be >= 2");
  if (!(c.dt > 0.0)) bad("dt", "must be > 0");
  if (!(c.t_end >= 0.0)) bad("t_end", "must be >= 0");
  if (c.pde_modes < 1) bad("pde_modes", "must be >= 1");
  if (c.master_points < 4) bad("master_points", "must be >= 4");
  if (c.reference != "m_density" && c.reference != "uniform" && c.reference != "file")
    bad("reference", "must be m_density, uniform or file");
  if (c.reference == "file" && c.reference_file.empty()) bad("reference_file", "required for reference = file");
}

std::vector<std::pair<std::string, std::string>> config_entries(const ExperimentConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const Field& f : fields())
    if (auto v = f.get(cfg)) out.emplace_back(f.key, *v);
  return out;
}

std::string serialize(const ExperimentConfig& cfg) {
  std::ostringstream os;
  for (const auto& [k, v] : config_entries(cfg)) os << k << " = " << v << '\n';
  return os.str();
}

}  // namespace swarmkin
