#include "modlab/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "modlab/errors.hpp"

namespace modlab {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  if (trim(s).empty()) return out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

template <class E>
struct EnumName {
  E value;
  const char* name;
};

constexpr EnumName<ExperimentKind> kKinds[] = {
    {ExperimentKind::Conditions, "conditions"},
    {ExperimentKind::DensityBound, "density-bound"},
    {ExperimentKind::CdfLipschitz, "cdf-lipschitz"},
    {ExperimentKind::StableCounterexample, "stable-counterexample"},
    {ExperimentKind::Polya, "polya"},
    {ExperimentKind::MatrixNormal, "matrix-normal"},
    {ExperimentKind::WishartOracle, "wishart-oracle"},
};
constexpr EnumName<ReportFormat> kFormats[] = {{ReportFormat::Csv, "csv"}, {ReportFormat::Json, "json"}};
constexpr EnumName<DataFamily> kFamilies[] = {
    {DataFamily::SphereBingham, "sphere-bingham"},
    {DataFamily::BallUniform, "ball-uniform"},
    {DataFamily::DilatedBingham, "dilated-bingham"},
    {DataFamily::HypercubeRandomSide, "hypercube"},
    {DataFamily::GaussianProfile, "gaussian-profile"},
    {DataFamily::StudentT, "student-t"},
    {DataFamily::LaplaceData, "laplace"},
};
constexpr EnumName<Profile> kProfiles[] = {
    {Profile::LogHarmonic, "log-harmonic"}, {Profile::Power, "power"}, {Profile::Isotropic, "isotropic"}};
constexpr EnumName<RadiusRule> kRadius[] = {{RadiusRule::Constant, "constant"}, {RadiusRule::InverseD, "inverse-d"}};
constexpr EnumName<RadialLaw> kRadial[] = {{RadialLaw::Constant, "constant"}, {RadialLaw::Uniform, "uniform"}};
constexpr EnumName<SideLaw> kSide[] = {{SideLaw::Deterministic, "deterministic"}, {SideLaw::Uniform, "uniform"}};
constexpr EnumName<ModFamily> kMods[] = {{ModFamily::Gaussian, "gaussian"},
                                         {ModFamily::StudentT, "student-t"},
                                         {ModFamily::Laplace, "laplace"},
                                         {ModFamily::Stable, "stable"}};

template <class E, std::size_t N>
E enum_from(const EnumName<E> (&table)[N], const std::string& s, std::size_t line, const char* what) {
  for (const auto& e : table)
    if (s == e.name) return e.value;
  std::string options;
  for (const auto& e : table) options += std::string(options.empty() ? "" : ", ") + e.name;
  throw ConfigError(line, fmt::format("unknown {} '{}' (expected one of: {})", what, s, options));
}

template <class E, std::size_t N>
std::string enum_name(const EnumName<E> (&table)[N], E v) {
  for (const auto& e : table)
    if (e.value == v) return e.name;
  return "?";
}

double to_double(const std::string& s, std::size_t line) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end || s.empty()) throw ConfigError(line, fmt::format("invalid number '{}'", s));
  return v;
}

std::uint64_t to_u64(const std::string& s, std::size_t line) {
  std::uint64_t v = 0;
  const auto* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end || s.empty())
    throw ConfigError(line, fmt::format("invalid non-negative integer '{}'", s));
  return v;
}

int to_int(const std::string& s, std::size_t line) {
  const auto v = to_u64(s, line);
  if (v > 1000000) throw ConfigError(line, fmt::format("integer '{}' out of range", s));
  return static_cast<int>(v);
}

std::vector<double> to_doubles(const std::string& s, std::size_t line) {
  std::vector<double> out;
  for (const auto& item : split(s, ',')) out.push_back(to_double(item, line));
  return out;
}

std::string fmt_double(double v) { return fmt::format("{:.17g}", v); }

std::string join_doubles(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt_double(v[i]);
  return s;
}

void set_field(ExperimentConfig& c, const std::string& section, const std::string& key, const std::string& value,
               std::size_t line) {
  auto& m = c.model;
  if (section == "experiment") {
    if (key == "kind") return void(c.kind = enum_from(kKinds, value, line, "experiment kind"));
    if (key == "seed") return void(c.seed = to_u64(value, line));
    if (key == "reps") return void(c.reps = to_u64(value, line));
    if (key == "workers") return void(c.workers = static_cast<unsigned>(to_int(value, line)));
    if (key == "output") return void(c.output = value);
    if (key == "format") return void(c.format = enum_from(kFormats, value, line, "format"));
  } else if (section == "model") {
    if (key == "family") return void(m.family = enum_from(kFamilies, value, line, "data family"));
    if (key == "sigma") return void(m.sigma = to_double(value, line));
    if (key == "radius_rule") return void(m.radius_rule = enum_from(kRadius, value, line, "radius rule"));
    if (key == "radius_rate") return void(m.radius_rate = to_double(value, line));
    if (key == "bingham_c") return void(m.bingham_c = to_double(value, line));
    if (key == "beta") return void(m.beta = to_double(value, line));
    if (key == "radial_law") return void(m.radial_law = enum_from(kRadial, value, line, "radial law"));
    if (key == "side_law") return void(m.side_law = enum_from(kSide, value, line, "side law"));
    if (key == "profile") return void(m.profile = enum_from(kProfiles, value, line, "profile"));
    if (key == "power_r") return void(m.power_r = to_double(value, line));
    if (key == "nu") return void(m.nu = to_double(value, line));
  } else if (section == "modulator") {
    if (key == "family") return void(c.modulator.family = enum_from(kMods, value, line, "modulator family"));
    if (key == "nu") return void(c.modulator.nu = to_double(value, line));
    if (key == "cf_index") return void(c.modulator.cf_index = to_double(value, line));
  } else if (section == "schedule") {
    if (key == "d") {
      c.schedule.clear();
      for (const auto& item : split(value, ',')) c.schedule.push_back(to_u64(item, line));
      return;
    }
  } else if (section == "params") {
    if (key == "j") return void(c.j = to_int(value, line));
    if (key == "k") return void(c.k = to_int(value, line));
    if (key == "l") return void(c.l = to_int(value, line));
    if (key == "t") return void(c.t = to_double(value, line));
    if (key == "y_grid") return void(c.y_grid = to_doubles(value, line));
    if (key == "grid_points") return void(c.grid_points = to_u64(value, line));
    if (key == "pairs") {
      c.pairs.clear();
      for (const auto& item : split(value, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) throw ConfigError(line, fmt::format("pair '{}' must be a:y", item));
        c.pairs.emplace_back(to_double(trim(item.substr(0, colon)), line),
                             to_double(trim(item.substr(colon + 1)), line));
      }
      return;
    }
    if (key == "cdf_y") return void(c.cdf_y = to_doubles(value, line));
    if (key == "margin") return void(c.margin = to_double(value, line));
    if (key == "t_max") return void(c.t_max = to_double(value, line));
    if (key == "t_step") return void(c.t_step = to_double(value, line));
    if (key == "polya_t") return void(c.polya_t = to_doubles(value, line));
  } else {
    throw ConfigError(line, fmt::format("unknown section [{}]", section));
  }
  throw ConfigError(line, fmt::format("unknown key '{}' in section [{}]", key, section));
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig c;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  std::set<std::string> seen;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = trim(raw);
    if (s.empty() || s[0] == '#' || s[0] == ';') continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError(line, "malformed section header");
      section = trim(s.substr(1, s.size() - 2));
      static const std::set<std::string> known{"experiment", "model", "modulator", "schedule", "params"};
      if (!known.count(section)) throw ConfigError(line, fmt::format("unknown section [{}]", section));
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError(line, fmt::format("expected 'key = value', got '{}'", s));
    if (section.empty()) throw ConfigError(line, "key outside of any section");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key.empty()) throw ConfigError(line, "empty key");
    if (!seen.insert(section + "." + key).second)
      throw ConfigError(line, fmt::format("duplicate key '{}' in section [{}]", key, section));
    set_field(c, section, key, value, line);
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError(0, fmt::format("cannot open config file '{}'", path));
  std::stringstream ss;
  ss << f.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path, e);
  }
}

std::string serialize_config(const ExperimentConfig& c) {
  const auto& m = c.model;
  std::string s;
  auto kv = [&s](const std::string& k, const std::string& v) { s += k + " = " + v + "\n"; };
  s += "[experiment]\n";
  kv("kind", enum_name(kKinds, c.kind));
  if (c.seed) kv("seed", std::to_string(*c.seed));
  kv("reps", std::to_string(c.reps));
  kv("workers", std::to_string(c.workers));
  if (!c.output.empty()) kv("output", c.output);
  kv("format", enum_name(kFormats, c.format));
  s += "\n[model]\n";
  kv("family", enum_name(kFamilies, m.family));
  kv("sigma", fmt_double(m.sigma));
  kv("radius_rule", enum_name(kRadius, m.radius_rule));
  kv("radius_rate", fmt_double(m.radius_rate));
  kv("bingham_c", fmt_double(m.bingham_c));
  kv("beta", fmt_double(m.beta));
  kv("radial_law", enum_name(kRadial, m.radial_law));
  kv("side_law", enum_name(kSide, m.side_law));
  kv("profile", enum_name(kProfiles, m.profile));
  kv("power_r", fmt_double(m.power_r));
  kv("nu", fmt_double(m.nu));
  s += "\n[modulator]\n";
  kv("family", enum_name(kMods, c.modulator.family));
  kv("nu", fmt_double(c.modulator.nu));
  kv("cf_index", fmt_double(c.modulator.cf_index));
  s += "\n[schedule]\n";
  std::string d;
  for (std::size_t i = 0; i < c.schedule.size(); ++i) d += (i ? ", " : "") + std::to_string(c.schedule[i]);
  kv("d", d);
  s += "\n[params]\n";
  kv("j", std::to_string(c.j));
  kv("k", std::to_string(c.k));
  kv("l", std::to_string(c.l));
  kv("t", fmt_double(c.t));
  if (c.y_grid) kv("y_grid", join_doubles(*c.y_grid));
  kv("grid_points", std::to_string(c.grid_points));
  std::string pairs;
  for (std::size_t i = 0; i < c.pairs.size(); ++i)
    pairs += (i ? ", " : "") + fmt_double(c.pairs[i].first) + ":" + fmt_double(c.pairs[i].second);
  kv("pairs", pairs);
  kv("cdf_y", join_doubles(c.cdf_y));
  kv("margin", fmt_double(c.margin));
  kv("t_max", fmt_double(c.t_max));
  kv("t_step", fmt_double(c.t_step));
  kv("polya_t", join_doubles(c.polya_t));
  // Trailing spaces after '=' on empty lists are trimmed by the parser.
  std::string out;
  std::istringstream in(s);
  std::string ln;
  while (std::getline(in, ln)) out += trim(ln) + "\n";
  return out;
}

void apply_override(ExperimentConfig& c, const std::string& assignment) {
  const auto eq = assignment.find('=');
  const auto dot = assignment.find('.');
  if (eq == std::string::npos || dot == std::string::npos || dot > eq)
    throw ConfigError(0, fmt::format("override '{}' must look like section.key=value", assignment));
  set_field(c, trim(assignment.substr(0, dot)), trim(assignment.substr(dot + 1, eq - dot - 1)),
            trim(assignment.substr(eq + 1)), 0);
}

void validate(const ExperimentConfig& c) {
  if (!c.seed) throw ConfigError(0, "experiment.seed is mandatory");
  if (c.reps < 100) throw ConfigError(0, "experiment.reps must be >= 100");
  if (c.workers < 1) throw ConfigError(0, "experiment.workers must be >= 1");
  if (c.kind != ExperimentKind::Polya) {
    if (c.schedule.empty()) throw ConfigError(0, "schedule.d must list at least one dimension");
    for (std::size_t i = 1; i < c.schedule.size(); ++i)
      if (c.schedule[i] <= c.schedule[i - 1]) throw ConfigError(0, "schedule.d must be strictly increasing");
    if (c.schedule.front() < 2) throw ConfigError(0, "schedule.d entries must be >= 2");
  }
  if (c.j < 1 || c.j > 16) throw ConfigError(0, "params.j must lie in [1, 16]");
  if (c.k < 1 || c.k > 16) throw ConfigError(0, "params.k must lie in [1, 16]");
  if (c.l < 1 || c.l > 16) throw ConfigError(0, "params.l must lie in [1, 16]");
  if (c.y_grid && c.y_grid->empty()) throw ConfigError(0, "params.y_grid must not be empty when given");
  if (c.grid_points < 2) throw ConfigError(0, "params.grid_points must be >= 2");
  for (const auto& [a, y] : c.pairs)
    if (!(y >= a)) throw ConfigError(0, "params.pairs entries need a <= y");
  if (!(c.t_step > 0.0) || !(c.t_max >= 0.0)) throw ConfigError(0, "params.t_step must be > 0 and t_max >= 0");
  if (!(c.margin >= 0.0)) throw ConfigError(0, "params.margin must be >= 0");
  try {
    validate(c.model);
    validate(c.modulator);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(0, e.what());
  }
  if (c.kind == ExperimentKind::DensityBound || c.kind == ExperimentKind::WishartOracle) {
    const int need = c.kind == ExperimentKind::DensityBound ? c.j : c.k;
    if (c.schedule.front() < static_cast<std::size_t>(need))
      throw ConfigError(0, "every schedule.d must be >= the Gram order");
  }
}

ExperimentConfig default_config(ExperimentKind kind) {
  ExperimentConfig c;
  c.kind = kind;
  switch (kind) {
    case ExperimentKind::Conditions:
      c.schedule = {16, 64, 256};
      break;
    case ExperimentKind::DensityBound:
      c.schedule = {64, 256, 1024};
      c.j = 2;
      break;
    case ExperimentKind::CdfLipschitz:
      c.schedule = {256};
      c.pairs = {{-1.0, 1.0}, {0.0, 1.0}, {0.0, 2.0}};
      break;
    case ExperimentKind::StableCounterexample:
      c.schedule = {512};
      c.modulator = {ModFamily::Stable, 6.0, 1.0};
      break;
    case ExperimentKind::Polya:
      c.modulator = {ModFamily::Stable, 6.0, 1.0};
      break;
    case ExperimentKind::MatrixNormal:
      c.schedule = {1024};
      break;
    case ExperimentKind::WishartOracle:
      c.schedule = {16};
      c.model.family = DataFamily::GaussianProfile;
      c.model.profile = Profile::Isotropic;
      c.k = 2;
      break;
  }
  return c;
}

std::string to_string(ExperimentKind k) { return enum_name(kKinds, k); }
ExperimentKind parse_kind(const std::string& s) { return enum_from(kKinds, s, 0, "experiment kind"); }
std::string to_string(ReportFormat f) { return enum_name(kFormats, f); }
ReportFormat parse_format(const std::string& s) { return enum_from(kFormats, s, 0, "format"); }

std::uint64_t config_hash(const ExperimentConfig& c) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : serialize_config(c)) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace modlab
