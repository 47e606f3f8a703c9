#include "rlab/config.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace rlab {

std::string to_string(Command command) {
  switch (command) {
    case Command::Norm:
      return "norm";
    case Command::Maximize:
      return "maximize";
    case Command::ScanM:
      return "scan-m";
    case Command::EndpointDemo:
      return "endpoint-demo";
    case Command::Diagnose:
      return "diagnose";
  }
  return "norm";
}

Command command_from_string(const std::string& name) {
  for (Command c : {Command::Norm, Command::Maximize, Command::ScanM, Command::EndpointDemo, Command::Diagnose})
    if (to_string(c) == name) return c;
  throw ConfigError("unknown command '" + name + "'", 0);
}

GridSpec default_grid(Family family, std::size_t dim) {
  switch (family) {
    case Family::Parabola1D:
      return {{20.0, 20.0}, {256, 256}};
    case Family::Paraboloid2D:
      return {{10.0, 10.0, 10.0}, {64, 64, 64}};
    case Family::Cone3D:
      return {{8.0, 8.0, 8.0, 8.0}, {48, 48, 48, 48}};
    case Family::Custom:
      break;
  }
  const std::size_t n = dim <= 2 ? 64 : (dim == 3 ? 32 : 16);
  return {std::vector<double>(dim, 10.0), std::vector<std::size_t>(dim, n)};
}

namespace {

const std::map<std::string, std::vector<std::string>>& known_keys() {
  static const std::map<std::string, std::vector<std::string>> keys{
      {"measure", {"family", "M", "resolution", "atoms"}},
      {"grid", {"half_extent", "points"}},
      {"run",
       {"p", "max_iters", "ratio_tol", "cauchy_tol", "recenter_every", "seed", "init", "density", "path",
        "check_iterates", "weak_window"}},
      {"output", {"prefix"}},
  };
  return keys;
}

struct Entry {
  std::string value;
  std::size_t line = 0;  // 0 = command-line override
};

using Table = std::map<std::string, Entry>;  // "section.key" -> entry

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string qualify(const std::string& key, std::size_t line) {
  const auto dot = key.find('.');
  if (dot != std::string::npos) {
    const std::string section = key.substr(0, dot);
    const std::string name = key.substr(dot + 1);
    auto it = known_keys().find(section);
    if (it == known_keys().end() || std::find(it->second.begin(), it->second.end(), name) == it->second.end())
      throw ConfigError("unknown key '" + key + "'", line);
    return key;
  }
  for (const auto& [section, names] : known_keys())
    if (std::find(names.begin(), names.end(), key) != names.end()) return section + "." + key;
  throw ConfigError("unknown key '" + key + "'", line);
}

void read_file_entries(std::string_view text, Table& table, std::map<std::string, std::size_t>& sections) {
  std::istringstream in{std::string(text)};
  std::string raw;
  std::string section;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    const auto comment = line.find_first_of("#;");
    if (comment != std::string::npos) line.erase(comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("malformed section header '" + line + "'", line_no);
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (!known_keys().count(section)) throw ConfigError("unknown section [" + section + "]", line_no);
      sections.emplace(section, line_no);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key=value, got '" + line + "'", line_no);
    if (section.empty()) throw ConfigError("key outside of any section", line_no);
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const auto& names = known_keys().at(section);
    if (std::find(names.begin(), names.end(), key) == names.end())
      throw ConfigError("unknown key '" + key + "' in section [" + section + "]", line_no);
    const std::string full = section + "." + key;
    if (table.count(full)) throw ConfigError("duplicate key '" + key + "'", line_no);
    table[full] = Entry{trim(std::string_view(line).substr(eq + 1)), line_no};
  }
}

void apply_overrides(const std::vector<std::string>& overrides, Table& table) {
  for (const std::string& raw : overrides) {
    std::string arg = raw;
    if (arg.rfind("--", 0) == 0) arg.erase(0, 2);
    const auto eq = arg.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + raw + "' is not --key=value", 0);
    const std::string full = qualify(arg.substr(0, eq), 0);
    table[full] = Entry{arg.substr(eq + 1), 0};
  }
}

double parse_real(const Entry& e, const std::string& key) {
  std::string v = e.value;
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
  if (v == "inf" || v == "infinity") return std::numeric_limits<double>::infinity();
  try {
    std::size_t used = 0;
    const double x = std::stod(e.value, &used);
    if (used == e.value.size()) return x;
  } catch (const std::exception&) {
  }
  throw ConfigError("malformed number '" + e.value + "' for key '" + key + "'", e.line);
}

std::size_t parse_count(const Entry& e, const std::string& key) {
  try {
    std::size_t used = 0;
    const long long x = std::stoll(e.value, &used);
    if (used == e.value.size() && x >= 0) return static_cast<std::size_t>(x);
  } catch (const std::exception&) {
  }
  throw ConfigError("malformed integer '" + e.value + "' for key '" + key + "'", e.line);
}

bool parse_bool(const Entry& e, const std::string& key) {
  if (e.value == "true" || e.value == "1" || e.value == "yes") return true;
  if (e.value == "false" || e.value == "0" || e.value == "no") return false;
  throw ConfigError("malformed boolean '" + e.value + "' for key '" + key + "'", e.line);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

template <typename F>
auto parse_list(const Entry& e, const std::string& key, F&& one) {
  std::vector<decltype(one(e, key))> out;
  for (const std::string& item : split_list(e.value)) out.push_back(one(Entry{item, e.line}, key));
  if (out.empty()) throw ConfigError("empty list for key '" + key + "'", e.line);
  return out;
}

std::size_t missing_line(const std::map<std::string, std::size_t>& sections, const std::string& section) {
  auto it = sections.find(section);
  return it == sections.end() ? 0 : it->second;
}

}  // namespace

ExperimentConfig parse_config_text(std::string_view text, const std::vector<std::string>& overrides,
                                   Command command) {
  Table table;
  std::map<std::string, std::size_t> sections;
  read_file_entries(text, table, sections);
  apply_overrides(overrides, table);

  ExperimentConfig cfg;
  cfg.command = command;
  auto get = [&](const std::string& key) -> const Entry* {
    auto it = table.find(key);
    return it == table.end() ? nullptr : &it->second;
  };

  const Entry* family = get("measure.family");
  if (!family) throw ConfigError("missing required key 'family' in [measure]", missing_line(sections, "measure"));
  try {
    cfg.measure.family = family_from_string(family->value);
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what(), family->line);
  }

  if (cfg.measure.family == Family::Custom) {
    const Entry* atoms = get("measure.atoms");
    if (!atoms) throw ConfigError("custom measures need 'atoms' in [measure]", missing_line(sections, "measure"));
    cfg.measure.atoms_path = atoms->value;
  } else {
    const Entry* m = get("measure.M");
    if (!m) throw ConfigError("missing required key 'M' in [measure]", missing_line(sections, "measure"));
    cfg.measure.truncations = parse_list(*m, "M", parse_real);
    for (double M : cfg.measure.truncations)
      if (!(M > 0.0) || !std::isfinite(M)) throw ConfigError("M must be positive and finite", m->line);
    if (cfg.measure.truncations.size() > 1 && command != Command::ScanM)
      throw ConfigError("a list of M values is only accepted by scan-m", m->line);
  }
  if (const Entry* r = get("measure.resolution")) {
    cfg.measure.resolution = parse_count(*r, "resolution");
    if (cfg.measure.resolution == 0) throw ConfigError("resolution must be at least 1", r->line);
  }

  const Entry* he = get("grid.half_extent");
  const Entry* pts = get("grid.points");
  if (he) cfg.grid.half_extent = parse_list(*he, "half_extent", parse_real);
  if (pts) cfg.grid.points = parse_list(*pts, "points", parse_count);

  RunConfig& run = cfg.run;
  if (const Entry* e = get("run.p")) {
    run.p = parse_real(*e, "p");
    cfg.p_explicit = true;
    if (!(run.p > 2.0)) throw ConfigError("p must exceed 2", e->line);
  }
  if (const Entry* e = get("run.max_iters")) run.max_iters = parse_count(*e, "max_iters");
  if (const Entry* e = get("run.ratio_tol")) run.ratio_tol = parse_real(*e, "ratio_tol");
  if (const Entry* e = get("run.cauchy_tol")) run.cauchy_tol = parse_real(*e, "cauchy_tol");
  if (const Entry* e = get("run.recenter_every")) run.recenter_every = parse_count(*e, "recenter_every");
  if (const Entry* e = get("run.seed")) run.seed = parse_count(*e, "seed");
  if (const Entry* e = get("run.weak_window")) run.weak_window = parse_count(*e, "weak_window");
  if (const Entry* e = get("run.check_iterates")) run.check_iterates = parse_bool(*e, "check_iterates");
  if (const Entry* e = get("run.init")) {
    try {
      run.init = init_kind_from_string(e->value);
    } catch (const InvalidArgument& ex) {
      throw ConfigError(ex.what(), e->line);
    }
  }
  if (const Entry* e = get("run.path")) {
    if (e->value == "auto")
      run.path = EvaluationPath::Auto;
    else if (e->value == "direct")
      run.path = EvaluationPath::Direct;
    else if (e->value == "fft")
      run.path = EvaluationPath::Fft;
    else
      throw ConfigError("path must be auto, direct or fft", e->line);
  }
  if (const Entry* e = get("run.density")) cfg.density_path = e->value;
  if (run.init == InitKind::Provided && cfg.density_path.empty())
    throw ConfigError("init=provided needs 'density' in [run]", missing_line(sections, "run"));
  if (!(run.ratio_tol > 0.0) || !(run.cauchy_tol > 0.0)) throw ConfigError("tolerances must be positive", 0);
  if (run.recenter_every == 0) throw ConfigError("recenter_every must be at least 1", 0);
  if (run.weak_window == 0) throw ConfigError("weak_window must be at least 1", 0);

  if (const Entry* e = get("output.prefix")) cfg.output_prefix = e->value;

  std::ostringstream canon;
  canon << "command=" << to_string(command) << '\n';
  for (const auto& [key, entry] : table)
    if (key != "output.prefix") canon << key << '=' << entry.value << '\n';
  cfg.canonical = canon.str();
  return cfg;
}

ExperimentConfig parse_config(const std::string& path, const std::vector<std::string>& overrides,
                              Command command) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'", 0);
  std::ostringstream text;
  text << in.rdbuf();
  ExperimentConfig cfg = parse_config_text(text.str(), overrides, command);
  // Relative data paths are taken relative to the config file.
  const auto base = std::filesystem::path(path).parent_path();
  for (std::string* file : {&cfg.measure.atoms_path, &cfg.density_path})
    if (!file->empty() && std::filesystem::path(*file).is_relative()) *file = (base / *file).string();
  return cfg;
}

}  // namespace rlab
