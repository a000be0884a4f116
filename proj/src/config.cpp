#include "kslab/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "kslab/errors.hpp"

namespace kslab {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

double parse_double(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &pos);
  } catch (const std::exception&) {
    throw config_error(key + ": expected a number, got '" + value + "'");
  }
  if (pos != value.size())
    throw config_error(key + ": trailing characters in '" + value + "'");
  return v;
}

int parse_int(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  long v = 0;
  try {
    v = std::stol(value, &pos);
  } catch (const std::exception&) {
    throw config_error(key + ": expected an integer, got '" + value + "'");
  }
  if (pos != value.size())
    throw config_error(key + ": trailing characters in '" + value + "'");
  return static_cast<int>(v);
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(value, &pos);
  } catch (const std::exception&) {
    throw config_error(key + ": expected an unsigned integer, got '" + value + "'");
  }
  if (pos != value.size())
    throw config_error(key + ": trailing characters in '" + value + "'");
  return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw config_error(key + ": expected a boolean, got '" + value + "'");
}

}  // namespace

std::vector<double> parse_eps_list(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    out.push_back(parse_double("epsilons", item));
  }
  if (out.empty()) throw config_error("epsilons: empty list");
  return out;
}

void apply_key(RunConfig& cfg, const std::string& section, const std::string& key,
               const std::string& value) {
  const std::string where = "[" + section + "] " + key;
  if (section == "potential") {
    if (key == "name")
      cfg.potential_name = value;
    else if (key == "shape_b")
      cfg.shape_b = parse_double(where, value);
    else
      throw config_error("unknown key " + where);
  } else if (section == "run") {
    if (key == "epsilons")
      cfg.epsilons = parse_eps_list(value);
    else if (key == "alpha")
      cfg.alpha = parse_double(where, value);
    else if (key == "u0")
      cfg.u0 = parse_double(where, value);
    else if (key == "T")
      cfg.T = parse_double(where, value);
    else if (key == "seed")
      cfg.seed = parse_u64(where, value);
    else if (key == "initial_profile")
      cfg.initial_profile = value;
    else
      throw config_error("unknown key " + where);
  } else if (section == "grid") {
    if (key == "L")
      cfg.L = parse_double(where, value);
    else if (key == "n_base")
      cfg.n_base = parse_int(where, value);
    else if (key == "grading")
      cfg.grading = value;
    else if (key == "eps_aware")
      cfg.eps_aware = parse_bool(where, value);
    else
      throw config_error("unknown key " + where);
  } else if (section == "time") {
    if (key == "dt")
      cfg.dt = parse_double(where, value);
    else if (key == "theta")
      cfg.theta = parse_double(where, value);
    else if (key == "snapshots_per_unit")
      cfg.snapshots_per_unit = parse_double(where, value);
    else if (key == "record_every_step")
      cfg.record_every_step = parse_bool(where, value);
    else
      throw config_error("unknown key " + where);
  } else if (section == "quadrature") {
    if (key == "nodes")
      cfg.quad.nodes = parse_int(where, value);
    else if (key == "rel_tol")
      cfg.quad.rel_tol = parse_double(where, value);
    else if (key == "abs_tol")
      cfg.quad.abs_tol = parse_double(where, value);
    else if (key == "max_depth")
      cfg.quad.max_depth = parse_int(where, value);
    else if (key == "ladder_levels")
      cfg.quad.ladder_levels = parse_int(where, value);
    else
      throw config_error("unknown key " + where);
  } else if (section == "output") {
    if (key == "out_dir")
      cfg.out_dir = value;
    else
      throw config_error("unknown key " + where);
  } else {
    throw config_error("unknown section [" + section + "]");
  }
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file: " + path);
  RunConfig cfg;
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw config_error(path + ":" + std::to_string(lineno) + ": bad section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw config_error(path + ":" + std::to_string(lineno) + ": expected key = value");
    if (section.empty())
      throw config_error(path + ":" + std::to_string(lineno) + ": key outside a section");
    apply_key(cfg, section, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

void RunConfig::validate() const {
  if (potential_name != "quartic" && potential_name != "sixth" &&
      potential_name != "sixth_order")
    throw config_error("potential name must be 'quartic' or 'sixth_order'");
  if (!(shape_b >= 0.0 && shape_b < 2.0))
    throw config_error("shape_b must lie in [0, 2)");
  if (epsilons.empty()) throw config_error("epsilons must be non-empty");
  for (double e : epsilons)
    if (!(e > 0.0 && e < 1.0)) throw config_error("each epsilon must lie in (0, 1)");
  if (!(alpha > 0.0 && alpha < 1.0)) throw config_error("alpha must lie in (0, 1)");
  if (!(u0 > 0.0 && u0 < 2.0)) throw config_error("u0 must lie in (0, 2)");
  if (!(T > 0.0)) throw config_error("T must be positive");
  if (!(L >= 2.5)) throw config_error("L must be at least 2.5");
  if (n_base < 200) throw config_error("n_base must be at least 200");
  if (grading != "graded" && grading != "uniform")
    throw config_error("grading must be 'graded' or 'uniform'");
  if (!(dt > 0.0)) throw config_error("dt must be positive");
  if (!(theta >= 0.5 && theta <= 1.0))
    throw config_error("theta must lie in [1/2, 1]");
  if (!(snapshots_per_unit > 0.0))
    throw config_error("snapshots_per_unit must be positive");
  if (quad.nodes < 2 || quad.nodes > 128)
    throw config_error("quadrature nodes must lie in [2, 128]");
  if (!(quad.rel_tol > 0.0) || !(quad.abs_tol > 0.0))
    throw config_error("quadrature tolerances must be positive");
  if (quad.max_depth < 1 || quad.ladder_levels < 1)
    throw config_error("quadrature depths must be positive");
  if (out_dir.empty()) throw config_error("out_dir must be non-empty");
}

}  // namespace kslab
