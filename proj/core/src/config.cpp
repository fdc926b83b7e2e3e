#include "cylvar/config.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "cylvar/io.hpp"

namespace cylvar {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(const std::string& name, int line, const std::string& msg) {
  std::ostringstream os;
  os << name << ":" << line << ": " << msg;
  throw ConfigError(os.str());
}

double parse_double(const std::string& name, int line, const std::string& key,
                    const std::string& v) {
  errno = 0;
  char* end = nullptr;
  double x = std::strtod(v.c_str(), &end);
  if (end != v.c_str() + v.size() || v.empty() || errno == ERANGE)
    fail(name, line, key + ": expected a real number, got '" + v + "'");
  return x;
}

long long parse_int(const std::string& name, int line, const std::string& key,
                    const std::string& v) {
  errno = 0;
  char* end = nullptr;
  long long x = std::strtoll(v.c_str(), &end, 10);
  if (end != v.c_str() + v.size() || v.empty() || errno == ERANGE)
    fail(name, line, key + ": expected an integer, got '" + v + "'");
  return x;
}

std::uint64_t parse_u64(const std::string& name, int line, const std::string& key,
                        const std::string& v) {
  errno = 0;
  char* end = nullptr;
  unsigned long long x = std::strtoull(v.c_str(), &end, 10);
  if (end != v.c_str() + v.size() || v.empty() || errno == ERANGE ||
      v.find('-') != std::string::npos)
    fail(name, line, key + ": expected a nonnegative integer, got '" + v + "'");
  return static_cast<std::uint64_t>(x);
}

bool parse_bool(const std::string& name, int line, const std::string& key,
                const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  fail(name, line, key + ": expected a boolean (true/false), got '" + v + "'");
}

}  // namespace

const char* to_string(RunMode m) {
  switch (m) {
    case RunMode::subcritical: return "subcritical";
    case RunMode::critical: return "critical";
    case RunMode::mountain_pass: return "mountain_pass";
  }
  return "?";
}

Nonlinearity Config::nonlinearity() const {
  if (nl_kind == "power") return Nonlinearity::power(p, eps_weight);
  if (nl_kind == "critical") return Nonlinearity::critical();
  if (nl_kind == "log_modified") return Nonlinearity::log_modified(p, eps_weight);
  if (nl_kind == "zero") return Nonlinearity::zero();
  throw ConfigError("unknown nonlinearity kind '" + nl_kind + "'");
}

std::vector<std::pair<std::string, std::string>> Config::echo() const {
  std::vector<std::pair<std::string, std::string>> kv;
  kv.emplace_back("problem.a", fmt17(a));
  kv.emplace_back("problem.mode", to_string(mode));
  kv.emplace_back("nonlinearity.kind", nl_kind);
  kv.emplace_back("nonlinearity.p", fmt17(p));
  kv.emplace_back("nonlinearity.eps_weight", fmt17(eps_weight));
  kv.emplace_back("grid.nr", std::to_string(nr));
  kv.emplace_back("grid.nz", std::to_string(nz));
  kv.emplace_back("grid.rmax", fmt17(rmax));
  kv.emplace_back("grid.zmax", fmt17(zmax));
  kv.emplace_back("grid.n3", std::to_string(n3));
  kv.emplace_back("grid.L3", fmt17(L3));
  kv.emplace_back("solver.max_iter", std::to_string(solver.max_iter));
  kv.emplace_back("solver.tol", fmt17(solver.tol));
  kv.emplace_back("solver.step0", fmt17(solver.step0));
  kv.emplace_back("solver.seed", std::to_string(solver.seed));
  kv.emplace_back("solver.positivity", solver.positivity ? "true" : "false");
  kv.emplace_back("solver.k_nodes", std::to_string(solver.k_nodes));
  kv.emplace_back("output.dir", out_dir);
  return kv;
}

std::string Config::render() const {
  std::string out;
  for (const auto& [k, v] : echo()) {
    out += k;
    out += " = ";
    out += v;
    out += "\n";
  }
  return out;
}

Config parse_config_text(const std::string& text, const std::string& name) {
  Config cfg;
  std::map<std::string, int> seen;  // key -> line, for duplicates and late errors

  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw;
    if (auto h = s.find('#'); h != std::string::npos) s.erase(h);
    s = trim(s);
    if (s.empty()) continue;

    auto eq = s.find('=');
    if (eq == std::string::npos)
      fail(name, line, "expected 'section.key = value', got '" + trim(raw) + "'");
    std::string key = trim(s.substr(0, eq));
    std::string val = trim(s.substr(eq + 1));
    if (key.empty()) fail(name, line, "missing key before '='");
    if (val.empty()) fail(name, line, key + ": missing value after '='");

    if (auto [it, fresh] = seen.emplace(key, line); !fresh)
      fail(name, line, "duplicate key '" + key + "' (first set on line " +
                           std::to_string(it->second) + ")");

    if (key == "problem.a") {
      cfg.a = parse_double(name, line, key, val);
    } else if (key == "problem.mode") {
      if (val == "subcritical") cfg.mode = RunMode::subcritical;
      else if (val == "critical") cfg.mode = RunMode::critical;
      else if (val == "mountain_pass") cfg.mode = RunMode::mountain_pass;
      else fail(name, line, "problem.mode: expected subcritical, critical or mountain_pass, got '" + val + "'");
    } else if (key == "nonlinearity.kind") {
      if (val != "power" && val != "critical" && val != "log_modified" && val != "zero")
        fail(name, line, "nonlinearity.kind: expected power, critical, log_modified or zero, got '" + val + "'");
      cfg.nl_kind = val;
    } else if (key == "nonlinearity.p") {
      cfg.p = parse_double(name, line, key, val);
    } else if (key == "nonlinearity.eps_weight") {
      cfg.eps_weight = parse_double(name, line, key, val);
    } else if (key == "grid.nr") {
      cfg.nr = static_cast<int>(parse_int(name, line, key, val));
    } else if (key == "grid.nz") {
      cfg.nz = static_cast<int>(parse_int(name, line, key, val));
    } else if (key == "grid.rmax") {
      cfg.rmax = parse_double(name, line, key, val);
    } else if (key == "grid.zmax") {
      cfg.zmax = parse_double(name, line, key, val);
    } else if (key == "grid.n3") {
      cfg.n3 = static_cast<int>(parse_int(name, line, key, val));
    } else if (key == "grid.L3") {
      cfg.L3 = parse_double(name, line, key, val);
    } else if (key == "solver.max_iter") {
      cfg.solver.max_iter = static_cast<int>(parse_int(name, line, key, val));
    } else if (key == "solver.tol") {
      cfg.solver.tol = parse_double(name, line, key, val);
    } else if (key == "solver.step0") {
      cfg.solver.step0 = parse_double(name, line, key, val);
    } else if (key == "solver.seed") {
      cfg.solver.seed = parse_u64(name, line, key, val);
    } else if (key == "solver.positivity") {
      cfg.solver.positivity = parse_bool(name, line, key, val);
    } else if (key == "solver.k_nodes") {
      cfg.solver.k_nodes = static_cast<int>(parse_int(name, line, key, val));
    } else if (key == "output.dir") {
      cfg.out_dir = val;
    } else {
      fail(name, line, "unknown key '" + key + "'");
    }
  }

  // Semantic checks; blame the line the key came from when it was explicit.
  auto at = [&](const std::string& key) {
    auto it = seen.find(key);
    return it == seen.end() ? 0 : it->second;
  };
  auto reject = [&](const std::string& key, const std::string& msg) {
    int l = at(key);
    if (l > 0) fail(name, l, msg);
    throw ConfigError(name + ": " + msg);
  };

  if (!(cfg.a > 0.0))
    reject("problem.a", "problem.a: a > 0 required (the r^-2 potential must be repulsive for the planar-rotation symmetry class)");

  // Mode/kind compatibility. An unset kind follows the mode.
  bool kind_explicit = at("nonlinearity.kind") > 0;
  if (cfg.mode == RunMode::critical) {
    if (!kind_explicit) cfg.nl_kind = "critical";
    if (cfg.nl_kind != "critical")
      reject("nonlinearity.kind",
             "nonlinearity.kind: mode critical minimizes the Sobolev quotient and requires kind = critical");
  } else {
    if (cfg.nl_kind == "critical")
      reject("nonlinearity.kind",
             "nonlinearity.kind: kind critical requires problem.mode = critical");
    if (cfg.nl_kind == "zero")
      reject("nonlinearity.kind",
             "nonlinearity.kind: kind zero leaves nothing to minimize; pick power or log_modified");
  }

  if (cfg.nl_kind == "power" && !(cfg.p > 2.0 && cfg.p < 6.0))
    reject("nonlinearity.p", "nonlinearity.p: 2 < p < 6 required for kind power, got " + fmt17(cfg.p));
  if (cfg.nl_kind == "log_modified" && !(cfg.p >= 2.0 && cfg.p < 6.0))
    reject("nonlinearity.p", "nonlinearity.p: 2 <= p < 6 required for kind log_modified, got " + fmt17(cfg.p));
  if (!(cfg.eps_weight >= 0.0 && cfg.eps_weight <= 0.5))
    reject("nonlinearity.eps_weight", "nonlinearity.eps_weight: expected a value in [0, 0.5], got " + fmt17(cfg.eps_weight));

  if (cfg.nr < 8) reject("grid.nr", "grid.nr: at least 8 radial cells required, got " + std::to_string(cfg.nr));
  if (cfg.nz < 8) reject("grid.nz", "grid.nz: at least 8 vertical nodes required, got " + std::to_string(cfg.nz));
  if (cfg.n3 < 8) reject("grid.n3", "grid.n3: at least 8 nodes per axis required, got " + std::to_string(cfg.n3));
  if (!(cfg.rmax > 0.0)) reject("grid.rmax", "grid.rmax: positive box size required");
  if (!(cfg.zmax > 0.0)) reject("grid.zmax", "grid.zmax: positive box size required");
  if (!(cfg.L3 > 0.0)) reject("grid.L3", "grid.L3: positive box size required");

  if (cfg.solver.max_iter < 1) reject("solver.max_iter", "solver.max_iter: at least 1 iteration required");
  if (!(cfg.solver.tol > 0.0)) reject("solver.tol", "solver.tol: positive tolerance required");
  if (!(cfg.solver.step0 > 0.0)) reject("solver.step0", "solver.step0: positive initial step required");
  if (cfg.solver.k_nodes != 0 && cfg.solver.k_nodes != 1)
    reject("solver.k_nodes", "solver.k_nodes: 0 (ground state) or 1 (one nodal plane) supported, got " +
                                 std::to_string(cfg.solver.k_nodes));
  if (cfg.solver.positivity && cfg.solver.k_nodes == 1)
    reject("solver.positivity", "solver.positivity: incompatible with k_nodes = 1 (a nodal state changes sign)");
  if (cfg.mode == RunMode::mountain_pass && cfg.solver.k_nodes != 0)
    reject("solver.k_nodes", "solver.k_nodes: the mountain-pass path search has no nodal variant");

  return cfg;
}

Config parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

}  // namespace cylvar
