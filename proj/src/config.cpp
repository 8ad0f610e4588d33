#include "stabkit/config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "stabkit/errors.hpp"

namespace stabkit {

namespace {

struct Entry {
  std::string value;
  int line;
};

using Section = std::map<std::string, Entry>;

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double parse_number(const Entry& e, const char* what) {
  try {
    std::size_t pos = 0;
    double v = std::stod(e.value, &pos);
    if (pos != e.value.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw ConfigError(std::string("invalid ") + what + " '" + e.value + "'", e.line);
  }
}

long parse_int(const Entry& e, const char* what) {
  try {
    std::size_t pos = 0;
    long v = std::stol(e.value, &pos);
    if (pos != e.value.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw ConfigError(std::string("invalid ") + what + " '" + e.value + "'", e.line);
  }
}

ExprPtr parse_expr_entry(const Entry& e) {
  try {
    return parse_expression(e.value);
  } catch (const ParseError& pe) {
    throw ConfigError(pe.what(), e.line);
  }
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  std::map<std::string, Section> sections;
  std::map<std::string, int> section_lines;
  std::string current;
  int line_no = 0;

  std::istringstream in(text);
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("malformed section header", line_no);
      current = trim(line.substr(1, line.size() - 2));
      if (current != "system" && current != "target" && current != "solver" &&
          current != "simulate")
        throw ConfigError("unknown section [" + current + "]", line_no);
      section_lines.emplace(current, line_no);
      continue;
    }
    std::size_t eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", line_no);
    if (current.empty()) throw ConfigError("key outside of any section", line_no);
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) throw ConfigError("expected 'key = value'", line_no);
    auto [it, inserted] = sections[current].emplace(key, Entry{value, line_no});
    if (!inserted) throw ConfigError("duplicate key '" + key + "'", line_no);
  }

  if (!sections.count("system"))
    throw ConfigError("missing [system] section", std::max(1, line_no));
  Section& sys_sec = sections["system"];
  int sys_line = section_lines["system"];

  // resolve the system: corpus name or inline n, m, f1..fn
  VectorFieldSpec system;
  bool by_name = sys_sec.count("system");
  bool inline_def = sys_sec.count("n") || sys_sec.count("m");
  if (by_name && inline_def)
    throw ConfigError("give either 'system = <name>' or an inline definition, not both",
                      sys_sec["system"].line);
  if (by_name) {
    const Entry& e = sys_sec["system"];
    try {
      system = corpus_system(e.value);
    } catch (const std::invalid_argument& ex) {
      throw ConfigError(ex.what(), e.line);
    }
    for (const auto& [k, v] : sys_sec)
      if (k != "system") throw ConfigError("unexpected key '" + k + "' in [system]", v.line);
  } else if (inline_def) {
    if (!sys_sec.count("n") || !sys_sec.count("m"))
      throw ConfigError("inline system needs both n and m", sys_line);
    int n = static_cast<int>(parse_int(sys_sec["n"], "n"));
    int m = static_cast<int>(parse_int(sys_sec["m"], "m"));
    if (n < 1) throw ConfigError("n must be >= 1", sys_sec["n"].line);
    if (m < 0) throw ConfigError("m must be >= 0", sys_sec["m"].line);
    std::vector<ExprPtr> comps;
    int first_line = sys_line;
    for (int i = 1; i <= n; ++i) {
      std::string key = "f" + std::to_string(i);
      if (!sys_sec.count(key)) throw ConfigError("missing component " + key, sys_line);
      if (i == 1) first_line = sys_sec[key].line;
      comps.push_back(parse_expr_entry(sys_sec[key]));
    }
    for (const auto& [k, v] : sys_sec) {
      if (k == "n" || k == "m") continue;
      if (k.size() >= 2 && k[0] == 'f') {
        int idx = std::atoi(k.c_str() + 1);
        if (idx >= 1 && idx <= n) continue;
      }
      throw ConfigError("unexpected key '" + k + "' in [system]", v.line);
    }
    std::string name = "inline";
    try {
      system = VectorFieldSpec(name, n, m, std::move(comps));
    } catch (const std::invalid_argument& ex) {
      throw ConfigError(ex.what(), first_line);
    }
  } else {
    throw ConfigError("[system] needs 'system = <name>' or an inline definition", sys_line);
  }

  // target (defaults to -x)
  AutonomousField target = default_target(system.state_dim);
  if (sections.count("target")) {
    Section& tgt = sections["target"];
    int tgt_line = section_lines["target"];
    std::vector<ExprPtr> comps;
    int first_line = tgt_line;
    for (int i = 1; i <= system.state_dim; ++i) {
      std::string key = "g" + std::to_string(i);
      if (!tgt.count(key)) throw ConfigError("missing target component " + key, tgt_line);
      if (i == 1) first_line = tgt[key].line;
      comps.push_back(parse_expr_entry(tgt[key]));
    }
    for (const auto& [k, v] : tgt) {
      if (k.size() >= 2 && k[0] == 'g') {
        int idx = std::atoi(k.c_str() + 1);
        if (idx >= 1 && idx <= system.state_dim) continue;
      }
      throw ConfigError("unexpected key '" + k + "' in [target]", v.line);
    }
    try {
      target = AutonomousField(system.state_dim, std::move(comps));
    } catch (const std::invalid_argument& ex) {
      throw ConfigError(ex.what(), first_line);
    }
    Vector g0 = target.eval(Vector::Zero(system.state_dim));
    if (g0.lpNorm<Eigen::Infinity>() > 1e-12)
      throw ConfigError("target must vanish at the origin (|G(0)| <= 1e-12)", first_line);
  }

  RunConfig cfg{std::move(system), std::move(target)};

  if (sections.count("solver")) {
    for (const auto& [k, e] : sections["solver"]) {
      if (k == "radius") {
        cfg.radius = parse_number(e, "radius");
        if (cfg.radius <= 0) throw ConfigError("radius must be positive", e.line);
      } else if (k == "grid") {
        cfg.grid = static_cast<int>(parse_int(e, "grid"));
        if (cfg.grid < 3 || cfg.grid % 2 == 0)
          throw ConfigError("grid must be odd and >= 3", e.line);
      } else if (k == "tol") {
        cfg.tol = parse_number(e, "tol");
        if (cfg.tol <= 0) throw ConfigError("tol must be positive", e.line);
      } else if (k == "max_iter") {
        cfg.max_iter = static_cast<int>(parse_int(e, "max_iter"));
        if (cfg.max_iter < 1) throw ConfigError("max_iter must be >= 1", e.line);
      } else if (k == "fd_step") {
        cfg.fd_step = parse_number(e, "fd_step");
        if (cfg.fd_step <= 0) throw ConfigError("fd_step must be positive", e.line);
      } else if (k == "seed") {
        long v = parse_int(e, "seed");
        if (v < 0) throw ConfigError("seed must be nonnegative", e.line);
        cfg.seed = static_cast<std::uint64_t>(v);
      } else if (k == "multistart") {
        cfg.multistart = static_cast<int>(parse_int(e, "multistart"));
        if (cfg.multistart < 1) throw ConfigError("multistart must be >= 1", e.line);
      } else {
        throw ConfigError("unexpected key '" + k + "' in [solver]", e.line);
      }
    }
  }

  if (sections.count("simulate")) {
    for (const auto& [k, e] : sections["simulate"]) {
      if (k == "t_final") {
        cfg.t_final = parse_number(e, "t_final");
        if (cfg.t_final <= 0) throw ConfigError("t_final must be positive", e.line);
      } else if (k == "rel_tol") {
        cfg.rel_tol = parse_number(e, "rel_tol");
        if (cfg.rel_tol <= 0) throw ConfigError("rel_tol must be positive", e.line);
      } else if (k == "abs_tol") {
        cfg.abs_tol = parse_number(e, "abs_tol");
        if (cfg.abs_tol <= 0) throw ConfigError("abs_tol must be positive", e.line);
      } else if (k == "num_initial") {
        cfg.num_initial = static_cast<int>(parse_int(e, "num_initial"));
        if (cfg.num_initial < 4) throw ConfigError("num_initial must be >= 4", e.line);
      } else {
        throw ConfigError("unexpected key '" + k + "' in [simulate]", e.line);
      }
    }
  }

  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'", 0);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

}  // namespace stabkit
