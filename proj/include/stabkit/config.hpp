#pragma once

#include <cstdint>
#include <string>

#include "stabkit/section.hpp"

namespace stabkit {

// A fully-resolved run configuration. Loaded from a line-oriented file with
// sections [system], [target], [solver], [simulate]; `#` starts a comment.
struct RunConfig {
  VectorFieldSpec system;
  AutonomousField target;  // defaults to g_i = -x_i

  // [solver]
  double radius = 0.5;
  int grid = 21;
  double tol = 1e-8;
  int max_iter = 100;
  double fd_step = 1e-6;
  std::uint64_t seed = 42;
  int multistart = 8;

  // [simulate]
  double t_final = 20;
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  int num_initial = 8;

  SolverOptions solver_options() const {
    return SolverOptions{tol, max_iter, multistart, seed, fd_step};
  }
};

// Throws ConfigError (with the offending line number) on syntax errors, bad
// dimensions, unparsable expressions, f(0,0) != 0 or G(0) != 0.
RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::string& path);

}  // namespace stabkit
