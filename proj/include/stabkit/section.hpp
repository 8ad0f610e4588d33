#pragma once

#include <cstdint>
#include <vector>

#include "stabkit/gauss_newton.hpp"
#include "stabkit/grid.hpp"

namespace stabkit {

// Shared knobs for the pointwise solvers (sections, symbols, feedback).
struct SolverOptions {
  double tol = 1e-8;
  int max_iter = 100;
  int multistart = 8;
  std::uint64_t seed = 42;
  double fd_step = 1e-6;
};

// Tabulated stationary local section alpha of f: per target node y a point
// w = (x, u) with ||f(w) - y||_inf <= tol, alpha(0) pinned to 0 exactly.
struct SectionTable {
  BoxGrid grid;  // over targets y in R^n
  int control_dim = 0;
  double tol = 0;
  std::vector<Vector> values;     // per lex node: w in R^{n+m} (best attempt if unsolved)
  std::vector<double> residuals;  // ||f(w) - y||_inf per lex node
  std::vector<char> solved;       // per lex node
  std::vector<int> unsolved;      // lex indices in shell order
  double lipschitz = 0;           // empirical max ||dw|| / ||dy|| over adjacent solved pairs

  bool complete() const { return unsolved.empty(); }
};

// One damped Gauss-Newton solve of f(w) = y over all n+m variables from the
// given warm start. Not converged => outcome.converged == false (NoSolution).
SolveOutcome solve_section_point(const VectorFieldSpec& sys, const Vector& y,
                                 const Vector& warm_start, double tol, int max_iter);

// Solves grid nodes in expanding shells; each node warm-starts from its
// nearest already-solved node in earlier shells. A partial table is returned
// when nodes fail (SectionIncomplete); the failures are listed in `unsolved`.
SectionTable build_section(const VectorFieldSpec& sys, double radius, int grid, double tol,
                           const SolverOptions& opts = {});

// Recomputes max ||f(alpha(y)) - y||_inf over the solved nodes; 0 if none.
double check_section(const VectorFieldSpec& sys, const SectionTable& table);

}  // namespace stabkit
