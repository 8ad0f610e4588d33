#pragma once

#include <optional>

#include "stabkit/section.hpp"

namespace stabkit {

// Tabulated stationary feedback u(x) with f(x, u(x)) = G(x) per node,
// u(0) pinned to 0 exactly.
struct FeedbackTable {
  BoxGrid grid;  // over states x in R^n
  int control_dim = 0;
  double tol = 0;
  std::optional<AutonomousField> target;  // G, when given in expression form
  std::vector<Vector> values;             // u per lex node (best attempt if unsolved)
  std::vector<double> residuals;          // ||f(x, u) - G(x)||_inf
  std::vector<char> solved;
  std::vector<int> unsolved;  // lex indices in shell order

  bool complete() const { return unsolved.empty(); }
};

// Tabulated stationary composition symbol h(x) with f(h(x)) = g(x) per node,
// h(0) pinned to 0 exactly.
struct SymbolTable {
  BoxGrid grid;  // over states x in R^n
  int control_dim = 0;
  double tol = 0;
  std::optional<AutonomousField> target;
  std::vector<Vector> values;  // h(x) in R^{n+m}
  std::vector<double> residuals;
  std::vector<char> solved;
  std::vector<int> unsolved;

  bool complete() const { return unsolved.empty(); }
};

// Solves f(x, u) = G(x) pointwise in u over the grid with shell continuation.
// Unsolved nodes are listed (NotSynthesizable); a partial table is returned.
FeedbackTable synthesize_feedback(const VectorFieldSpec& sys, const AutonomousField& target,
                                  double radius, int grid, double tol,
                                  const SolverOptions& opts = {});

// Solves f(w) = g(x) pointwise over all n+m variables w.
SymbolTable synthesize_composition_symbol(const VectorFieldSpec& sys, const AutonomousField& target,
                                          double radius, int grid, double tol,
                                          const SolverOptions& opts = {});

// Damped Newton for map(y) = x from y = 0. Throws SingularAtOrigin when
// |det J(0)| < 1e-12 and NoConvergence when the iteration fails.
Vector invert_map(const VectorMap& map, const Vector& x, double tol, int max_iter = 100,
                  double fd_step = 1e-6);
Vector invert_map(const AutonomousField& map, const Vector& x, double tol, int max_iter = 100);

// Recovers a feedback law from a complete section table: per node
// y = (proj1 . alpha)^{-1}(x) by Newton on the interpolated table, u from the
// interpolated control part, then Gauss-Newton polish of f(x,u) = y.
FeedbackTable feedback_from_section(const VectorFieldSpec& sys, const SectionTable& table,
                                    double radius, int grid, double tol,
                                    const SolverOptions& opts = {});

// True iff every eigenvalue of the inverse of J_alpha1(0) has Re < -1e-9.
bool check_exponential_condition(const Matrix& alpha1_jacobian_at_0);

// Pointwise control for arbitrary x: interpolated warm start, then a fresh
// solve of f(x,u) = target(x). Returns the best u found even when the solve
// does not reach `tol` (e.g. systems where u cannot influence the residual).
Vector control_at(const VectorFieldSpec& sys, const FeedbackTable& table, const Vector& x,
                  double tol, const SolverOptions& opts = {});

// Closed loop x -> f(x, u(x)) with u via the polished pointwise solve.
VectorMap closed_loop_map(const VectorFieldSpec& sys, const FeedbackTable& table,
                          double polish_tol = 1e-13, const SolverOptions& opts = {});

}  // namespace stabkit
