#pragma once

#include <cstdint>
#include <functional>
#include <limits>

#include "stabkit/system.hpp"

namespace stabkit {

struct GaussNewtonOptions {
  double tol = 1e-8;                 // converged when ||r||_inf <= tol
  int max_iter = 100;
  int max_backtracks = 20;           // halvings of the step length
  double stall_rel_decrease = 1e-12; // relative residual decrease counted as progress
  int stall_window = 5;              // consecutive stalled iterations before giving up
  double ball_radius = 0;            // > 0: project iterates onto ||w||_2 <= ball_radius
  double svd_cutoff = 1e-8;          // pseudoinverse cutoff, relative to sigma_max
};

struct SolveOutcome {
  bool converged = false;
  Vector w;
  double residual_inf = std::numeric_limits<double>::infinity();
  double residual_norm = std::numeric_limits<double>::infinity();
  int iterations = 0;
  int attempts = 1;              // starts tried (multistart wrapper)
  bool all_starts_failed = false;  // every start raised a numeric error
};

using ResidualFn = std::function<Vector(const Vector&)>;
using JacobianFn = std::function<Matrix(const Vector&)>;

// Damped Gauss-Newton: step = -pinv(J) * r (minimum-norm), backtracking by
// halving until the 2-norm residual decreases. Stops converged, stalled, or at
// max_iter. Numeric domain errors at the start point propagate; during
// backtracking they reject the trial step.
SolveOutcome gauss_newton(const ResidualFn& residual, const JacobianFn& jacobian, Vector start,
                          const GaussNewtonOptions& opt);

// Tries `start`, then (starts - 1) seeded uniform draws in [-box, box]^dim.
// Returns the first converged outcome, otherwise the attempt with the lowest
// residual norm.
SolveOutcome gauss_newton_multistart(const ResidualFn& residual, const JacobianFn& jacobian,
                                     const Vector& start, double box, int starts,
                                     std::uint64_t seed, const GaussNewtonOptions& opt);

// Deterministic seed mixing (splitmix64 finalizer).
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

}  // namespace stabkit
