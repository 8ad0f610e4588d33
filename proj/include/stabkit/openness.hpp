#pragma once

#include <optional>
#include <string>

#include "stabkit/section.hpp"

namespace stabkit {

// Finite-resolution probe of local openness at the origin: for shrinking
// domain radii r and target radii rho, tries to solve f(w) = rho * d inside
// the ball ||w|| <= r for a set of unit directions d. A direction witnesses a
// violation when its best relative residual exceeds 0.5 at every tested
// scale. Evidence, not proof.
struct OpennessReport {
  bool violation = false;
  std::optional<Vector> witness;  // first violating direction in test order
  std::vector<Vector> directions;
  std::vector<int> violating;                  // indices into directions
  std::vector<std::pair<double, double>> scales;  // (r, rho) pairs tested
  std::vector<double> worst_residual;  // per direction: max over scales of best residual
  std::vector<double> best_residual;   // per direction: min over scales of best residual
  int attempts_per_target = 0;
  int unresolved = 0;  // targets where every start failed numerically
  std::string note = "finite-resolution evidence, not a proof";
};

OpennessReport openness_probe(const VectorFieldSpec& sys, double radius, int directions,
                              std::uint64_t seed, const SolverOptions& opts = {});

struct InjectivityReport {
  bool injective_on_grid = true;
  Vector collision_a, collision_b;  // closest image pair when not injective
  double image_distance = 0;
  int grid = 0;
  int failed_points = 0;  // grid points whose evaluation left the domain
};

// Evaluates the map on the uniform grid over [-radius, radius]^n and reports
// the closest image pair among distinct grid points.
InjectivityReport injectivity_probe(const AutonomousField& map, double radius, int grid);

}  // namespace stabkit
