#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "stabkit/expr.hpp"

namespace stabkit {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Control system xdot = f(x, u) with expression components f1..fn over
// x1..xn, u1..um. Immutable after construction; all evaluation is pure.
struct VectorFieldSpec {
  std::string name;
  int state_dim = 0;
  int control_dim = 0;
  std::vector<ExprPtr> components;

  VectorFieldSpec() = default;
  // Validates that components reference only declared variables and that
  // ||f(0,0)||_inf <= 1e-12. Throws std::invalid_argument otherwise.
  VectorFieldSpec(std::string name, int n, int m, std::vector<ExprPtr> comps);

  Vector eval(const Vector& x, const Vector& u) const;
};

// Autonomous field xdot = g(x): synthesis targets and closed loops given in
// expression form.
struct AutonomousField {
  int dim = 0;
  std::vector<ExprPtr> components;

  AutonomousField() = default;
  AutonomousField(int n, std::vector<ExprPtr> comps);

  Vector eval(const Vector& x) const;
  // Exact symbolic Jacobian with per-entry finite-difference fallback where
  // the symbolic derivative is undefined.
  Matrix jacobian(const Vector& x) const;
};

// The default synthesis target g_i(x) = -x_i.
AutonomousField default_target(int n);

struct Linearization {
  Matrix A;  // n x n, df/dx at (0,0)
  Matrix B;  // n x m, df/du at (0,0)
};

// A plain callable map used for FD Jacobians, inversion and simulation.
struct VectorMap {
  int dim_in = 0;
  int dim_out = 0;
  std::function<Vector(const Vector&)> f;
  Vector operator()(const Vector& x) const { return f(x); }
};

VectorMap map_of(const AutonomousField& g);
// Treats an m = 0 system as the autonomous field x -> f(x).
VectorMap map_of(const VectorFieldSpec& sys);

Vector eval_field(const VectorFieldSpec& sys, const Vector& x, const Vector& u);

// Partial Jacobians at the origin. Entries whose symbolic derivative is
// undefined at 0 (cbrt-style singularities) fall back to central differences
// with step 1e-6, shifting to a one-sided stencil by 1e-7 if the centered
// stencil itself leaves the domain.
Linearization linearize(const VectorFieldSpec& sys);

// Central differences with per-coordinate step h_i = step * max(1, |x_i|).
Matrix jacobian_fd(const VectorMap& map, const Vector& x, double step);

// Symbolic partials of f with respect to all of (x, u), evaluated on demand
// with per-entry FD fallback. Built once per system, reused across solves.
class FieldJacobian {
 public:
  explicit FieldJacobian(const VectorFieldSpec& sys, double fd_step = 1e-6);

  Matrix full(const Vector& x, const Vector& u) const;           // n x (n+m)
  Matrix control_block(const Vector& x, const Vector& u) const;  // n x m

 private:
  double entry(int i, VarKind kind, int j, const Vector& x, const Vector& u) const;

  const VectorFieldSpec* sys_;
  double fd_step_;
  std::vector<std::vector<ExprPtr>> dx_;  // [component][state var]
  std::vector<std::vector<ExprPtr>> du_;  // [component][control var]
};

// The four reference systems: state_only, brockett_integrator, cubic_scalar,
// example_2d.
const std::vector<VectorFieldSpec>& corpus();
const VectorFieldSpec& corpus_system(std::string_view name);

}  // namespace stabkit
