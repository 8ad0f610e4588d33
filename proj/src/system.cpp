#include "stabkit/system.hpp"

#include <cmath>
#include <stdexcept>

#include "stabkit/errors.hpp"

namespace stabkit {

namespace {

std::span<const double> as_span(const Vector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

}  // namespace

VectorFieldSpec::VectorFieldSpec(std::string name_, int n, int m, std::vector<ExprPtr> comps)
    : name(std::move(name_)), state_dim(n), control_dim(m), components(std::move(comps)) {
  if (n < 1) throw std::invalid_argument("state dimension must be >= 1");
  if (m < 0) throw std::invalid_argument("control dimension must be >= 0");
  if (static_cast<int>(components.size()) != n)
    throw std::invalid_argument("expected " + std::to_string(n) + " components");
  for (int i = 0; i < n; ++i) {
    if (components[i]->max_index(VarKind::State) > n)
      throw std::invalid_argument("component " + std::to_string(i + 1) +
                                  " references an undeclared state variable");
    if (components[i]->max_index(VarKind::Control) > m)
      throw std::invalid_argument("component " + std::to_string(i + 1) +
                                  " references an undeclared control variable");
  }
  Vector origin_x = Vector::Zero(n), origin_u = Vector::Zero(m);
  Vector f0 = eval(origin_x, origin_u);
  if (f0.lpNorm<Eigen::Infinity>() > 1e-12)
    throw std::invalid_argument("f(0,0) must vanish (|f(0,0)| <= 1e-12)");
}

Vector VectorFieldSpec::eval(const Vector& x, const Vector& u) const {
  if (x.size() != state_dim || u.size() != control_dim)
    throw std::invalid_argument("dimension mismatch in field evaluation");
  Vector out(state_dim);
  for (int i = 0; i < state_dim; ++i) out[i] = components[i]->evaluate(as_span(x), as_span(u));
  return out;
}

AutonomousField::AutonomousField(int n, std::vector<ExprPtr> comps)
    : dim(n), components(std::move(comps)) {
  if (n < 1) throw std::invalid_argument("dimension must be >= 1");
  if (static_cast<int>(components.size()) != n)
    throw std::invalid_argument("expected " + std::to_string(n) + " components");
  for (const auto& c : components) {
    if (c->max_index(VarKind::Control) > 0)
      throw std::invalid_argument("autonomous field must not reference control variables");
    if (c->max_index(VarKind::State) > n)
      throw std::invalid_argument("autonomous field references an undeclared state variable");
  }
}

Vector AutonomousField::eval(const Vector& x) const {
  if (x.size() != dim) throw std::invalid_argument("dimension mismatch in field evaluation");
  Vector out(dim);
  std::span<const double> u;
  for (int i = 0; i < dim; ++i) out[i] = components[i]->evaluate(as_span(x), u);
  return out;
}

namespace {

// One symbolic Jacobian entry with FD fallback. `probe` evaluates the base
// expression with coordinate j of the joint point replaced by t.
double entry_with_fallback(const ExprPtr& dexpr, const ExprPtr& base, VarKind kind, int j,
                           const Vector& x, const Vector& u, double fd_step) {
  std::span<const double> xs{x.data(), static_cast<std::size_t>(x.size())};
  std::span<const double> us{u.data(), static_cast<std::size_t>(u.size())};
  try {
    return dexpr->evaluate(xs, us);
  } catch (const NumericDomainError&) {
  }
  double center = (kind == VarKind::State) ? x[j] : u[j];
  double h = fd_step * std::max(1.0, std::abs(center));
  auto probe = [&](double t) {
    Vector xt = x, ut = u;
    if (kind == VarKind::State) xt[j] = t;
    else ut[j] = t;
    std::span<const double> xss{xt.data(), static_cast<std::size_t>(xt.size())};
    std::span<const double> uss{ut.data(), static_cast<std::size_t>(ut.size())};
    return base->evaluate(xss, uss);
  };
  try {
    return (probe(center + h) - probe(center - h)) / (2 * h);
  } catch (const NumericDomainError&) {
  }
  // centered stencil leaves the domain: one-sided difference from a point
  // shifted off the singularity
  double shift = center + 1e-7;
  return (probe(shift + h) - probe(shift)) / h;
}

}  // namespace

Matrix AutonomousField::jacobian(const Vector& x) const {
  Matrix J(dim, dim);
  Vector u(0);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      ExprPtr d = components[i]->derivative(VarKind::State, j + 1);
      J(i, j) = entry_with_fallback(d, components[i], VarKind::State, j, x, u, 1e-6);
    }
  return J;
}

AutonomousField default_target(int n) {
  std::vector<ExprPtr> comps;
  comps.reserve(n);
  for (int i = 1; i <= n; ++i) comps.push_back(Expr::neg(Expr::var(VarKind::State, i)));
  return AutonomousField(n, std::move(comps));
}

VectorMap map_of(const AutonomousField& g) {
  return VectorMap{g.dim, g.dim, [g](const Vector& x) { return g.eval(x); }};
}

VectorMap map_of(const VectorFieldSpec& sys) {
  if (sys.control_dim != 0)
    throw std::invalid_argument("map_of(VectorFieldSpec) requires m = 0");
  Vector empty(0);
  return VectorMap{sys.state_dim, sys.state_dim,
                   [sys, empty](const Vector& x) { return sys.eval(x, empty); }};
}

Vector eval_field(const VectorFieldSpec& sys, const Vector& x, const Vector& u) {
  return sys.eval(x, u);
}

Linearization linearize(const VectorFieldSpec& sys) {
  const int n = sys.state_dim, m = sys.control_dim;
  Vector x0 = Vector::Zero(n), u0 = Vector::Zero(m);
  Linearization lin{Matrix(n, n), Matrix(n, m)};
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      ExprPtr d = sys.components[i]->derivative(VarKind::State, j + 1);
      lin.A(i, j) = entry_with_fallback(d, sys.components[i], VarKind::State, j, x0, u0, 1e-6);
    }
    for (int j = 0; j < m; ++j) {
      ExprPtr d = sys.components[i]->derivative(VarKind::Control, j + 1);
      lin.B(i, j) = entry_with_fallback(d, sys.components[i], VarKind::Control, j, x0, u0, 1e-6);
    }
  }
  return lin;
}

Matrix jacobian_fd(const VectorMap& map, const Vector& x, double step) {
  if (step <= 0) throw std::invalid_argument("fd step must be positive");
  Matrix J(map.dim_out, map.dim_in);
  for (int j = 0; j < map.dim_in; ++j) {
    double h = step * std::max(1.0, std::abs(x[j]));
    Vector xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    J.col(j) = (map(xp) - map(xm)) / (2 * h);
  }
  return J;
}

FieldJacobian::FieldJacobian(const VectorFieldSpec& sys, double fd_step)
    : sys_(&sys), fd_step_(fd_step) {
  const int n = sys.state_dim, m = sys.control_dim;
  dx_.resize(n);
  du_.resize(n);
  for (int i = 0; i < n; ++i) {
    dx_[i].reserve(n);
    du_[i].reserve(m);
    for (int j = 1; j <= n; ++j) dx_[i].push_back(sys.components[i]->derivative(VarKind::State, j));
    for (int j = 1; j <= m; ++j)
      du_[i].push_back(sys.components[i]->derivative(VarKind::Control, j));
  }
}

double FieldJacobian::entry(int i, VarKind kind, int j, const Vector& x, const Vector& u) const {
  const ExprPtr& d = (kind == VarKind::State) ? dx_[i][j] : du_[i][j];
  return entry_with_fallback(d, sys_->components[i], kind, j, x, u, fd_step_);
}

Matrix FieldJacobian::full(const Vector& x, const Vector& u) const {
  const int n = sys_->state_dim, m = sys_->control_dim;
  Matrix J(n, n + m);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) J(i, j) = entry(i, VarKind::State, j, x, u);
    for (int j = 0; j < m; ++j) J(i, n + j) = entry(i, VarKind::Control, j, x, u);
  }
  return J;
}

Matrix FieldJacobian::control_block(const Vector& x, const Vector& u) const {
  const int n = sys_->state_dim, m = sys_->control_dim;
  Matrix J(n, m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) J(i, j) = entry(i, VarKind::Control, j, x, u);
  return J;
}

namespace {

VectorFieldSpec make(const char* name, int n, int m, std::initializer_list<const char*> comps) {
  std::vector<ExprPtr> parsed;
  for (const char* c : comps) parsed.push_back(parse_expression(c));
  return VectorFieldSpec(name, n, m, std::move(parsed));
}

}  // namespace

const std::vector<VectorFieldSpec>& corpus() {
  static const std::vector<VectorFieldSpec> systems = [] {
    std::vector<VectorFieldSpec> s;
    s.push_back(make("state_only", 1, 1, {"x1"}));
    s.push_back(make("brockett_integrator", 3, 2, {"u1", "u2", "x1*u2 - x2*u1"}));
    s.push_back(make("cubic_scalar", 1, 1, {"x1 + u1^3"}));
    s.push_back(make("example_2d", 2, 1, {"x1^2 + x2^2 + x2", "x1*x2 + x2^2 + u1^3"}));
    return s;
  }();
  return systems;
}

const VectorFieldSpec& corpus_system(std::string_view name) {
  for (const auto& s : corpus())
    if (s.name == name) return s;
  throw std::invalid_argument("unknown corpus system '" + std::string(name) + "'");
}

}  // namespace stabkit
