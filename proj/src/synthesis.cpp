#include "stabkit/synthesis.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <memory>

#include "stabkit/errors.hpp"

namespace stabkit {

namespace {

void require_stationary_target(const AutonomousField& g) {
  if (g.eval(Vector::Zero(g.dim)).lpNorm<Eigen::Infinity>() > 1e-12)
    throw std::invalid_argument("synthesis target must vanish at the origin");
}

// Grid sweep shared by the pointwise solvers: solve() returns the value
// stored at a node, pin() the exact value at the origin node.
template <typename Table, typename SolveFn>
void sweep(Table& table, const Vector& pin, const SolveFn& solve) {
  const BoxGrid& g = table.grid;
  std::vector<int> solved_order;
  solved_order.reserve(g.size());
  for (int lex : g.order()) {
    if (g.shell(lex) == 0) {
      table.values[lex] = pin;
      table.solved[lex] = 1;
      solved_order.push_back(lex);
      continue;
    }
    Vector warm;
    int inw = g.inward_neighbor(lex);
    if (table.solved[inw]) {
      warm = table.values[inw];
    } else {
      double best = std::numeric_limits<double>::infinity();
      int best_lex = -1;
      Vector y = g.point(lex);
      for (int s : solved_order) {
        double d = (g.point(s) - y).norm();
        if (d < best) {
          best = d;
          best_lex = s;
        }
      }
      warm = (best_lex >= 0) ? table.values[best_lex] : pin;
    }
    SolveOutcome out = solve(lex, warm);
    table.values[lex] = out.w;
    table.residuals[lex] = out.residual_inf;
    if (out.converged) {
      table.solved[lex] = 1;
      solved_order.push_back(lex);
    } else {
      table.unsolved.push_back(lex);
    }
  }
}

}  // namespace

FeedbackTable synthesize_feedback(const VectorFieldSpec& sys, const AutonomousField& target,
                                  double radius, int grid, double tol,
                                  const SolverOptions& opts) {
  if (sys.control_dim < 1) throw std::invalid_argument("synthesize_feedback requires m >= 1");
  if (target.dim != sys.state_dim) throw std::invalid_argument("target dimension mismatch");
  require_stationary_target(target);

  FeedbackTable table{BoxGrid(sys.state_dim, radius, grid), sys.control_dim, tol, target};
  table.values.assign(table.grid.size(), Vector::Zero(sys.control_dim));
  table.residuals.assign(table.grid.size(), 0.0);
  table.solved.assign(table.grid.size(), 0);

  FieldJacobian fj(sys, opts.fd_step);
  GaussNewtonOptions gn;
  gn.tol = tol;
  gn.max_iter = opts.max_iter;
  const double box = std::max(radius, 1.0);

  // residual at the pinned origin node records ||f(0,0) - G(0)||
  Vector origin_res = sys.eval(Vector::Zero(sys.state_dim), Vector::Zero(sys.control_dim)) -
                      target.eval(Vector::Zero(sys.state_dim));
  Vector pin = Vector::Zero(sys.control_dim);

  sweep(table, pin, [&](int lex, const Vector& warm) {
    Vector x = table.grid.point(lex);
    Vector gx = target.eval(x);
    ResidualFn res = [&sys, x, gx](const Vector& u) -> Vector { return sys.eval(x, u) - gx; };
    JacobianFn jac = [&fj, x](const Vector& u) { return fj.control_block(x, u); };
    return gauss_newton_multistart(res, jac, warm, box, opts.multistart,
                                   mix_seed(opts.seed, lex), gn);
  });
  table.residuals[table.grid.order()[0]] = origin_res.lpNorm<Eigen::Infinity>();
  return table;
}

SymbolTable synthesize_composition_symbol(const VectorFieldSpec& sys,
                                          const AutonomousField& target, double radius, int grid,
                                          double tol, const SolverOptions& opts) {
  if (target.dim != sys.state_dim) throw std::invalid_argument("target dimension mismatch");
  require_stationary_target(target);

  const int n = sys.state_dim, m = sys.control_dim;
  SymbolTable table{BoxGrid(n, radius, grid), m, tol, target};
  table.values.assign(table.grid.size(), Vector::Zero(n + m));
  table.residuals.assign(table.grid.size(), 0.0);
  table.solved.assign(table.grid.size(), 0);

  FieldJacobian fj(sys, opts.fd_step);
  GaussNewtonOptions gn;
  gn.tol = tol;
  gn.max_iter = opts.max_iter;

  Vector origin_res = sys.eval(Vector::Zero(n), Vector::Zero(m)) - target.eval(Vector::Zero(n));
  sweep(table, Vector::Zero(n + m), [&](int lex, const Vector& warm) {
    Vector gx = target.eval(table.grid.point(lex));
    ResidualFn res = [&sys, gx, n, m](const Vector& w) -> Vector {
      return sys.eval(w.head(n), w.tail(m)) - gx;
    };
    JacobianFn jac = [&fj, n, m](const Vector& w) { return fj.full(w.head(n), w.tail(m)); };
    return gauss_newton_multistart(res, jac, warm, radius, opts.multistart,
                                   mix_seed(opts.seed, lex), gn);
  });
  table.residuals[table.grid.order()[0]] = origin_res.lpNorm<Eigen::Infinity>();
  return table;
}

Vector invert_map(const VectorMap& map, const Vector& x, double tol, int max_iter,
                  double fd_step) {
  if (map.dim_in != map.dim_out) throw std::invalid_argument("invert_map requires a square map");
  Matrix J0 = jacobian_fd(map, Vector::Zero(map.dim_in), fd_step);
  if (std::abs(J0.determinant()) < 1e-12)
    throw SingularAtOrigin("map Jacobian at the origin is singular");
  GaussNewtonOptions gn;
  gn.tol = tol;
  gn.max_iter = max_iter;
  ResidualFn res = [&map, x](const Vector& y) -> Vector { return map(y) - x; };
  JacobianFn jac = [&map, fd_step](const Vector& y) { return jacobian_fd(map, y, fd_step); };
  SolveOutcome out = gauss_newton(res, jac, Vector::Zero(map.dim_in), gn);
  if (!out.converged) throw NoConvergence("invert_map did not converge");
  return out.w;
}

Vector invert_map(const AutonomousField& map, const Vector& x, double tol, int max_iter) {
  Matrix J0 = map.jacobian(Vector::Zero(map.dim));
  if (std::abs(J0.determinant()) < 1e-12)
    throw SingularAtOrigin("map Jacobian at the origin is singular");
  GaussNewtonOptions gn;
  gn.tol = tol;
  gn.max_iter = max_iter;
  ResidualFn res = [&map, x](const Vector& y) -> Vector { return map.eval(y) - x; };
  JacobianFn jac = [&map](const Vector& y) { return map.jacobian(y); };
  SolveOutcome out = gauss_newton(res, jac, Vector::Zero(map.dim), gn);
  if (!out.converged) throw NoConvergence("invert_map did not converge");
  return out.w;
}

FeedbackTable feedback_from_section(const VectorFieldSpec& sys, const SectionTable& section,
                                    double radius, int grid, double tol,
                                    const SolverOptions& opts) {
  if (!section.complete())
    throw std::invalid_argument("feedback_from_section requires a complete section table");
  const int n = sys.state_dim, m = sys.control_dim;
  if (m < 1) throw std::invalid_argument("feedback_from_section requires m >= 1");

  // state part alpha1 of the interpolated section
  auto values = std::make_shared<std::vector<Vector>>(section.values);
  auto sgrid = std::make_shared<BoxGrid>(section.grid);
  VectorMap alpha1{n, n, [values, sgrid, n](const Vector& y) -> Vector {
                     return sgrid->interpolate(*values, y).head(n);
                   }};
  Matrix J0 = jacobian_fd(alpha1, Vector::Zero(n), opts.fd_step);
  if (std::abs(J0.determinant()) < 1e-12)
    throw SingularAtOrigin("section state part has singular Jacobian at the origin");

  FeedbackTable table{BoxGrid(n, radius, grid), m, tol, std::nullopt};
  table.values.assign(table.grid.size(), Vector::Zero(m));
  table.residuals.assign(table.grid.size(), 0.0);
  table.solved.assign(table.grid.size(), 0);

  FieldJacobian fj(sys, opts.fd_step);
  GaussNewtonOptions gn;
  gn.tol = tol;
  gn.max_iter = opts.max_iter;
  const double box = std::max(radius, 1.0);

  sweep(table, Vector::Zero(m), [&](int lex, const Vector& warm) {
    Vector x = table.grid.point(lex);
    Vector y;
    try {
      y = invert_map(alpha1, x, tol, opts.max_iter, opts.fd_step);
    } catch (const NoConvergence&) {
      SolveOutcome failed;
      failed.w = warm;
      return failed;
    }
    Vector u0 = sgrid->interpolate(*values, y).tail(m);
    ResidualFn res = [&sys, x, y](const Vector& u) -> Vector { return sys.eval(x, u) - y; };
    JacobianFn jac = [&fj, x](const Vector& u) { return fj.control_block(x, u); };
    SolveOutcome out = gauss_newton_multistart(res, jac, u0, box, opts.multistart,
                                               mix_seed(opts.seed, lex), gn);
    (void)warm;
    return out;
  });
  return table;
}

bool check_exponential_condition(const Matrix& alpha1_jacobian_at_0) {
  const Matrix& J = alpha1_jacobian_at_0;
  if (J.rows() != J.cols()) throw std::invalid_argument("expected a square Jacobian");
  if (std::abs(J.determinant()) < 1e-12)
    throw SingularAtOrigin("alpha1 Jacobian at the origin is singular");
  Matrix inv = J.inverse();
  Eigen::EigenSolver<Matrix> es(inv, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) throw NumericFailure("eigensolver did not converge");
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()[i].real() >= -1e-9) return false;
  return true;
}

Vector control_at(const VectorFieldSpec& sys, const FeedbackTable& table, const Vector& x,
                  double tol, const SolverOptions& opts) {
  if (!table.target)
    throw std::invalid_argument("control_at requires a table with an expression target");
  if (x.lpNorm<Eigen::Infinity>() == 0.0) return Vector::Zero(sys.control_dim);
  Vector warm = table.grid.interpolate(table.values, x);
  Vector gx = table.target->eval(x);
  FieldJacobian fj(sys, opts.fd_step);
  ResidualFn res = [&sys, &x, &gx](const Vector& u) -> Vector { return sys.eval(x, u) - gx; };
  JacobianFn jac = [&fj, &x](const Vector& u) { return fj.control_block(x, u); };
  GaussNewtonOptions gn;
  gn.tol = tol;
  gn.max_iter = opts.max_iter;
  SolveOutcome out = gauss_newton_multistart(res, jac, warm, std::max(table.grid.radius(), 1.0),
                                             opts.multistart, opts.seed, gn);
  return out.w;  // the best u found: unsynthesizable points keep the warm/best value
}

VectorMap closed_loop_map(const VectorFieldSpec& sys, const FeedbackTable& table,
                          double polish_tol, const SolverOptions& opts) {
  if (!table.target)
    throw std::invalid_argument("closed_loop_map requires a table with an expression target");
  struct State {
    VectorFieldSpec sys;
    FeedbackTable table;
    FieldJacobian fj;
    GaussNewtonOptions gn;
    SolverOptions opts;
    double box;
  };
  auto st = std::make_shared<State>(
      State{sys, table, FieldJacobian(sys, opts.fd_step), GaussNewtonOptions{}, opts,
            std::max(table.grid.radius(), 1.0)});
  st->fj = FieldJacobian(st->sys, opts.fd_step);  // rebind to the copied system
  st->gn.tol = polish_tol;
  st->gn.max_iter = opts.max_iter;
  return VectorMap{sys.state_dim, sys.state_dim, [st](const Vector& x) -> Vector {
                     if (x.lpNorm<Eigen::Infinity>() == 0.0)
                       return st->sys.eval(x, Vector::Zero(st->sys.control_dim));
                     Vector warm = st->table.grid.interpolate(st->table.values, x);
                     Vector gx = st->table.target->eval(x);
                     ResidualFn res = [st, &x, &gx](const Vector& u) -> Vector {
                       return st->sys.eval(x, u) - gx;
                     };
                     JacobianFn jac = [st, &x](const Vector& u) {
                       return st->fj.control_block(x, u);
                     };
                     SolveOutcome out = gauss_newton_multistart(
                         res, jac, warm, st->box, st->opts.multistart, st->opts.seed, st->gn);
                     return st->sys.eval(x, out.w);
                   }};
}

}  // namespace stabkit
