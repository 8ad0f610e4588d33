#include "stabkit/section.hpp"

#include <cmath>

#include "stabkit/errors.hpp"

namespace stabkit {

namespace {

ResidualFn section_residual(const VectorFieldSpec& sys, Vector y) {
  const int n = sys.state_dim, m = sys.control_dim;
  return [&sys, y = std::move(y), n, m](const Vector& w) -> Vector {
    return sys.eval(w.head(n), w.tail(m)) - y;
  };
}

JacobianFn section_jacobian(const VectorFieldSpec& sys, const FieldJacobian& fj) {
  const int n = sys.state_dim, m = sys.control_dim;
  return [&fj, n, m](const Vector& w) { return fj.full(w.head(n), w.tail(m)); };
}

}  // namespace

SolveOutcome solve_section_point(const VectorFieldSpec& sys, const Vector& y,
                                 const Vector& warm_start, double tol, int max_iter) {
  FieldJacobian fj(sys);
  GaussNewtonOptions opt;
  opt.tol = tol;
  opt.max_iter = max_iter;
  return gauss_newton(section_residual(sys, y), section_jacobian(sys, fj), warm_start, opt);
}

SectionTable build_section(const VectorFieldSpec& sys, double radius, int grid, double tol,
                           const SolverOptions& opts) {
  const int n = sys.state_dim, m = sys.control_dim;
  SectionTable table{BoxGrid(n, radius, grid), m, tol};
  const BoxGrid& g = table.grid;
  table.values.assign(g.size(), Vector::Zero(n + m));
  table.residuals.assign(g.size(), 0.0);
  table.solved.assign(g.size(), 0);

  FieldJacobian fj(sys, opts.fd_step);
  JacobianFn jac = section_jacobian(sys, fj);
  GaussNewtonOptions gn;
  gn.tol = tol;
  gn.max_iter = opts.max_iter;

  std::vector<int> solved_order;  // lex indices of solved nodes, in solve order
  solved_order.reserve(g.size());

  for (int lex : g.order()) {
    Vector y = g.point(lex);
    if (g.shell(lex) == 0) {
      // alpha(0) = 0 pinned exactly
      Vector w0 = Vector::Zero(n + m);
      table.values[lex] = w0;
      table.residuals[lex] = section_residual(sys, y)(w0).lpNorm<Eigen::Infinity>();
      table.solved[lex] = 1;
      solved_order.push_back(lex);
      continue;
    }

    // warm start: inward neighbor if solved, else nearest solved node
    Vector warm;
    int inw = g.inward_neighbor(lex);
    if (table.solved[inw]) {
      warm = table.values[inw];
    } else {
      double best = std::numeric_limits<double>::infinity();
      int best_lex = -1;
      for (int s : solved_order) {
        double d = (g.point(s) - y).norm();
        if (d < best) {
          best = d;
          best_lex = s;
        }
      }
      warm = (best_lex >= 0) ? table.values[best_lex] : Vector::Zero(n + m);
    }

    SolveOutcome out = gauss_newton_multistart(section_residual(sys, y), jac, warm, radius,
                                               opts.multistart, mix_seed(opts.seed, lex), gn);
    table.values[lex] = out.w;
    table.residuals[lex] = out.residual_inf;
    if (out.converged) {
      table.solved[lex] = 1;
      solved_order.push_back(lex);
    } else {
      table.unsolved.push_back(lex);
    }
  }

  // empirical Lipschitz constant over axis-adjacent solved pairs
  double lip = 0.0;
  for (int lex = 0; lex < g.size(); ++lex) {
    if (!table.solved[lex]) continue;
    std::vector<int> mi = g.multi(lex);
    for (int d = 0; d < g.dim(); ++d) {
      if (mi[d] + 1 >= g.per_axis()) continue;
      ++mi[d];
      int other = g.lex(mi);
      --mi[d];
      if (!table.solved[other]) continue;
      double dy = (g.point(other) - g.point(lex)).norm();
      double dw = (table.values[other] - table.values[lex]).norm();
      if (dy > 0) lip = std::max(lip, dw / dy);
    }
  }
  table.lipschitz = lip;
  return table;
}

double check_section(const VectorFieldSpec& sys, const SectionTable& table) {
  const int n = sys.state_dim, m = sys.control_dim;
  double worst = 0.0;
  for (int lex = 0; lex < table.grid.size(); ++lex) {
    if (!table.solved[lex]) continue;
    const Vector& w = table.values[lex];
    Vector r = sys.eval(w.head(n), w.tail(m)) - table.grid.point(lex);
    worst = std::max(worst, r.lpNorm<Eigen::Infinity>());
  }
  return worst;
}

}  // namespace stabkit
