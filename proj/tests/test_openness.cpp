#include <doctest.h>

#include <cmath>
#include <random>

#include "stabkit/openness.hpp"
#include "stabkit/section.hpp"

using namespace stabkit;

TEST_CASE("openness probe finds the integrator obstruction along e3") {
  const auto& sys = corpus_system("brockett_integrator");
  OpennessReport rep = openness_probe(sys, 0.5, 12, 42);
  CHECK(rep.violation);
  REQUIRE(rep.witness.has_value());
  // witness is +-e3
  Vector w = *rep.witness;
  CHECK(std::abs(w[0]) <= 1e-12);
  CHECK(std::abs(w[1]) <= 1e-12);
  CHECK(std::abs(std::abs(w[2]) - 1.0) <= 1e-12);
  // the analytic floor on the relative residual at r=0.5 is 1/sqrt(1.25)
  int e3 = 4;  // directions are ordered +e1,-e1,+e2,-e2,+e3,-e3,...
  CHECK(rep.best_residual[e3] >= doctest::Approx(1.0 / std::sqrt(1.25)).epsilon(1e-3));
  CHECK(rep.unresolved == 0);

  // cross-module consistency: the witness target must defeat the
  // unconstrained pointwise solver as well when started inside the ball
  Vector y = Vector::Zero(3);
  y[2] = 0.1;
  SolveOutcome out = solve_section_point(sys, y, Vector::Zero(5), 1e-8, 100);
  CHECK_FALSE(out.converged);
}

TEST_CASE("openness probe clears solvable systems") {
  OpennessReport cubic = openness_probe(corpus_system("cubic_scalar"), 0.5, 4, 42);
  CHECK_FALSE(cubic.violation);
  for (double rel : cubic.best_residual) CHECK(rel <= 1e-6);

  OpennessReport so = openness_probe(corpus_system("state_only"), 0.5, 4, 42);
  CHECK_FALSE(so.violation);
}

TEST_CASE("openness probe is deterministic") {
  const auto& sys = corpus_system("brockett_integrator");
  OpennessReport a = openness_probe(sys, 0.5, 12, 7);
  OpennessReport b = openness_probe(sys, 0.5, 12, 7);
  REQUIRE(a.directions.size() == b.directions.size());
  for (std::size_t i = 0; i < a.directions.size(); ++i) {
    CHECK((a.directions[i] - b.directions[i]).norm() == 0.0);
    CHECK(a.worst_residual[i] == b.worst_residual[i]);
  }
  CHECK(a.violation == b.violation);
}

TEST_CASE("full-row-rank linear systems never trip the probe") {
  std::mt19937_64 rng(2718);
  std::uniform_real_distribution<double> entry(-2, 2);
  for (int trial = 0; trial < 5; ++trial) {
    int n = 1 + static_cast<int>(rng() % 3);
    int m = 1 + static_cast<int>(rng() % 2);
    // assemble f = A x + B u as expressions; random [A|B] has full row rank
    // almost surely (checked below)
    Matrix A(n, n), B(n, m);
    std::vector<ExprPtr> comps;
    for (int i = 0; i < n; ++i) {
      ExprPtr e = Expr::number(0.0);
      for (int j = 0; j < n; ++j) {
        A(i, j) = entry(rng);
        e = Expr::add(e, Expr::mul(Expr::number(A(i, j)), Expr::var(VarKind::State, j + 1)));
      }
      for (int j = 0; j < m; ++j) {
        B(i, j) = entry(rng);
        e = Expr::add(e, Expr::mul(Expr::number(B(i, j)), Expr::var(VarKind::Control, j + 1)));
      }
      comps.push_back(e);
    }
    Matrix J(n, n + m);
    J << A, B;
    REQUIRE(Eigen::FullPivLU<Matrix>(J).rank() == n);
    VectorFieldSpec sys("linear", n, m, std::move(comps));
    OpennessReport rep = openness_probe(sys, 0.5, 2 * n + 2, mix_seed(5, trial));
    CHECK_FALSE(rep.violation);
  }
}

TEST_CASE("injectivity probe") {
  // x -> -x on a 21-point grid
  AutonomousField neg(1, {parse_expression("-x1")});
  InjectivityReport rep = injectivity_probe(neg, 0.5, 21);
  CHECK(rep.injective_on_grid);

  // constant map collides
  AutonomousField constant(1, {parse_expression("0*x1")});
  InjectivityReport col = injectivity_probe(constant, 0.5, 5);
  CHECK_FALSE(col.injective_on_grid);
  CHECK(col.image_distance <= 1e-12);

  // the example_2d closed loop: injective on a small box, but genuinely not
  // on radius 0.2 with 15 nodes -- the nodes (2h, -h) and (6h, -2h) with
  // h = 1/35 share an image (exact algebra: equal second components force
  // the offset t = h, equal first components then force h = 1/35)
  AutonomousField loop(2, {parse_expression("x1^2 + x2^2 + x2"),
                           parse_expression("-2*x2 - x1/2")});
  InjectivityReport small = injectivity_probe(loop, 0.05, 15);
  CHECK(small.injective_on_grid);
  CHECK(small.failed_points == 0);

  InjectivityReport wide = injectivity_probe(loop, 0.2, 15);
  CHECK_FALSE(wide.injective_on_grid);
  // the reported pair is a genuine collision of distinct nodes
  CHECK((wide.collision_a - wide.collision_b).norm() > 0.01);
  CHECK((loop.eval(wide.collision_a) - loop.eval(wide.collision_b)).norm() <= 1e-12);
}
