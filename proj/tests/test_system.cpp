#include <doctest.h>

#include <cmath>

#include "stabkit/errors.hpp"
#include "stabkit/system.hpp"

using namespace stabkit;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

}  // namespace

TEST_CASE("corpus contains the four reference systems") {
  CHECK(corpus().size() == 4);

  const auto& brockett = corpus_system("brockett_integrator");
  CHECK(brockett.state_dim == 3);
  CHECK(brockett.control_dim == 2);

  const auto& cubic = corpus_system("cubic_scalar");
  CHECK(cubic.eval(vec({0}), vec({0}))[0] == 0.0);

  const auto& state_only = corpus_system("state_only");
  CHECK(state_only.eval(vec({1}), vec({99}))[0] == 1.0);

  CHECK(corpus_system("example_2d").state_dim == 2);
  CHECK_THROWS_AS(corpus_system("nope"), std::invalid_argument);
}

TEST_CASE("eval_field matches direct arithmetic") {
  const auto& brockett = corpus_system("brockett_integrator");
  Vector f = eval_field(brockett, vec({1, 2, 0}), vec({3, 4}));
  CHECK(f[0] == doctest::Approx(3));
  CHECK(f[1] == doctest::Approx(4));
  CHECK(f[2] == doctest::Approx(1 * 4 - 2 * 3));

  const auto& cubic = corpus_system("cubic_scalar");
  CHECK(eval_field(cubic, vec({0.5}), vec({-1}))[0] == doctest::Approx(-0.5));

  for (const auto& sys : corpus()) {
    Vector f0 = eval_field(sys, Vector::Zero(sys.state_dim), Vector::Zero(sys.control_dim));
    CHECK(f0.lpNorm<Eigen::Infinity>() <= 1e-12);
  }
}

TEST_CASE("construction validates dimensions and the equilibrium") {
  CHECK_THROWS_AS(VectorFieldSpec("bad", 1, 0, {parse_expression("x2")}), std::invalid_argument);
  CHECK_THROWS_AS(VectorFieldSpec("bad", 1, 0, {parse_expression("u1")}), std::invalid_argument);
  CHECK_THROWS_AS(VectorFieldSpec("bad", 1, 1, {parse_expression("x1 + 1")}),
                  std::invalid_argument);
  CHECK_NOTHROW(VectorFieldSpec("ok", 2, 0, {parse_expression("x2"), parse_expression("-x1")}));
}

TEST_CASE("linearize recovers the documented Jacobians") {
  // x + u^3: A = [1], B = [0]
  Linearization cubic = linearize(corpus_system("cubic_scalar"));
  CHECK(cubic.A(0, 0) == doctest::Approx(1.0));
  CHECK(cubic.B(0, 0) == doctest::Approx(0.0).epsilon(1e-12));

  // Brockett integrator: A = 0, B = [[1,0],[0,1],[0,0]]
  Linearization br = linearize(corpus_system("brockett_integrator"));
  CHECK(br.A.lpNorm<Eigen::Infinity>() == doctest::Approx(0.0).epsilon(1e-12));
  Matrix Bexp(3, 2);
  Bexp << 1, 0, 0, 1, 0, 0;
  CHECK((br.B - Bexp).lpNorm<Eigen::Infinity>() <= 1e-12);

  Linearization so = linearize(corpus_system("state_only"));
  CHECK(so.A(0, 0) == doctest::Approx(1.0));
  CHECK(so.B(0, 0) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("linearize falls back to finite differences on cbrt singularities") {
  // f(x,u) = cbrt(x)^2 * something is awkward; use f = cbrt(x1)*x1 whose
  // symbolic derivative divides by cbrt(x1)^2 at the origin. True derivative
  // of x^(4/3) at 0 is 0.
  VectorFieldSpec sys("cbrt_fallback", 1, 0, {parse_expression("cbrt(x1)*x1")});
  Linearization lin = linearize(sys);
  CHECK(std::abs(lin.A(0, 0)) <= 1e-4);
}

TEST_CASE("linearize agrees with the FD Jacobian of the joint map") {
  for (const auto& sys : corpus()) {
    const int n = sys.state_dim, m = sys.control_dim;
    Linearization lin = linearize(sys);
    VectorMap joint{n + m, n, [&sys, n, m](const Vector& w) {
                      return sys.eval(w.head(n), w.tail(m));
                    }};
    Matrix J = jacobian_fd(joint, Vector::Zero(n + m), 1e-6);
    CHECK((J.leftCols(n) - lin.A).lpNorm<Eigen::Infinity>() <= 1e-5);
    CHECK((J.rightCols(m) - lin.B).lpNorm<Eigen::Infinity>() <= 1e-5);
  }
}

TEST_CASE("jacobian_fd on reference maps") {
  // identity map
  VectorMap ident{2, 2, [](const Vector& x) { return x; }};
  Matrix J = jacobian_fd(ident, vec({0.3, -0.7}), 1e-6);
  CHECK((J - Matrix::Identity(2, 2)).lpNorm<Eigen::Infinity>() <= 1e-9);

  // closed loop of x + u^3 with u = cbrt(-2x) is exactly -x
  const auto& cubic = corpus_system("cubic_scalar");
  VectorMap loop{1, 1, [&cubic](const Vector& x) {
                   Vector u(1);
                   u[0] = std::cbrt(-2 * x[0]);
                   return cubic.eval(x, u);
                 }};
  Matrix Jl = jacobian_fd(loop, vec({0.1}), 1e-6);
  CHECK(Jl(0, 0) == doctest::Approx(-1.0).epsilon(1e-5));

  // example_2d closed loop at the origin
  const auto& ex2 = corpus_system("example_2d");
  VectorMap loop2{2, 2, [&ex2](const Vector& x) {
                    Vector u(1);
                    u[0] = std::cbrt(-2 * x[1] - 0.5 * x[0] - x[0] * x[1] - x[1] * x[1]);
                    return ex2.eval(x, u);
                  }};
  Matrix J2 = jacobian_fd(loop2, vec({0, 0}), 1e-6);
  Matrix expected(2, 2);
  expected << 0, 1, -0.5, -2;
  CHECK((J2 - expected).lpNorm<Eigen::Infinity>() <= 1e-5);
}

TEST_CASE("autonomous field jacobian is exact for smooth fields") {
  AutonomousField g(2, {parse_expression("x1^2 + x2^2 + x2"),
                        parse_expression("-2*x2 - x1/2")});
  Matrix J = g.jacobian(vec({0, 0}));
  CHECK(J(0, 0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(J(0, 1) == doctest::Approx(1.0));
  CHECK(J(1, 0) == doctest::Approx(-0.5));
  CHECK(J(1, 1) == doctest::Approx(-2.0));
}

TEST_CASE("default target is -x") {
  AutonomousField g = default_target(3);
  Vector v = g.eval(vec({1, -2, 0.5}));
  CHECK(v[0] == -1.0);
  CHECK(v[1] == 2.0);
  CHECK(v[2] == -0.5);
}
