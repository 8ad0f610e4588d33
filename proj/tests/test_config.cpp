#include <doctest.h>

#include "stabkit/config.hpp"
#include "stabkit/errors.hpp"

using namespace stabkit;

TEST_CASE("corpus configs apply defaults including the -x target") {
  RunConfig cfg = parse_config_text("[system]\nsystem = cubic_scalar\n");
  CHECK(cfg.system.name == "cubic_scalar");
  CHECK(cfg.radius == 0.5);
  CHECK(cfg.grid == 21);
  CHECK(cfg.tol == 1e-8);
  CHECK(cfg.max_iter == 100);
  CHECK(cfg.fd_step == 1e-6);
  CHECK(cfg.seed == 42);
  CHECK(cfg.multistart == 8);
  CHECK(cfg.t_final == 20);
  CHECK(cfg.num_initial == 8);
  // default target is -x1
  Vector x(1);
  x << 0.25;
  CHECK(cfg.target.eval(x)[0] == -0.25);
}

TEST_CASE("inline systems parse and validate") {
  const char* text =
      "# Brockett integrator, written inline\n"
      "[system]\n"
      "n = 3\n"
      "m = 2\n"
      "f1 = u1\n"
      "f2 = u2\n"
      "f3 = x1*u2 - x2*u1\n"
      "[solver]\n"
      "radius = 0.25\n"
      "grid = 9\n";
  RunConfig cfg = parse_config_text(text);
  CHECK(cfg.system.state_dim == 3);
  CHECK(cfg.system.control_dim == 2);
  CHECK(cfg.radius == 0.25);
  CHECK(cfg.grid == 9);
  Vector x(3), u(2);
  x << 1, 2, 0;
  u << 3, 4;
  CHECK(cfg.system.eval(x, u)[2] == doctest::Approx(-2.0));
}

TEST_CASE("config errors carry line numbers") {
  auto expect_line = [](const char* text, int line) {
    try {
      parse_config_text(text);
      FAIL_CHECK("expected ConfigError for: ", text);
    } catch (const ConfigError& e) {
      CHECK_MESSAGE(e.line() == line, e.what());
    }
  };

  // even grid
  expect_line("[system]\nsystem = cubic_scalar\n[solver]\ngrid = 10\n", 4);
  // unknown key
  expect_line("[system]\nsystem = cubic_scalar\n[solver]\nbogus = 1\n", 4);
  // unknown corpus name
  expect_line("[system]\nsystem = nope\n", 2);
  // bad expression
  expect_line("[system]\nn = 1\nm = 1\nf1 = x1 +\n", 4);
  // f(0,0) != 0
  expect_line("[system]\nn = 1\nm = 1\nf1 = x1 + 1\n", 4);
  // target not vanishing at the origin
  expect_line("[system]\nsystem = cubic_scalar\n[target]\ng1 = x1 + 0.5\n", 4);
  // target with control variables
  expect_line("[system]\nsystem = cubic_scalar\n[target]\ng1 = u1\n", 4);
  // duplicate key
  expect_line("[system]\nsystem = cubic_scalar\n[solver]\ntol = 1e-8\ntol = 1e-9\n", 5);
  // radius must be positive
  expect_line("[system]\nsystem = cubic_scalar\n[solver]\nradius = -1\n", 4);
  // num_initial lower bound
  expect_line("[system]\nsystem = cubic_scalar\n[simulate]\nnum_initial = 2\n", 4);
}

TEST_CASE("comments and blank lines are ignored") {
  const char* text =
      "\n"
      "# leading comment\n"
      "[system]  # trailing comment\n"
      "system = state_only\n"
      "\n"
      "[simulate]\n"
      "t_final = 5 # short horizon\n";
  RunConfig cfg = parse_config_text(text);
  CHECK(cfg.system.name == "state_only");
  CHECK(cfg.t_final == 5);
}

TEST_CASE("missing system section is an error") {
  CHECK_THROWS_AS(parse_config_text("[solver]\ngrid = 21\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text(""), ConfigError);
}
