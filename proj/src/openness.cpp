#include "stabkit/openness.hpp"

#include <cmath>
#include <random>

#include "stabkit/errors.hpp"

namespace stabkit {

namespace {

constexpr double kViolationThreshold = 0.5;

}  // namespace

OpennessReport openness_probe(const VectorFieldSpec& sys, double radius, int directions,
                              std::uint64_t seed, const SolverOptions& opts) {
  const int n = sys.state_dim, m = sys.control_dim;
  if (radius <= 0) throw std::invalid_argument("radius must be positive");
  if (directions < 2 * n) throw std::invalid_argument("need at least 2n directions");

  OpennessReport report;
  report.attempts_per_target = opts.multistart;

  // axis directions first, then seeded random unit directions
  for (int i = 0; i < n; ++i) {
    Vector e = Vector::Zero(n);
    e[i] = 1.0;
    report.directions.push_back(e);
    report.directions.push_back(-e);
  }
  std::mt19937_64 rng(mix_seed(seed, 0x0bea7));
  std::normal_distribution<double> gauss(0.0, 1.0);
  while (static_cast<int>(report.directions.size()) < directions) {
    Vector d(n);
    do {
      for (int i = 0; i < n; ++i) d[i] = gauss(rng);
    } while (d.norm() == 0);
    report.directions.push_back(d / d.norm());
  }

  for (double r : {radius, radius / 2, radius / 4}) {
    report.scales.emplace_back(r, 0.1 * r);
    if (n > 1) report.scales.emplace_back(r, 0.01 * r * r);
  }

  FieldJacobian fj(sys, opts.fd_step);
  JacobianFn jac = [&fj, n, m](const Vector& w) { return fj.full(w.head(n), w.tail(m)); };

  report.worst_residual.assign(report.directions.size(), 0.0);
  report.best_residual.assign(report.directions.size(),
                              std::numeric_limits<double>::infinity());

  for (std::size_t di = 0; di < report.directions.size(); ++di) {
    const Vector& d = report.directions[di];
    for (std::size_t si = 0; si < report.scales.size(); ++si) {
      auto [r, rho] = report.scales[si];
      Vector y = rho * d;
      ResidualFn res = [&sys, y, n, m](const Vector& w) -> Vector {
        return sys.eval(w.head(n), w.tail(m)) - y;
      };
      GaussNewtonOptions gn;
      gn.max_iter = opts.max_iter;
      gn.ball_radius = r;
      gn.tol = 1e-6 * y.norm() / std::sqrt(static_cast<double>(n));
      SolveOutcome out = gauss_newton_multistart(
          res, jac, Vector::Zero(n + m), r, opts.multistart,
          mix_seed(seed, 1000 * (di + 1) + si), gn);
      if (out.all_starts_failed) {
        ++report.unresolved;
        continue;
      }
      double rel = out.residual_norm / y.norm();
      report.worst_residual[di] = std::max(report.worst_residual[di], rel);
      report.best_residual[di] = std::min(report.best_residual[di], rel);
    }
    if (std::isfinite(report.best_residual[di]) &&
        report.best_residual[di] > kViolationThreshold) {
      report.violating.push_back(static_cast<int>(di));
      if (!report.witness) report.witness = d;
    }
  }
  report.violation = !report.violating.empty();
  return report;
}

InjectivityReport injectivity_probe(const AutonomousField& map, double radius, int grid) {
  if (map.dim > 3) throw std::invalid_argument("injectivity probe limited to n <= 3");
  if (grid < 3) throw std::invalid_argument("grid must be >= 3 per axis");
  if (radius <= 0) throw std::invalid_argument("radius must be positive");

  // the probe grid allows even point counts; reuse spacing logic directly
  const int n = map.dim;
  int total = 1;
  for (int d = 0; d < n; ++d) total *= grid;
  double spacing = 2 * radius / (grid - 1);

  std::vector<Vector> points, images;
  points.reserve(total);
  images.reserve(total);
  InjectivityReport report;
  report.grid = grid;
  for (int idx = 0; idx < total; ++idx) {
    int rem = idx;
    Vector p(n);
    for (int d = n - 1; d >= 0; --d) {
      p[d] = -radius + (rem % grid) * spacing;
      rem /= grid;
    }
    try {
      Vector img = map.eval(p);
      points.push_back(p);
      images.push_back(img);
    } catch (const NumericDomainError&) {
      ++report.failed_points;
    }
  }

  double best = std::numeric_limits<double>::infinity();
  std::size_t bi = 0, bj = 0;
  for (std::size_t i = 0; i < images.size(); ++i)
    for (std::size_t j = i + 1; j < images.size(); ++j) {
      double dist = (images[i] - images[j]).norm();
      if (dist < best) {
        best = dist;
        bi = i;
        bj = j;
      }
    }
  if (images.size() >= 2) {
    report.image_distance = best;
    double threshold = 1e-9 * (1.0 + spacing);
    if (best <= threshold) {
      report.injective_on_grid = false;
      report.collision_a = points[bi];
      report.collision_b = points[bj];
    }
  }
  return report;
}

}  // namespace stabkit
