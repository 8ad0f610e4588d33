#include "stabkit/gauss_newton.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <random>

#include "stabkit/errors.hpp"

namespace stabkit {

namespace {

void project_ball(Vector& w, double radius) {
  if (radius <= 0) return;
  double n = w.norm();
  if (n > radius) w *= radius / n;
}

Vector pinv_apply(const Matrix& J, const Vector& r, double cutoff_rel) {
  Eigen::JacobiSVD<Matrix> svd(J, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sigma = svd.singularValues();
  if (sigma.size() == 0) return Vector::Zero(J.cols());
  double cutoff = cutoff_rel * sigma[0];
  Vector y = svd.matrixU().transpose() * r;
  for (Eigen::Index i = 0; i < sigma.size(); ++i)
    y[i] = (sigma[i] > cutoff && sigma[i] > 0) ? y[i] / sigma[i] : 0.0;
  return svd.matrixV() * y;
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ull * (b + 1);
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ull;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebull;
  z ^= z >> 31;
  return z;
}

SolveOutcome gauss_newton(const ResidualFn& residual, const JacobianFn& jacobian, Vector w,
                          const GaussNewtonOptions& opt) {
  project_ball(w, opt.ball_radius);
  Vector r = residual(w);
  double rnorm = r.norm();
  SolveOutcome out;
  out.w = w;
  int stalled = 0;

  for (int it = 0; it < opt.max_iter; ++it) {
    if (r.lpNorm<Eigen::Infinity>() <= opt.tol) break;
    out.iterations = it + 1;

    Matrix J = jacobian(w);
    Vector delta = -pinv_apply(J, r, opt.svd_cutoff);

    bool accepted = false;
    double prev = rnorm;
    if (delta.allFinite() && delta.norm() > 0) {
      double t = 1.0;
      for (int b = 0; b <= opt.max_backtracks; ++b, t *= 0.5) {
        Vector wt = w + t * delta;
        project_ball(wt, opt.ball_radius);
        Vector rt;
        try {
          rt = residual(wt);
        } catch (const NumericDomainError&) {
          continue;
        }
        if (rt.allFinite() && rt.norm() < rnorm) {
          w = wt;
          r = rt;
          rnorm = rt.norm();
          accepted = true;
          break;
        }
      }
    }

    double decrease = accepted ? (prev - rnorm) / std::max(prev, 1e-300) : 0.0;
    if (decrease < opt.stall_rel_decrease) {
      if (++stalled >= opt.stall_window) break;
    } else {
      stalled = 0;
    }
  }

  out.w = w;
  out.residual_inf = r.lpNorm<Eigen::Infinity>();
  out.residual_norm = rnorm;
  out.converged = out.residual_inf <= opt.tol;
  return out;
}

SolveOutcome gauss_newton_multistart(const ResidualFn& residual, const JacobianFn& jacobian,
                                     const Vector& start, double box, int starts,
                                     std::uint64_t seed, const GaussNewtonOptions& opt) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-box, box);
  SolveOutcome best;
  best.w = start;
  int failures = 0;
  for (int k = 0; k < std::max(1, starts); ++k) {
    Vector w0 = start;
    if (k > 0)
      for (int i = 0; i < w0.size(); ++i) w0[i] = dist(rng);
    SolveOutcome out;
    try {
      out = gauss_newton(residual, jacobian, w0, opt);
    } catch (const NumericDomainError&) {
      ++failures;
      continue;
    }
    out.attempts = k + 1;
    if (out.converged) return out;
    if (out.residual_norm < best.residual_norm) {
      int attempts = out.attempts;
      best = out;
      best.attempts = attempts;
    }
  }
  best.attempts = std::max(1, starts);
  best.all_starts_failed = (failures == std::max(1, starts));
  return best;
}

}  // namespace stabkit
