#include "stabkit/verify.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <random>

#include "stabkit/errors.hpp"
#include "stabkit/linear_analysis.hpp"

namespace stabkit {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
// b (5th order) minus b-hat (4th order): error estimator weights.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
// dense output weights
constexpr double d1 = -12715105075.0 / 11282082432.0;
constexpr double d3 = 87487479700.0 / 32700410799.0;
constexpr double d4 = -10690763975.0 / 1880347072.0;
constexpr double d5 = 701980252875.0 / 199316789632.0;
constexpr double d6 = -1453857185.0 / 822651844.0;
constexpr double d7 = 69997945.0 / 29380423.0;

double error_norm(const Vector& err, const Vector& y, const Vector& ynew, double rel, double abs) {
  double acc = 0;
  for (Eigen::Index i = 0; i < err.size(); ++i) {
    double scale = abs + rel * std::max(std::abs(y[i]), std::abs(ynew[i]));
    double q = err[i] / scale;
    acc += q * q;
  }
  return std::sqrt(acc / static_cast<double>(err.size()));
}

double initial_step(const VectorMap& f, const Vector& y0, const Vector& f0, double t_final,
                    double rel, double abs) {
  double d0 = 0, d1n = 0;
  for (Eigen::Index i = 0; i < y0.size(); ++i) {
    double sc = abs + rel * std::abs(y0[i]);
    d0 += (y0[i] / sc) * (y0[i] / sc);
    d1n += (f0[i] / sc) * (f0[i] / sc);
  }
  d0 = std::sqrt(d0 / y0.size());
  d1n = std::sqrt(d1n / y0.size());
  double h0 = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 * t_final : 0.01 * d0 / d1n;
  h0 = std::min(h0, t_final);
  Vector y1 = y0 + h0 * f0;
  Vector f1;
  try {
    f1 = f(y1);
  } catch (const NumericDomainError&) {
    return std::min(h0, t_final / 100);
  }
  double d2 = 0;
  for (Eigen::Index i = 0; i < y0.size(); ++i) {
    double sc = abs + rel * std::abs(y0[i]);
    double q = (f1[i] - f0[i]) / sc;
    d2 += q * q;
  }
  d2 = std::sqrt(d2 / y0.size()) / h0;
  double dmax = std::max(d1n, d2);
  double h1 = (dmax <= 1e-15) ? std::max(1e-6 * t_final, h0 * 1e-3)
                              : std::pow(0.01 / dmax, 0.2);
  return std::min({100 * h0, h1, t_final});
}

}  // namespace

namespace {

enum class SimStatus { Ok, Truncated, Underflow };

SimStatus simulate_impl(const VectorMap& field, const Vector& x0, double t_final,
                        const SimulateOptions& opts, Trajectory& traj) {
  if (t_final <= 0) throw std::invalid_argument("t_final must be positive");
  if (opts.samples < 2) throw std::invalid_argument("need at least two samples");
  if (x0.size() != field.dim_in) throw std::invalid_argument("x0 dimension mismatch");
  traj.times.reserve(opts.samples);
  traj.states.reserve(opts.samples);
  std::vector<double> sample_times(opts.samples);
  for (int k = 0; k < opts.samples; ++k)
    sample_times[k] = t_final * static_cast<double>(k) / (opts.samples - 1);

  Vector y = x0;
  double t = 0;
  Vector k1 = field(y);
  if (!y.allFinite() || !k1.allFinite()) {
    traj.truncated = true;
    return SimStatus::Truncated;
  }
  traj.times.push_back(0.0);
  traj.states.push_back(y);
  std::size_t next_sample = 1;

  double h = initial_step(field, y, k1, t_final, opts.rel_tol, opts.abs_tol);

  while (next_sample < sample_times.size()) {
    bool last_step = false;
    if (t + h >= t_final) {
      h = t_final - t;
      last_step = true;
    }
    double hmin = 16.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(t), 1.0);
    if (h < hmin) {
      if (t > traj.times.back()) {
        traj.times.push_back(t);
        traj.states.push_back(y);
      }
      return SimStatus::Underflow;
    }

    Vector k2 = field(y + h * (a21 * k1));
    Vector k3 = field(y + h * (a31 * k1 + a32 * k2));
    Vector k4 = field(y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    Vector k5 = field(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    Vector k6 = field(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    Vector ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    Vector k7 = field(ynew);
    Vector err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    if (!ynew.allFinite() || !k7.allFinite()) {
      // shrink; if the state blew up at the smallest step, truncate and flag
      if (h / 2 < hmin) {
        if (t > traj.times.back()) {
          traj.times.push_back(t);
          traj.states.push_back(y);
        }
        traj.truncated = true;
        return SimStatus::Truncated;
      }
      h /= 2;
      continue;
    }

    double en = error_norm(err, y, ynew, opts.rel_tol, opts.abs_tol);
    if (en <= 1.0) {
      // dense output over [t, t + h]
      Vector ydiff = ynew - y;
      Vector bspl = h * k1 - ydiff;
      Vector rcont4 = ydiff - h * k7 - bspl;
      Vector rcont5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
      while (next_sample < sample_times.size() &&
             (sample_times[next_sample] <= t + h || last_step)) {
        double theta = std::clamp((sample_times[next_sample] - t) / h, 0.0, 1.0);
        double theta1 = 1.0 - theta;
        Vector ys = y + theta * (ydiff + theta1 * (bspl + theta * (rcont4 + theta1 * rcont5)));
        traj.times.push_back(sample_times[next_sample]);
        traj.states.push_back(ys);
        ++next_sample;
      }
      t += h;
      y = ynew;
      k1 = k7;  // FSAL
      double fac = std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
      h = std::min(h * fac, t_final);
      if (last_step) break;
    } else {
      h *= std::max(0.2, 0.9 * std::pow(en, -0.2));
    }
  }
  // the last sample coincides with t_final; replace the interpolant by the
  // integrator endpoint when it was reached exactly
  if (!traj.times.empty() && traj.times.back() == t_final) traj.states.back() = y;
  return SimStatus::Ok;
}

}  // namespace

Trajectory simulate(const VectorMap& field, const Vector& x0, double t_final,
                    const SimulateOptions& opts) {
  Trajectory traj;
  SimStatus status = simulate_impl(field, x0, t_final, opts, traj);
  if (status == SimStatus::Underflow)
    throw StepSizeUnderflow("step size underflow before t_final");
  return traj;
}

std::string_view to_string(StabilityClass c) {
  switch (c) {
    case StabilityClass::Exponential: return "exponential";
    case StabilityClass::AsymptoticOnly: return "asymptotic-only";
    case StabilityClass::Diverged: return "diverged";
    case StabilityClass::Inconclusive: return "inconclusive";
  }
  return "?";
}

namespace {

struct Fit {
  double slope = 0, r_squared = 0;
  bool ok = false;
};

Fit fit_line(const std::vector<double>& t, const std::vector<double>& v) {
  Fit f;
  const std::size_t n = t.size();
  if (n < 3) return f;
  double mt = 0, mv = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mt += t[i];
    mv += v[i];
  }
  mt /= n;
  mv /= n;
  double stt = 0, stv = 0, svv = 0;
  for (std::size_t i = 0; i < n; ++i) {
    stt += (t[i] - mt) * (t[i] - mt);
    stv += (t[i] - mt) * (v[i] - mv);
    svv += (v[i] - mv) * (v[i] - mv);
  }
  if (stt == 0) return f;
  f.slope = stv / stt;
  f.r_squared = (svv == 0) ? 1.0 : (stv * stv) / (stt * svv);
  f.ok = true;
  return f;
}

}  // namespace

StabilityReport classify_stability(const VectorMap& field, double radius, int num_initial,
                                   double t_final, std::uint64_t seed,
                                   const ClassifyOptions& opts) {
  if (num_initial < 4) throw std::invalid_argument("num_initial must be >= 4");
  if (radius <= 0) throw std::invalid_argument("radius must be positive");
  const int n = field.dim_in;

  StabilityReport report;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  for (int k = 0; k < num_initial; ++k) {
    Vector x0(n);
    do {
      for (int i = 0; i < n; ++i) x0[i] = gauss(rng);
    } while (x0.norm() == 0);
    x0 *= radius / x0.norm();

    StabilityReport::Evidence ev;
    ev.x0 = x0;
    Trajectory traj;
    SimStatus status = SimStatus::Truncated;
    try {
      status = simulate_impl(field, x0, t_final, opts.sim, traj);
    } catch (const NumericDomainError&) {
    }
    if (!traj.states.empty()) {
      double n0 = x0.norm();
      double maxr = 0;
      for (const auto& s : traj.states) maxr = std::max(maxr, s.norm() / n0);
      ev.max_ratio = maxr;
      ev.completed = status == SimStatus::Ok &&
                     traj.times.size() == static_cast<std::size_t>(opts.sim.samples);
      if (ev.completed) {
        ev.final_ratio = traj.states.back().norm() / n0;
        std::vector<double> th, vh, t1, v1, t2, v2;
        double half = t_final / 2, three_q = 3 * t_final / 4;
        for (std::size_t i = 0; i < traj.times.size(); ++i) {
          if (traj.times[i] < half) continue;
          double lg = std::log(std::max(traj.states[i].norm(), 1e-300));
          th.push_back(traj.times[i]);
          vh.push_back(lg);
          if (traj.times[i] <= three_q) {
            t1.push_back(traj.times[i]);
            v1.push_back(lg);
          } else {
            t2.push_back(traj.times[i]);
            v2.push_back(lg);
          }
        }
        Fit f = fit_line(th, vh), fa = fit_line(t1, v1), fb = fit_line(t2, v2);
        ev.slope = f.slope;
        ev.r_squared = f.r_squared;
        ev.slope_first = fa.slope;
        ev.slope_second = fb.slope;
        ev.completed = f.ok && fa.ok && fb.ok;
      }
    }
    report.evidence.push_back(std::move(ev));
  }

  // FD Lipschitz probe near the origin (flags possibly non-Lipschitz loops)
  {
    Vector f0 = field(Vector::Zero(n));
    double probe_r = 1e-6;
    double worst = 0;
    for (int k = 0; k < 16; ++k) {
      Vector p(n);
      for (int i = 0; i < n; ++i) p[i] = gauss(rng);
      if (p.norm() == 0) continue;
      p *= probe_r / p.norm();
      try {
        worst = std::max(worst, (field(p) - f0).norm() / probe_r);
      } catch (const NumericDomainError&) {
      }
    }
    report.lipschitz_estimate = worst;
    report.lipschitz_flag = worst > 1e6;
  }

  bool any_diverged = false, all_completed = true, all_small = true;
  for (const auto& ev : report.evidence) {
    if (ev.max_ratio > opts.divergence_factor) any_diverged = true;
    if (!ev.completed) all_completed = false;
    else if (ev.final_ratio > opts.final_ratio_max) all_small = false;
  }

  if (any_diverged) {
    report.classification = StabilityClass::Diverged;
  } else if (all_completed && all_small && !report.evidence.empty()) {
    double slope_min = std::numeric_limits<double>::infinity();
    double slope_max = -std::numeric_limits<double>::infinity();
    double slope_sum = 0, r2_min = 1.0;
    bool subwindow_ok = true;
    for (const auto& ev : report.evidence) {
      slope_min = std::min(slope_min, ev.slope);
      slope_max = std::max(slope_max, ev.slope);
      slope_sum += ev.slope;
      r2_min = std::min(r2_min, ev.r_squared);
      if (std::abs(ev.slope_first - ev.slope_second) > opts.slope_band * std::abs(ev.slope))
        subwindow_ok = false;
    }
    report.rate = slope_sum / report.evidence.size();
    report.r_squared = r2_min;
    bool across_ok = (slope_max - slope_min) <= opts.slope_band * std::abs(report.rate);
    if (report.rate < 0 && r2_min >= opts.min_r_squared && across_ok && subwindow_ok)
      report.classification = StabilityClass::Exponential;
    else
      report.classification = StabilityClass::AsymptoticOnly;
  } else {
    report.classification = StabilityClass::Inconclusive;
  }
  return report;
}

std::vector<std::complex<double>> closed_loop_spectrum(const VectorFieldSpec& sys,
                                                       const FeedbackTable& feedback,
                                                       double fd_step) {
  VectorMap loop = closed_loop_map(sys, feedback, /*polish_tol=*/1e-13);
  Matrix J = jacobian_fd(loop, Vector::Zero(sys.state_dim), fd_step);
  return spectrum(J);
}

}  // namespace stabkit
