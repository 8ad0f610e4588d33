#pragma once

#include <complex>
#include <string_view>

#include "stabkit/synthesis.hpp"

namespace stabkit {

struct Trajectory {
  std::vector<double> times;   // strictly increasing, starting at 0
  std::vector<Vector> states;  // one point per time
  bool truncated = false;      // integration stopped on a non-finite state
};

struct SimulateOptions {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  int samples = 200;  // dense output at uniform times including 0 and t_final
};

// Adaptive Dormand-Prince 5(4) with 4th-order dense output. Throws
// StepSizeUnderflow; a non-finite state truncates the trajectory and sets the
// flag instead.
Trajectory simulate(const VectorMap& field, const Vector& x0, double t_final,
                    const SimulateOptions& opts = {});

enum class StabilityClass { Exponential, AsymptoticOnly, Diverged, Inconclusive };
std::string_view to_string(StabilityClass c);

struct StabilityReport {
  StabilityClass classification = StabilityClass::Inconclusive;
  double rate = 0.0;       // fitted decay exponent (1/time units)
  double r_squared = 0.0;  // worst per-trajectory fit quality
  struct Evidence {
    Vector x0;
    bool completed = false;
    double final_ratio = 0.0;  // ||x(T)|| / ||x0||
    double max_ratio = 0.0;    // max_t ||x(t)|| / ||x0||
    double slope = 0.0;        // log-norm regression slope over [T/2, T]
    double slope_first = 0.0;  // over [T/2, 3T/4]
    double slope_second = 0.0; // over [3T/4, T]
    double r_squared = 0.0;
  };
  std::vector<Evidence> evidence;
  double lipschitz_estimate = 0.0;  // FD Lipschitz probe of the field near 0
  bool lipschitz_flag = false;      // estimate exceeded 1e6 (possible non-uniqueness)
};

struct ClassifyOptions {
  double divergence_factor = 10.0;
  double final_ratio_max = 1e-4;
  double min_r_squared = 0.99;
  double slope_band = 0.2;  // relative band for slope-consistency gates
  SimulateOptions sim;
};

// Simulates num_initial seeded starts with ||x0|| = radius and classifies:
// diverged if any trajectory exceeds divergence_factor times its initial
// norm; exponential if all final ratios pass, the second-half log-norm fits
// are clean (R^2, across-trajectory and across-subwindow slope consistency);
// asymptotic-only if the ratios pass but a fit gate fails; else inconclusive.
StabilityReport classify_stability(const VectorMap& field, double radius, int num_initial,
                                   double t_final, std::uint64_t seed,
                                   const ClassifyOptions& opts = {});

// Eigenvalues of the FD Jacobian at 0 of x -> f(x, u(x)), u via the polished
// pointwise solve; sorted by (Re, Im) descending.
std::vector<std::complex<double>> closed_loop_spectrum(const VectorFieldSpec& sys,
                                                       const FeedbackTable& feedback,
                                                       double fd_step = 1e-6);

}  // namespace stabkit
