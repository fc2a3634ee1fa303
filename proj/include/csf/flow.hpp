#pragma once

#include "csf/geometry.hpp"
#include "csf/solitons.hpp"

namespace csf {

enum class Scheme { explicit_euler, semi_implicit };

struct SolverOptions {
  Scheme scheme = Scheme::explicit_euler;
  // dt <= 0 requests the stability-limited step cfl * h_min^2, recomputed each
  // step; a positive dt is used as given (and rejected by the explicit scheme
  // when it exceeds the bound).
  double dt = 0.0;
  double cfl = 0.2;
  // Arclength-resample every k accepted steps; 0 disables. Material
  // correspondence is rebuilt by arclength fraction.
  int redistribute_every = 0;
  // Record a slice whenever time crosses a multiple of record_dt; <= 0 records
  // every step. The first and last slices are always recorded.
  double record_dt = 0.0;
  // Stop and mark singular when the smallest radius of curvature drops below
  // singular_factor times the initial mean segment length; <= 0 disables.
  double singular_factor = 4.0;
};

// One curve-shortening step x += dt * kappa * n. Throws when dt exceeds the
// parabolic stability bound cfl * h_min^2, when a segment would degenerate, or
// when a coordinate leaves the finite range.
Curve step_csf(const Curve& curve, double dt, double cfl = 0.2);

// Backward-Euler step of the arclength Laplacian with coefficients frozen at
// the current curve; unconditionally stable. Open-curve endpoints take their
// explicit one-sided motion and act as boundary values for the solve.
Curve step_semi_implicit(const Curve& curve, double dt);

// Curve shortening with the concentrating tangential drift removed:
// x += dt * (kappa n - tangential part of (x - x0) / (2 (t0 - t))).
// Same image motion as step_csf; only the parametrization differs.
Curve step_drifted(const Curve& curve, double dt, const Vec2& x0, double t0, double t,
                   double cfl = 0.2);

FlowHistory evolve(const Curve& initial, double t_start, double t_end,
                   const SolverOptions& options);

// Exact image curve at time t of the self-similar flow riding `spec`:
// a(t) R(theta(t)) profile + e t with a(t) = sqrt(1 + 2 lambda t) and
// theta(t) = omega/(2 lambda) log(1 + 2 lambda t) (omega t when lambda = 0).
// The profile is the time-0 slice. Throws past extinction (1 + 2 lambda t <= 0).
Curve analytic_selfsimilar_flow(const SolitonSpec& spec, const Curve& profile, double t);

// History of analytic slices. recorded_time(m) = times[m] + clock_offset lets
// callers restate the flow in a shifted clock (e.g. the natural expander clock
// where the slice at recorded time tau is the profile scaled by sqrt(tau))
// while the similarity is evaluated at times[m].
FlowHistory selfsimilar_history(const SolitonSpec& spec, const Curve& profile,
                                const std::vector<double>& times, double clock_offset = 0.0);

}  // namespace csf
