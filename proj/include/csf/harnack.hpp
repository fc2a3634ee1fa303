#pragma once

#include <vector>

#include "csf/geometry.hpp"

namespace csf {

struct HarnackSample {
  Eigen::Index index = 0;
  double t = 0.0;
  double H = 0.0;
  double dH_dt = 0.0;
  double gradH = 0.0;  // arclength derivative of H
  double V = 0.0;      // tangential field magnitude used
  double quantity = 0.0;
  // False when the point was skipped (optimal V at kappa <= eps_c), the time
  // derivative had to be one-sided, or the point sits inside the parabolic
  // influence width 4 sqrt(t - t_first) + 5 h of a free end, where the
  // evolution of a truncated arc no longer represents the underlying flow.
  bool valid = true;
};

// Rate of change of kappa at a fixed index: centered in time at interior
// slices, one-sided (flagged) at the ends. Nonuniform slice spacing is
// handled at second order.
double material_dH_dt(const FlowHistory& history, Eigen::Index i, std::size_t slice,
                      bool* one_sided = nullptr);

enum class VMode { zero, optimal };

// Cutoff below which the optimal field V = -gradH / kappa is not formed.
inline constexpr double kOptimalVCutoff = 1e-4;

// dH/dt + 2 V gradH + kappa V^2 at every point of the given slice (interior
// points only for open curves). Optimal mode uses V = -gradH / kappa where
// kappa > cutoff, else flags the sample.
std::vector<HarnackSample> steady_harnack(const FlowHistory& history, std::size_t slice,
                                          VMode mode);

// Adds H / (2t); requires the slice time to be positive.
std::vector<HarnackSample> expanding_harnack(const FlowHistory& history, std::size_t slice,
                                             VMode mode);

struct SqrtTHReport {
  Eigen::Index index = 0;
  double min_slope = 0.0;
  bool monotone = false;
  // False when some slice violates weak convexity (min kappa < -1e-6); the
  // monotonicity claim assumes convex flows.
  bool valid = true;
};

// Slope series of sqrt(t) * kappa(i, t) at a fixed index over a history in
// t > 0. Requires at least 3 slices.
SqrtTHReport sqrt_t_H_monotone(const FlowHistory& history, Eigen::Index i);

struct RotatorMinimalityReport {
  Eigen::Index argmin_index = 0;
  double min_radius = 0.0;
  double H_at_argmin = 0.0;
  // |<x/|x|, T>| at the argmin; 0 when the argmin is the origin.
  double tangency_defect = 0.0;
  double max_abs_kappa = 0.0;
  // Residual against the rotator equation kappa = <omega J x, n>; the gate
  // that wires non-rotators to pass = false.
  double residual = 0.0;
  bool pass = false;
};

// At the sample minimizing |x|, a rotator must be tangent to the circle
// through that point and have H = 0 there. pass requires residual <= 1e-2,
// |H| < 1e-3 * max |kappa|, and tangency defect < 1e-6.
RotatorMinimalityReport rotator_minimality_check(const Curve& curve, double omega);

}  // namespace csf
