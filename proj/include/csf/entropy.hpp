#pragma once

#include <optional>
#include <vector>

#include "csf/geometry.hpp"

namespace csf {

struct EntropyReport {
  double value = 0.0;
  double deficit = 0.0;
  Vec2 x0 = Vec2::Zero();
  double t0 = 0.0;
  double t = 0.0;
  // Upper bound on the mass beyond the truncation of an open curve; 0 for
  // closed curves. Heuristic: kernel at each endpoint times the measured
  // length-per-distance growth rate there times the Gaussian tail factor.
  double tail_estimate = 0.0;
};

// (4 pi (t0 - t))^(-1/2) exp(-|x - x0|^2 / (4 (t0 - t))). Requires t < t0.
double backward_heat_kernel(const Vec2& x, double t, const Vec2& x0, double t0);

// Weighted point sum of the kernel over the curve. The deficit field is left 0.
EntropyReport huisken_functional(const Curve& curve, double t, const Vec2& x0, double t0);

// Weighted sum of |kappa n + normal part of (x - x0) / (2 (t0 - t))|^2 Phi.
// Vanishes exactly on self-shrinkers whose scale matches t0 - t.
double deficit(const Curve& curve, double t, const Vec2& x0, double t0);

struct MonotonicityReport {
  double lhs_drop = 0.0;            // functional at first slice minus at last
  double integrated_deficit = 0.0;  // trapezoid in time of the deficit
  double discrepancy = 0.0;         // |lhs_drop - integrated_deficit|
};

// Verifies that the functional's total drop equals the integrated deficit,
// up to the O(dt + h^2) discretization scale. Requires all slice times < t0
// and, for open curves, a certified-finite initial value
// (tail_estimate < 0.01 * value).
MonotonicityReport verify_monotonicity(const FlowHistory& history, const Vec2& x0, double t0);

struct SupEntropySearch {
  // Coarse grid spacing as a fraction of sqrt(t0 - t).
  double grid_spacing_factor = 0.5;
  // Bounding-box inflation in units of sqrt(t0 - t).
  double box_inflation = 4.0;
  int refine_iterations = 30;
};

struct SupEntropyResult {
  double value = 0.0;
  Vec2 x0 = Vec2::Zero();
};

// sup over centers x0 of the functional at kernel scale t0 - t. Grid over the
// inflated bounding box, then pattern-search refinement. Closed curves only.
SupEntropyResult sup_entropy(const Curve& curve, double t, double t0,
                             const SupEntropySearch& search = {});

enum class GammaVerdict { convergent, divergent, inconclusive };

struct GammaReport {
  double gamma = 0.0;
  std::vector<double> window_values;
  GammaVerdict verdict = GammaVerdict::inconclusive;
  std::optional<double> threshold;
};

// Partial integrals of exp(-gamma |x|^2) d(length) over windows of growing
// arclength distance from the sample minimizing |x|. Verdicts:
//   convergent: last increment < 1e-8 * total, AND the tail factor
//     exp(-gamma * reach^2) * (length growth rate) < 1e-6 at the window edge,
//     AND increments decrease over the last 3 windows;
//   divergent: increments over the last 3 windows within a factor 4 of each
//     other and the last one >= 1% of the total (documented heuristic:
//     evidence of non-decaying mass, not a proof);
//   inconclusive otherwise.
GammaReport gamma_integral(const Curve& curve, double gamma,
                           const std::vector<double>& windows);

// Supremum of admissible gamma for a shrinking breather: (1 - alpha^2) /
// (4 (t2 - t1)). Exclusive bound; inclusive only when the isometry has no
// translation part (caller's flag). Requires 0 < alpha < 1, t2 > t1.
double breather_gamma_threshold(double alpha, double t1, double t2);

}  // namespace csf
