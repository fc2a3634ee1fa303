#pragma once

#include <vector>

#include "csf/geometry.hpp"

namespace csf {

enum class SpliceMode { shrinking, expanding, steady_backward, steady_eternal };

struct SpliceResult {
  // Shrinking mode runs in backward time tau (tau = 1 - t of the input
  // period); the other modes run in forward time.
  FlowHistory history;
  // Interior period boundaries. Shrinking: tau_j = sum_{k<=j} alpha^(-2k),
  // j = 0..J-1; expanding: t_j = sum_{k<=j} alpha^(2k); steady: integers.
  std::vector<double> junction_times;
  // Max point distance between a junction slice computed from the period
  // ending there and from the period starting there. Exact algebra (rounding
  // only) when the input satisfies the breather relation exactly.
  std::vector<double> junction_position_errors;
  Similarity period;
  SpliceMode mode;
};

// Recover the similarity mapping slice1 to slice2: alpha is fixed by the
// length ratio; rotation, translation, and the index shift come from a
// Procrustes fit searched over cyclic shifts. allow_reflection also enables
// the orientation-reversed correspondence and det = -1 isometries.
// Ties break toward the smallest shift, forward orientation, det = +1.
// The residual is the RMS alignment error in length units of slice2.
Similarity detect(const Curve& slice1, const Curve& slice2, bool allow_reflection = false);

// Extend one breather period (forward-time history over [0,1], detected map s
// with alpha < 1 sending the first slice to the last) to an ancient solution
// in backward time over [0, tau_J]: period j is the inverse similarity applied
// j times to the time-reversed input.
SpliceResult splice_shrinking(const FlowHistory& period, const Similarity& s, int copies);

// Same construction forward in time for alpha > 1: period j is the similarity
// applied j times, over [t_{j-1}, t_j].
SpliceResult splice_expanding(const FlowHistory& period, const Similarity& s, int copies);

// Steady case |alpha - 1| < 1e-6: backward copies over [-J, 1]; with eternal
// set, forward copies as well, over [-J, J+1].
SpliceResult splice_steady(const FlowHistory& period, const Similarity& s, int copies,
                           bool eternal);

struct JunctionReport {
  double time = 0.0;
  // Stored-slice position gap across the junction (0 by construction).
  double position_gap = 0.0;
  // Max pointwise mismatch of one-sided difference quotients: order 1 is
  // position velocity, order 2 is the mean curvature vector rate.
  double discrepancy = 0.0;
  // Larger of the two one-sided time steps; the discrepancy is O(dt_scale).
  double dt_scale = 0.0;
};

std::vector<JunctionReport> junction_smoothness(const SpliceResult& splice, int order);

struct RescaleResult {
  // The (j+1)-th period scaled by tau_j^(-1/2) in space, tau_j in time, and
  // index-permuted by the period map applied j+1 times; domain [1, tau_{j+1}/tau_j].
  FlowHistory history;
  double scale_ratio = 0.0;        // alpha^(2(j+1)) tau_j
  double scale_ratio_limit = 0.0;  // 1 / (alpha^(-2) - 1)
  Vec2 drift = Vec2::Zero();       // tau_j^(-1/2) times the period-(j+1) translation
  double drift_bound = 0.0;        // sqrt(alpha^(-2)-1)/(alpha^(-1)-1) * |V|
};

RescaleResult rescale_sequence(const SpliceResult& splice, int j);

struct OrbitReport {
  std::vector<double> magnitudes;  // |x| at iterates 0..J of the index map
  double sup = 0.0;
  bool bounded = false;  // max over last half <= 1.05 * max over first half
  bool escaped = false;  // open curve: the walk hit a truncation end (clamped)
};

// Iterate the similarity's index map from p0 on the first slice, forward
// (phi^j) or backward (phi^-j). Open curves walk by the raw shift and clamp
// at the ends.
OrbitReport orbit_boundedness(const FlowHistory& history, const Similarity& s,
                              Eigen::Index p0, bool forward, int copies);

}  // namespace csf
