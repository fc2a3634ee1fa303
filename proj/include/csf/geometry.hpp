#pragma once

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

// Plane curves as dense 2xN point matrices plus the similarity-map algebra
// used everywhere else in the library.
//
// Conventions, fixed once here:
//   - the unit tangent T follows increasing index order;
//   - the unit normal is T rotated by +90 degrees, n = (-T.y, T.x);
//   - signed curvature is positive where the curve turns counterclockwise,
//     so a counterclockwise circle of radius R has kappa = 1/R and the mean
//     curvature vector kappa*n points at its center.

namespace csf {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using PointMatrix = Eigen::Matrix2Xd;

// Library error with a short stable code ("curve", "flow", ...) that the CLI
// maps to "E:<code>:<message>" and exit status 2.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

enum class Topology { closed, open };

struct Curve {
  PointMatrix points;  // 2 x N, one point per column
  Topology topology = Topology::closed;
  bool truncated = false;  // open curves: window into a noncompact curve

  Eigen::Index size() const { return points.cols(); }
  bool closed() const { return topology == Topology::closed; }
};

// Throws Error("curve", ...) unless: at least 4 points closed / 3 open, all
// coordinates finite, consecutive points distinct (including the wrap).
void validate(const Curve& curve);

// Sum of segment lengths (including the closing segment for closed curves).
double total_length(const Curve& curve);

double min_segment_length(const Curve& curve);
double mean_segment_length(const Curve& curve);

// Largest pairwise extent of the point set, cheap bound via bounding box.
double diameter(const Curve& curve);

// Similarity map between two snapshots of a curve:
//   out[i] = alpha * rotation * in[phi(i)] + translation
// with the discrete correspondence phi a cyclic index shift, optionally
// orientation reversing:
//   closed:  phi(i) = (i + shift) mod N, or (shift - i) mod N when reversed
//   open:    phi(i) = i, or N-1-i when reversed (shift must be 0)
struct Similarity {
  double alpha = 1.0;
  Mat2 rotation = Mat2::Identity();
  Vec2 translation = Vec2::Zero();
  int shift = 0;
  bool reversed = false;
  double residual = 0.0;  // RMS alignment error, length units of the image
};

// Throws Error("similarity", ...) unless alpha > 0, rotation orthogonal
// within 1e-9, all entries finite.
void validate(const Similarity& s);

// phi(i) for an n-point curve of the given topology.
Eigen::Index permuted_index(const Similarity& s, Eigen::Index i, Eigen::Index n,
                            Topology topology);

// Group operations; compose(outer, inner) applies inner first:
// apply(compose(a, b), c) == apply(a, apply(b, c)). residual is not composed.
Similarity compose(const Similarity& outer, const Similarity& inner);
Similarity inverse(const Similarity& s);

Curve apply_similarity(const Curve& curve, const Similarity& s);

struct FlowHistory {
  std::vector<double> times;  // strictly increasing
  std::vector<Curve> slices;  // equal point count and topology throughout
  std::optional<double> singular_time;
  std::vector<double> resample_times;  // redistribution events during evolve

  std::size_t size() const { return times.size(); }
};

// Throws Error("history", ...) unless nonempty, times strictly increasing,
// and all slices share point count and topology (each slice valid).
void validate(const FlowHistory& history);

// N points equally spaced in the chord-length arclength parameter, positions
// by chordal Catmull-Rom interpolation (knot-exact, so resampling a uniform
// curve at its own count returns it unchanged). The sample grid spans exactly
// [0, L] where L is the input polygon length.
Curve resample_by_arclength(const Curve& curve, Eigen::Index n);

struct CurvatureField {
  Eigen::VectorXd kappa;   // signed curvature per point
  PointMatrix normals;     // unit normals, +90 degree rotation of tangents
  PointMatrix tangents;    // unit tangents
};

// Three-point circumscribed-circle curvature at interior points (exact on
// points of a circle), one-sided cubic-fit stencils at open endpoints.
CurvatureField signed_curvature(const Curve& curve);

// Trapezoid measure: half the sum of the two adjacent segment lengths, end
// segments contributing half weight at open endpoints. Sums to total_length.
Eigen::VectorXd measure_weights(const Curve& curve);

}  // namespace csf
