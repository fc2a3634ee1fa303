#include "csf/harnack.hpp"

#include "csf/solitons.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace csf {

namespace {

// Second-order first derivative on a nonuniform 3-point stencil; a and b are
// the distances to the earlier and later neighbor.
double centered_rate(double f_minus, double f0, double f_plus, double a, double b) {
  return (a * a * f_plus - b * b * f_minus - (a * a - b * b) * f0) / (a * b * (a + b));
}

struct SliceBounds {
  Eigen::Index begin;
  Eigen::Index end;
};

SliceBounds interior(const Curve& curve) {
  if (curve.closed()) return {0, curve.size()};
  return {2, curve.size() - 2};
}

double grad_along(const Curve& curve, const CurvatureField& field, Eigen::Index i) {
  const Eigen::Index n = curve.size();
  const Eigen::Index prev = curve.closed() ? (i + n - 1) % n : i - 1;
  const Eigen::Index next = curve.closed() ? (i + 1) % n : i + 1;
  const double a = (curve.points.col(i) - curve.points.col(prev)).norm();
  const double b = (curve.points.col(next) - curve.points.col(i)).norm();
  return centered_rate(field.kappa(prev), field.kappa(i), field.kappa(next), a, b);
}

std::vector<HarnackSample> harnack_samples(const FlowHistory& history, std::size_t slice,
                                           VMode mode, bool expanding) {
  validate(history);
  if (slice >= history.size()) throw Error("index", "slice index outside the history");
  if (history.size() < 2) throw Error("precondition", "need at least two slices");
  const double t = history.times[slice];
  if (expanding && !(t > 0.0))
    throw Error("time", "the expanding quantity needs a positive slice time");

  const Curve& curve = history.slices[slice];
  const CurvatureField field = signed_curvature(curve);
  const bool at_start = slice == 0;
  const bool at_end = slice + 1 == history.size();
  const bool one_sided = at_start || at_end;

  CurvatureField before, after;
  if (!at_start) before = signed_curvature(history.slices[slice - 1]);
  if (!at_end) after = signed_curvature(history.slices[slice + 1]);

  // A truncated arc evolved with free ends loses the continuation data of the
  // full curve, so the flow near an end settles into its own numerical closure
  // regardless of resolution. That contamination spreads inward at the
  // parabolic rate; samples inside the influence width carry no Harnack
  // information and are flagged.
  double collar = 0.0;
  std::vector<double> arc;
  if (!curve.closed()) {
    // erfc(2) of the heat kernel leaves ~0.5% of the end anomaly past the
    // collar, below the 5e-3 scale of the equality checks.
    const double elapsed = std::max(0.0, t - history.times.front());
    collar = 4.0 * std::sqrt(elapsed) + 5.0 * mean_segment_length(curve);
    arc.assign(static_cast<std::size_t>(curve.size()), 0.0);
    for (Eigen::Index k = 1; k < curve.size(); ++k)
      arc[static_cast<std::size_t>(k)] =
          arc[static_cast<std::size_t>(k - 1)] +
          (curve.points.col(k) - curve.points.col(k - 1)).norm();
  }

  const SliceBounds bounds = interior(curve);
  std::vector<HarnackSample> samples;
  samples.reserve(static_cast<std::size_t>(bounds.end - bounds.begin));
  for (Eigen::Index i = bounds.begin; i < bounds.end; ++i) {
    HarnackSample s;
    s.index = i;
    s.t = t;
    s.H = field.kappa(i);
    if (one_sided) {
      const std::size_t other = at_start ? slice + 1 : slice - 1;
      const CurvatureField& of = at_start ? after : before;
      s.dH_dt = (of.kappa(i) - field.kappa(i)) / (history.times[other] - t);
    } else {
      const double a = t - history.times[slice - 1];
      const double b = history.times[slice + 1] - t;
      s.dH_dt = centered_rate(before.kappa(i), field.kappa(i), after.kappa(i), a, b);
    }
    s.gradH = grad_along(curve, field, i);
    s.valid = !one_sided;
    if (!curve.closed()) {
      const std::size_t k = static_cast<std::size_t>(i);
      if (std::min(arc[k], arc.back() - arc[k]) < collar) s.valid = false;
    }
    s.V = 0.0;
    if (mode == VMode::optimal) {
      if (s.H > kOptimalVCutoff)
        s.V = -s.gradH / s.H;
      else
        s.valid = false;
    }
    s.quantity = s.dH_dt + 2.0 * s.V * s.gradH + s.H * s.V * s.V;
    if (expanding) s.quantity += s.H / (2.0 * t);
    samples.push_back(s);
  }
  return samples;
}

}  // namespace

double material_dH_dt(const FlowHistory& history, Eigen::Index i, std::size_t slice,
                      bool* one_sided) {
  validate(history);
  if (history.size() < 2) throw Error("precondition", "need at least two slices");
  if (slice >= history.size()) throw Error("index", "slice index outside the history");
  if (i < 0 || i >= history.slices.front().size())
    throw Error("index", "point index outside the slice");

  const double f0 = signed_curvature(history.slices[slice]).kappa(i);
  if (slice == 0 || slice + 1 == history.size()) {
    if (one_sided) *one_sided = true;
    const std::size_t other = slice == 0 ? slice + 1 : slice - 1;
    const double f1 = signed_curvature(history.slices[other]).kappa(i);
    return (f1 - f0) / (history.times[other] - history.times[slice]);
  }
  if (one_sided) *one_sided = false;
  const double fm = signed_curvature(history.slices[slice - 1]).kappa(i);
  const double fp = signed_curvature(history.slices[slice + 1]).kappa(i);
  const double a = history.times[slice] - history.times[slice - 1];
  const double b = history.times[slice + 1] - history.times[slice];
  return centered_rate(fm, f0, fp, a, b);
}

std::vector<HarnackSample> steady_harnack(const FlowHistory& history, std::size_t slice,
                                          VMode mode) {
  return harnack_samples(history, slice, mode, false);
}

std::vector<HarnackSample> expanding_harnack(const FlowHistory& history, std::size_t slice,
                                             VMode mode) {
  return harnack_samples(history, slice, mode, true);
}

SqrtTHReport sqrt_t_H_monotone(const FlowHistory& history, Eigen::Index i) {
  validate(history);
  if (history.size() < 3) throw Error("precondition", "need at least three slices");
  if (i < 0 || i >= history.slices.front().size())
    throw Error("index", "point index outside the slice");
  for (double t : history.times)
    if (!(t > 0.0)) throw Error("time", "all slice times must be positive");

  SqrtTHReport report;
  report.index = i;
  report.valid = true;

  std::vector<double> g(history.size());
  double g_max = 0.0;
  double dt_min = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < history.size(); ++m) {
    const CurvatureField field = signed_curvature(history.slices[m]);
    g[m] = std::sqrt(history.times[m]) * field.kappa(i);
    g_max = std::max(g_max, std::abs(g[m]));
    const SliceBounds bounds = interior(history.slices[m]);
    for (Eigen::Index p = bounds.begin; p < bounds.end; ++p)
      if (field.kappa(p) < -1e-6) report.valid = false;
    if (m > 0) dt_min = std::min(dt_min, history.times[m] - history.times[m - 1]);
  }
  double min_slope = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m + 1 < history.size(); ++m)
    min_slope =
        std::min(min_slope, (g[m + 1] - g[m]) / (history.times[m + 1] - history.times[m]));
  report.min_slope = min_slope;
  report.monotone = min_slope >= -1e-8 * (1.0 + g_max) / dt_min;
  return report;
}

RotatorMinimalityReport rotator_minimality_check(const Curve& curve, double omega) {
  validate(curve);
  if (omega == 0.0) throw Error("spec", "omega must be nonzero");
  const CurvatureField field = signed_curvature(curve);
  const SliceBounds bounds = interior(curve);

  Eigen::Index argmin = bounds.begin;
  double min_radius = curve.points.col(argmin).norm();
  double max_abs_kappa = 0.0;
  for (Eigen::Index i = bounds.begin; i < bounds.end; ++i) {
    const double r = curve.points.col(i).norm();
    if (r < min_radius) {
      min_radius = r;
      argmin = i;
    }
    max_abs_kappa = std::max(max_abs_kappa, std::abs(field.kappa(i)));
  }
  if (!curve.closed() && (argmin < bounds.begin + 2 || argmin >= bounds.end - 2))
    throw Error("window", "minimum of |x| sits at the truncation boundary");

  RotatorMinimalityReport report;
  report.argmin_index = argmin;
  report.min_radius = min_radius;
  report.H_at_argmin = field.kappa(argmin);
  report.tangency_defect =
      min_radius < 1e-12
          ? 0.0
          : std::abs(curve.points.col(argmin).normalized().dot(field.tangents.col(argmin)));
  report.max_abs_kappa = max_abs_kappa;

  SolitonSpec spec;
  spec.kind = SolitonKind::rotator;
  spec.lambda = 0.0;
  spec.omega = omega;
  spec.e = Vec2::Zero();
  report.residual = residual(curve, spec);

  report.pass = report.residual <= 1e-2 &&
                std::abs(report.H_at_argmin) < 1e-3 * report.max_abs_kappa &&
                report.tangency_defect < 1e-6;
  return report;
}

}  // namespace csf
