#include "csf/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace csf {

namespace {

Eigen::Index wrap(Eigen::Index i, Eigen::Index n) {
  Eigen::Index r = i % n;
  return r < 0 ? r + n : r;
}

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

Vec2 rot90(const Vec2& v) { return Vec2(-v.y(), v.x()); }

// Circumscribed-circle signed curvature of the triple (a, b, c), which is the
// curvature of the circle through the three points, positive on left turns.
double circumcircle_kappa(const Vec2& a, const Vec2& b, const Vec2& c) {
  const Vec2 u = b - a;
  const Vec2 v = c - b;
  const double denom = u.norm() * v.norm() * (u + v).norm();
  if (denom == 0.0) return 0.0;
  return 2.0 * cross2(u, v) / denom;
}

// Newton-form cubic through four points with chord knots 0 < u1 < u2 < u3,
// returning position derivatives at parameter 0. Used for one-sided endpoint
// stencils; second-order accurate in the sample spacing.
struct EndFit {
  Vec2 d1;
  Vec2 d2;
};

EndFit cubic_end_fit(const Vec2& q0, const Vec2& q1, const Vec2& q2, const Vec2& q3) {
  const double u1 = (q1 - q0).norm();
  const double u2 = u1 + (q2 - q1).norm();
  const double u3 = u2 + (q3 - q2).norm();
  const Vec2 f01 = (q1 - q0) / u1;
  const Vec2 f12 = (q2 - q1) / (u2 - u1);
  const Vec2 f23 = (q3 - q2) / (u3 - u2);
  const Vec2 f012 = (f12 - f01) / u2;
  const Vec2 f123 = (f23 - f12) / (u3 - u1);
  const Vec2 f0123 = (f123 - f012) / u3;
  EndFit fit;
  fit.d1 = f01 - u1 * f012 + u1 * u2 * f0123;
  fit.d2 = 2.0 * f012 - 2.0 * (u1 + u2) * f0123;
  return fit;
}

double fit_kappa(const EndFit& fit) {
  const double speed2 = fit.d1.squaredNorm();
  if (speed2 == 0.0) return 0.0;
  return cross2(fit.d1, fit.d2) / (speed2 * std::sqrt(speed2));
}

// Nonuniform Catmull-Rom (Barry-Goldman) on segment [t1, t2].
Vec2 catmull_rom(const Vec2& p0, const Vec2& p1, const Vec2& p2, const Vec2& p3,
                 double t0, double t1, double t2, double t3, double t) {
  const Vec2 a1 = ((t1 - t) * p0 + (t - t0) * p1) / (t1 - t0);
  const Vec2 a2 = ((t2 - t) * p1 + (t - t1) * p2) / (t2 - t1);
  const Vec2 a3 = ((t3 - t) * p2 + (t - t2) * p3) / (t3 - t2);
  const Vec2 b1 = ((t2 - t) * a1 + (t - t0) * a2) / (t2 - t0);
  const Vec2 b2 = ((t3 - t) * a2 + (t - t1) * a3) / (t3 - t1);
  return ((t2 - t) * b1 + (t - t1) * b2) / (t2 - t1);
}

}  // namespace

void validate(const Curve& curve) {
  const Eigen::Index n = curve.size();
  const Eigen::Index min_points = curve.closed() ? 4 : 3;
  if (n < min_points)
    throw Error("curve", "curve needs at least " + std::to_string(min_points) +
                             " points, got " + std::to_string(n));
  if (!curve.points.allFinite()) throw Error("curve", "curve has non-finite coordinates");
  const Eigen::Index last = curve.closed() ? n : n - 1;
  for (Eigen::Index i = 0; i < last; ++i) {
    const Eigen::Index j = wrap(i + 1, n);
    if ((curve.points.col(j) - curve.points.col(i)).norm() == 0.0)
      throw Error("curve", "repeated consecutive point at index " + std::to_string(i));
  }
}

double total_length(const Curve& curve) {
  const Eigen::Index n = curve.size();
  double length = 0.0;
  const Eigen::Index last = curve.closed() ? n : n - 1;
  for (Eigen::Index i = 0; i < last; ++i)
    length += (curve.points.col(wrap(i + 1, n)) - curve.points.col(i)).norm();
  return length;
}

double min_segment_length(const Curve& curve) {
  const Eigen::Index n = curve.size();
  double best = std::numeric_limits<double>::infinity();
  const Eigen::Index last = curve.closed() ? n : n - 1;
  for (Eigen::Index i = 0; i < last; ++i)
    best = std::min(best, (curve.points.col(wrap(i + 1, n)) - curve.points.col(i)).norm());
  return best;
}

double mean_segment_length(const Curve& curve) {
  const Eigen::Index segments = curve.closed() ? curve.size() : curve.size() - 1;
  return total_length(curve) / static_cast<double>(segments);
}

double diameter(const Curve& curve) {
  const Vec2 lo = curve.points.rowwise().minCoeff();
  const Vec2 hi = curve.points.rowwise().maxCoeff();
  return (hi - lo).norm();
}

void validate(const Similarity& s) {
  if (!(s.alpha > 0.0) || !std::isfinite(s.alpha))
    throw Error("similarity", "alpha must be positive and finite");
  if (!s.rotation.allFinite() || !s.translation.allFinite())
    throw Error("similarity", "similarity has non-finite entries");
  const Mat2 gram = s.rotation.transpose() * s.rotation;
  if ((gram - Mat2::Identity()).norm() > 1e-9)
    throw Error("similarity", "rotation is not orthogonal");
}

Eigen::Index permuted_index(const Similarity& s, Eigen::Index i, Eigen::Index n,
                            Topology topology) {
  if (topology == Topology::open) {
    if (s.shift != 0) throw Error("similarity", "open curves admit no cyclic shift");
    return s.reversed ? n - 1 - i : i;
  }
  return s.reversed ? wrap(static_cast<Eigen::Index>(s.shift) - i, n)
                    : wrap(i + static_cast<Eigen::Index>(s.shift), n);
}

Similarity compose(const Similarity& outer, const Similarity& inner) {
  Similarity out;
  out.alpha = outer.alpha * inner.alpha;
  out.rotation = outer.rotation * inner.rotation;
  out.translation = outer.alpha * outer.rotation * inner.translation + outer.translation;
  // phi = phi_inner o phi_outer: the outer map permutes indices first in
  // apply(outer, apply(inner, curve)). The composed shift does not depend on
  // the outer orientation.
  out.shift = inner.shift + (inner.reversed ? -outer.shift : outer.shift);
  out.reversed = inner.reversed != outer.reversed;
  return out;
}

Similarity inverse(const Similarity& s) {
  Similarity out;
  out.alpha = 1.0 / s.alpha;
  out.rotation = s.rotation.transpose();
  out.translation = -(out.rotation * s.translation) / s.alpha;
  out.reversed = s.reversed;
  out.shift = s.reversed ? s.shift : -s.shift;
  return out;
}

Curve apply_similarity(const Curve& curve, const Similarity& s) {
  validate(curve);
  validate(s);
  const Eigen::Index n = curve.size();
  Curve out = curve;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index j = permuted_index(s, i, n, curve.topology);
    out.points.col(i) = s.alpha * (s.rotation * curve.points.col(j)) + s.translation;
  }
  return out;
}

void validate(const FlowHistory& history) {
  if (history.times.empty()) throw Error("history", "empty history");
  if (history.times.size() != history.slices.size())
    throw Error("history", "time/slice count mismatch");
  for (std::size_t m = 1; m < history.times.size(); ++m)
    if (!(history.times[m] > history.times[m - 1]))
      throw Error("history", "slice times must be strictly increasing");
  const Eigen::Index n = history.slices.front().size();
  const Topology topology = history.slices.front().topology;
  for (const Curve& slice : history.slices) {
    validate(slice);
    if (slice.size() != n || slice.topology != topology)
      throw Error("history", "slices must share point count and topology");
  }
}

Curve resample_by_arclength(const Curve& curve, Eigen::Index n) {
  validate(curve);
  const Eigen::Index min_points = curve.closed() ? 4 : 3;
  if (n < min_points) throw Error("curve", "resample target too small");

  const Eigen::Index m = curve.size();
  const Eigen::Index segments = curve.closed() ? m : m - 1;
  std::vector<double> s(static_cast<std::size_t>(segments) + 1, 0.0);
  for (Eigen::Index i = 0; i < segments; ++i)
    s[i + 1] = s[i] + (curve.points.col(wrap(i + 1, m)) - curve.points.col(i)).norm();
  const double length = s.back();

  Curve out = curve;
  out.points.resize(2, n);

  const Eigen::Index samples = n;
  for (Eigen::Index k = 0; k < samples; ++k) {
    double u = curve.closed() ? length * static_cast<double>(k) / static_cast<double>(n)
                              : length * static_cast<double>(k) / static_cast<double>(n - 1);
    if (!curve.closed() && k == n - 1) u = length;
    // segment j with s[j] <= u <= s[j+1]
    auto it = std::upper_bound(s.begin(), s.end(), u);
    Eigen::Index j = std::clamp<Eigen::Index>(static_cast<Eigen::Index>(it - s.begin()) - 1,
                                              0, segments - 1);

    Vec2 p0, p1, p2, p3;
    double t0, t1, t2, t3;
    p1 = curve.points.col(j);
    p2 = curve.points.col(wrap(j + 1, m));
    t1 = s[j];
    t2 = s[j + 1];
    if (curve.closed()) {
      p0 = curve.points.col(wrap(j - 1, m));
      p3 = curve.points.col(wrap(j + 2, m));
      t0 = t1 - (p1 - p0).norm();
      t3 = t2 + (p3 - p2).norm();
    } else {
      if (j == 0) {
        p0 = 2.0 * p1 - p2;
        t0 = t1 - (p2 - p1).norm();
      } else {
        p0 = curve.points.col(j - 1);
        t0 = s[j - 1];
      }
      if (j == m - 2) {
        p3 = 2.0 * p2 - p1;
        t3 = t2 + (p2 - p1).norm();
      } else {
        p3 = curve.points.col(j + 2);
        t3 = s[j + 2];
      }
    }
    out.points.col(k) = catmull_rom(p0, p1, p2, p3, t0, t1, t2, t3, u);
  }
  validate(out);
  return out;
}

CurvatureField signed_curvature(const Curve& curve) {
  validate(curve);
  const Eigen::Index n = curve.size();
  CurvatureField field;
  field.kappa.resize(n);
  field.normals.resize(2, n);
  field.tangents.resize(2, n);

  const Eigen::Index begin = curve.closed() ? 0 : 1;
  const Eigen::Index end = curve.closed() ? n : n - 1;
  for (Eigen::Index i = begin; i < end; ++i) {
    const Vec2 prev = curve.points.col(wrap(i - 1, n));
    const Vec2 here = curve.points.col(i);
    const Vec2 next = curve.points.col(wrap(i + 1, n));
    const Vec2 u = (here - prev).normalized();
    const Vec2 v = (next - here).normalized();
    Vec2 t = u + v;
    if (t.norm() == 0.0) t = v;
    t.normalize();
    field.tangents.col(i) = t;
    field.normals.col(i) = rot90(t);
    field.kappa(i) = circumcircle_kappa(prev, here, next);
  }

  if (!curve.closed()) {
    // One-sided stencils: cubic chord fit when four points exist, otherwise
    // the circumscribed circle of the only available triple.
    if (n >= 4) {
      const EndFit head = cubic_end_fit(curve.points.col(0), curve.points.col(1),
                                        curve.points.col(2), curve.points.col(3));
      field.tangents.col(0) = head.d1.normalized();
      field.kappa(0) = fit_kappa(head);
      const EndFit tail = cubic_end_fit(curve.points.col(n - 1), curve.points.col(n - 2),
                                        curve.points.col(n - 3), curve.points.col(n - 4));
      // The tail fit runs against the traversal order, which flips both the
      // tangent and the curvature sign.
      field.tangents.col(n - 1) = -tail.d1.normalized();
      field.kappa(n - 1) = -fit_kappa(tail);
    } else {
      field.tangents.col(0) = (curve.points.col(1) - curve.points.col(0)).normalized();
      field.kappa(0) = circumcircle_kappa(curve.points.col(0), curve.points.col(1),
                                          curve.points.col(2));
      field.tangents.col(n - 1) =
          (curve.points.col(n - 1) - curve.points.col(n - 2)).normalized();
      field.kappa(n - 1) = circumcircle_kappa(curve.points.col(n - 3),
                                              curve.points.col(n - 2), curve.points.col(n - 1));
    }
    field.normals.col(0) = rot90(field.tangents.col(0));
    field.normals.col(n - 1) = rot90(field.tangents.col(n - 1));
  }
  return field;
}

Eigen::VectorXd measure_weights(const Curve& curve) {
  validate(curve);
  const Eigen::Index n = curve.size();
  Eigen::VectorXd w(n);
  if (curve.closed()) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double a = (curve.points.col(i) - curve.points.col(wrap(i - 1, n))).norm();
      const double b = (curve.points.col(wrap(i + 1, n)) - curve.points.col(i)).norm();
      w(i) = 0.5 * (a + b);
    }
  } else {
    w.setZero();
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
      const double seg = (curve.points.col(i + 1) - curve.points.col(i)).norm();
      w(i) += 0.5 * seg;
      w(i + 1) += 0.5 * seg;
    }
  }
  return w;
}

}  // namespace csf
