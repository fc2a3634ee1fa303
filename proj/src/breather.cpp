#include "csf/breather.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace csf {

namespace {

Eigen::Index wrap(Eigen::Index i, Eigen::Index n) {
  Eigen::Index r = i % n;
  return r < 0 ? r + n : r;
}

Similarity identity_similarity() {
  Similarity s;
  s.alpha = 1.0;
  s.rotation = Mat2::Identity();
  s.translation = Vec2::Zero();
  s.shift = 0;
  s.reversed = false;
  s.residual = 0.0;
  return s;
}

double max_point_distance(const Curve& a, const Curve& b) {
  return (a.points - b.points).colwise().norm().maxCoeff();
}

struct Fit {
  Mat2 rotation = Mat2::Identity();
  Vec2 translation = Vec2::Zero();
  double residual = std::numeric_limits<double>::infinity();
};

// Least-squares rotation and translation at fixed scale for b_i ~
// alpha R a_i + V; the optimal angle does not depend on alpha. reflect
// composes the rotation with diag(1,-1), applied before it.
Fit fit_at_correspondence(const PointMatrix& a, const PointMatrix& b, double alpha,
                          bool reflect) {
  const Eigen::Index n = a.cols();
  const Vec2 ca = a.rowwise().mean();
  const Vec2 cb = b.rowwise().mean();
  double cross_sum = 0.0, dot_sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    Vec2 da = a.col(i) - ca;
    if (reflect) da.y() = -da.y();
    const Vec2 db = b.col(i) - cb;
    cross_sum += da.x() * db.y() - da.y() * db.x();
    dot_sum += da.dot(db);
  }
  const double theta = std::atan2(cross_sum, dot_sum);
  Mat2 rot;
  rot << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  Fit fit;
  if (reflect) {
    Mat2 mirror;
    mirror << 1.0, 0.0, 0.0, -1.0;
    fit.rotation = rot * mirror;
  } else {
    fit.rotation = rot;
  }
  fit.translation = cb - alpha * (fit.rotation * ca);
  double err2 = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    err2 += (b.col(i) - alpha * (fit.rotation * a.col(i)) - fit.translation).squaredNorm();
  fit.residual = std::sqrt(err2 / static_cast<double>(n));
  return fit;
}

PointMatrix permuted_points(const Curve& curve, int shift, bool reversed) {
  const Eigen::Index n = curve.size();
  PointMatrix out(2, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index j = curve.closed()
                               ? wrap(reversed ? shift - i : i + shift, n)
                               : (reversed ? n - 1 - i : i);
    out.col(i) = curve.points.col(j);
  }
  return out;
}

struct SearchBest {
  int shift = 0;
  bool reversed = false;
  bool reflect = false;
  Fit fit;
};

// Scans the given shifts in order; candidate order (shift ascending, forward
// before reversed, rotation before reflection) with strict improvement fixes
// the tie-breaks.
SearchBest scan_shifts(const Curve& c1, const Curve& c2, double alpha,
                       const std::vector<int>& shifts, bool allow_reflection) {
  SearchBest best;
  for (int shift : shifts) {
    for (int rev = 0; rev <= (allow_reflection ? 1 : 0); ++rev) {
      for (int refl = 0; refl <= (allow_reflection ? 1 : 0); ++refl) {
        const PointMatrix a = permuted_points(c1, shift, rev != 0);
        const Fit fit = fit_at_correspondence(a, c2.points, alpha, refl != 0);
        if (fit.residual < best.fit.residual)
          best = {shift, rev != 0, refl != 0, fit};
      }
    }
  }
  return best;
}

double splice_residual_gate(const FlowHistory& period, const Similarity& s) {
  return s.residual - 1e-3 * diameter(period.slices.front());
}

void check_period_span(const FlowHistory& period) {
  if (period.size() < 2) throw Error("precondition", "period needs at least two slices");
  if (std::abs(period.times.front()) > 1e-9 || std::abs(period.times.back() - 1.0) > 1e-9)
    throw Error("precondition", "period history must span [0, 1]");
}

}  // namespace

Similarity detect(const Curve& slice1, const Curve& slice2, bool allow_reflection) {
  validate(slice1);
  validate(slice2);
  if (slice1.topology != slice2.topology)
    throw Error("precondition", "slices must share topology");
  if (slice1.size() != slice2.size())
    throw Error("precondition", "slices must share point count");

  const double alpha = total_length(slice2) / total_length(slice1);
  const Eigen::Index n = slice1.size();

  SearchBest best;
  if (!slice1.closed()) {
    best = scan_shifts(slice1, slice2, alpha, {0}, allow_reflection);
  } else if (n <= 1024) {
    std::vector<int> shifts(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) shifts[i] = static_cast<int>(i);
    best = scan_shifts(slice1, slice2, alpha, shifts, allow_reflection);
  } else {
    // Coarse cyclic search on arclength-resampled copies, then a local scan
    // at native resolution around the converted shift. A quadratic fit to the
    // residual at the coarse optimum locates the sub-sample offset before the
    // conversion.
    const Eigen::Index ns = 512;
    const Curve c1 = resample_by_arclength(slice1, ns);
    const Curve c2 = resample_by_arclength(slice2, ns);
    std::vector<int> shifts(static_cast<std::size_t>(ns));
    for (Eigen::Index i = 0; i < ns; ++i) shifts[i] = static_cast<int>(i);
    const SearchBest coarse = scan_shifts(c1, c2, alpha, shifts, allow_reflection);

    const PointMatrix a_lo =
        permuted_points(c1, wrap(coarse.shift - 1, ns), coarse.reversed);
    const PointMatrix a_hi =
        permuted_points(c1, wrap(coarse.shift + 1, ns), coarse.reversed);
    const double r0 = coarse.fit.residual;
    const double rm = fit_at_correspondence(a_lo, c2.points, alpha, coarse.reflect).residual;
    const double rp = fit_at_correspondence(a_hi, c2.points, alpha, coarse.reflect).residual;
    const double denom = rm - 2.0 * r0 + rp;
    const double delta = denom > 0.0 ? 0.5 * (rm - rp) / denom : 0.0;

    // The coarse shift is an arclength offset in units of total length / ns,
    // while native indices need not be arclength-uniform. Convert through the
    // cumulative arclength of slice1: candidate native shifts are the indices
    // whose length fraction lies near the coarse optimum.
    double target =
        (static_cast<double>(coarse.shift) + delta) / static_cast<double>(ns);
    target -= std::floor(target);
    std::vector<double> fraction(static_cast<std::size_t>(n), 0.0);
    {
      double acc = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        fraction[static_cast<std::size_t>(i)] = acc;
        acc += (slice1.points.col((i + 1) % n) - slice1.points.col(i)).norm();
      }
      for (double& f : fraction) f /= acc;
    }
    auto cyclic_gap = [](double a, double b) {
      const double d = std::abs(a - b);
      return std::min(d, 1.0 - d);
    };
    Eigen::Index nearest = 0;
    for (Eigen::Index i = 1; i < n; ++i)
      if (cyclic_gap(fraction[static_cast<std::size_t>(i)], target) <
          cyclic_gap(fraction[static_cast<std::size_t>(nearest)], target))
        nearest = i;
    const double window = 1.5 / static_cast<double>(ns);
    best.reversed = coarse.reversed;
    best.reflect = coarse.reflect;
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::Index hop = std::abs(i - nearest);
      if (cyclic_gap(fraction[static_cast<std::size_t>(i)], target) > window &&
          std::min(hop, n - hop) > 2)
        continue;
      const int shift = static_cast<int>(i);
      const PointMatrix a = permuted_points(slice1, shift, coarse.reversed);
      const Fit fit = fit_at_correspondence(a, slice2.points, alpha, coarse.reflect);
      if (fit.residual < best.fit.residual) {
        best.shift = shift;
        best.fit = fit;
      }
    }
  }

  Similarity s;
  s.alpha = alpha;
  s.rotation = best.fit.rotation;
  s.translation = best.fit.translation;
  s.shift = best.shift;
  s.reversed = best.reversed;
  s.residual = best.fit.residual;
  validate(s);
  return s;
}

SpliceResult splice_shrinking(const FlowHistory& period, const Similarity& s, int copies) {
  validate(period);
  validate(s);
  check_period_span(period);
  if (copies < 1) throw Error("precondition", "copies must be at least 1");
  if (!(s.alpha < 1.0)) throw Error("similarity", "shrinking splice needs alpha < 1");
  if (splice_residual_gate(period, s) >= 0.0)
    throw Error("similarity", "detection residual too large against the slice diameter");

  const std::size_t M = period.size();
  const Similarity B = inverse(s);

  SpliceResult out;
  out.period = s;
  out.mode = SpliceMode::shrinking;

  Similarity Bj = identity_similarity();
  double tau_start = 0.0;  // tau_{j-1}
  double decay = 1.0;      // alpha^(-2j)
  for (int j = 0; j <= copies; ++j) {
    std::size_t m_first = M;  // first index of the reversed-time scan
    if (j > 0) {
      const Curve later = apply_similarity(period.slices[M - 1], Bj);
      out.junction_position_errors.push_back(
          max_point_distance(later, out.history.slices.back()));
      out.junction_times.push_back(tau_start);
      m_first = M - 1;
    }
    for (std::size_t m = m_first; m-- > 0;) {
      out.history.times.push_back(tau_start + decay * (1.0 - period.times[m]));
      out.history.slices.push_back(apply_similarity(period.slices[m], Bj));
    }
    tau_start += decay;
    decay /= s.alpha * s.alpha;
    Bj = compose(B, Bj);
  }
  validate(out.history);
  return out;
}

SpliceResult splice_expanding(const FlowHistory& period, const Similarity& s, int copies) {
  validate(period);
  validate(s);
  check_period_span(period);
  if (copies < 1) throw Error("precondition", "copies must be at least 1");
  if (!(s.alpha > 1.0)) throw Error("similarity", "expanding splice needs alpha > 1");
  if (splice_residual_gate(period, s) >= 0.0)
    throw Error("similarity", "detection residual too large against the slice diameter");

  const std::size_t M = period.size();

  SpliceResult out;
  out.period = s;
  out.mode = SpliceMode::expanding;

  Similarity Sj = identity_similarity();
  double t_start = 0.0;  // t_{j-1}
  double growth = 1.0;   // alpha^(2j)
  for (int j = 0; j <= copies; ++j) {
    std::size_t m_first = 0;
    if (j > 0) {
      const Curve later = apply_similarity(period.slices[0], Sj);
      out.junction_position_errors.push_back(
          max_point_distance(later, out.history.slices.back()));
      out.junction_times.push_back(t_start);
      m_first = 1;
    }
    for (std::size_t m = m_first; m < M; ++m) {
      out.history.times.push_back(t_start + growth * period.times[m]);
      out.history.slices.push_back(apply_similarity(period.slices[m], Sj));
    }
    t_start += growth;
    growth *= s.alpha * s.alpha;
    Sj = compose(s, Sj);
  }
  validate(out.history);
  return out;
}

SpliceResult splice_steady(const FlowHistory& period, const Similarity& s, int copies,
                           bool eternal) {
  validate(period);
  validate(s);
  check_period_span(period);
  if (copies < 1) throw Error("precondition", "copies must be at least 1");
  if (std::abs(s.alpha - 1.0) > 1e-6)
    throw Error("similarity", "steady splice needs alpha within 1e-6 of 1");
  if (splice_residual_gate(period, s) >= 0.0)
    throw Error("similarity", "detection residual too large against the slice diameter");

  const std::size_t M = period.size();
  const int J = copies;
  std::vector<Similarity> back_pow(static_cast<std::size_t>(J) + 1);
  std::vector<Similarity> fwd_pow(static_cast<std::size_t>(J) + 1);
  back_pow[0] = identity_similarity();
  fwd_pow[0] = identity_similarity();
  const Similarity B = inverse(s);
  for (int k = 1; k <= J; ++k) {
    back_pow[k] = compose(B, back_pow[k - 1]);
    fwd_pow[k] = compose(s, fwd_pow[k - 1]);
  }

  SpliceResult out;
  out.period = s;
  out.mode = eternal ? SpliceMode::steady_eternal : SpliceMode::steady_backward;

  for (int j = J; j >= 0; --j) {
    const Similarity& map = j > 0 ? back_pow[j] : back_pow[0];
    std::size_t m_first = 0;
    if (j < J) {
      const Curve later = apply_similarity(period.slices[0], map);
      out.junction_position_errors.push_back(
          max_point_distance(later, out.history.slices.back()));
      out.junction_times.push_back(static_cast<double>(-j));
      m_first = 1;
    }
    for (std::size_t m = m_first; m < M; ++m) {
      out.history.times.push_back(static_cast<double>(-j) + period.times[m]);
      out.history.slices.push_back(apply_similarity(period.slices[m], map));
    }
  }
  if (eternal) {
    for (int j = 1; j <= J; ++j) {
      const Curve later = apply_similarity(period.slices[0], fwd_pow[j]);
      out.junction_position_errors.push_back(
          max_point_distance(later, out.history.slices.back()));
      out.junction_times.push_back(static_cast<double>(j));
      for (std::size_t m = 1; m < M; ++m) {
        out.history.times.push_back(static_cast<double>(j) + period.times[m]);
        out.history.slices.push_back(apply_similarity(period.slices[m], fwd_pow[j]));
      }
    }
  }
  validate(out.history);
  return out;
}

std::vector<JunctionReport> junction_smoothness(const SpliceResult& splice, int order) {
  if (order != 1 && order != 2) throw Error("precondition", "order must be 1 or 2");
  const FlowHistory& h = splice.history;
  validate(h);

  std::vector<JunctionReport> reports;
  reports.reserve(splice.junction_times.size());
  for (std::size_t k = 0; k < splice.junction_times.size(); ++k) {
    const double tj = splice.junction_times[k];
    const double tol = 1e-9 * std::max(1.0, std::abs(tj));
    std::size_t m = 0;
    while (m < h.times.size() && std::abs(h.times[m] - tj) > tol) ++m;
    if (m == h.times.size())
      throw Error("internal", "junction time missing from the history");
    if (m < 2 || m + 2 >= h.times.size())
      throw Error("precondition", "need two slices on each side of each junction");

    const double dt_plus = h.times[m + 1] - h.times[m];
    const double dt_minus = h.times[m] - h.times[m - 1];

    auto field_of = [&](std::size_t idx) -> PointMatrix {
      if (order == 1) return h.slices[idx].points;
      const CurvatureField f = signed_curvature(h.slices[idx]);
      PointMatrix g(2, h.slices[idx].size());
      for (Eigen::Index i = 0; i < h.slices[idx].size(); ++i)
        g.col(i) = f.kappa(i) * f.normals.col(i);
      return g;
    };
    const PointMatrix prev = field_of(m - 1);
    const PointMatrix here = field_of(m);
    const PointMatrix next = field_of(m + 1);

    Eigen::Index begin = 0, end = h.slices[m].size();
    if (!h.slices[m].closed()) {
      begin = 2;
      end -= 2;
    }
    double worst = 0.0;
    for (Eigen::Index i = begin; i < end; ++i) {
      const Vec2 forward = (next.col(i) - here.col(i)) / dt_plus;
      const Vec2 backward = (here.col(i) - prev.col(i)) / dt_minus;
      worst = std::max(worst, (forward - backward).norm());
    }

    JunctionReport r;
    r.time = tj;
    r.position_gap = splice.junction_position_errors[k];
    r.discrepancy = worst;
    r.dt_scale = std::max(dt_plus, dt_minus);
    reports.push_back(r);
  }
  return reports;
}

RescaleResult rescale_sequence(const SpliceResult& splice, int j) {
  if (splice.mode != SpliceMode::shrinking)
    throw Error("precondition", "rescaling applies to shrinking splices");
  const int J = static_cast<int>(splice.junction_times.size());
  if (j < 0 || j >= J)
    throw Error("precondition", "period index out of the spliced range");

  const double tau_j = splice.junction_times[static_cast<std::size_t>(j)];
  const double tau_next = j + 1 < J ? splice.junction_times[static_cast<std::size_t>(j + 1)]
                                    : splice.history.times.back();
  const double alpha = splice.period.alpha;
  const double scale = 1.0 / std::sqrt(tau_j);

  Similarity fwd = identity_similarity();
  for (int k = 0; k <= j; ++k) fwd = compose(splice.period, fwd);

  // Drift of the rescaled centers: tau_j^{-1/2} sum_{k<=j} alpha^{-k} R^k V.
  // The geometric-sum estimate bounds it by sqrt(alpha^-2 - 1)/(alpha^-1 - 1)
  // |V| uniformly in j and in the rotation.
  Vec2 drift_sum = Vec2::Zero();
  double alpha_pow = 1.0;
  Mat2 rot_pow = Mat2::Identity();
  for (int k = 0; k <= j; ++k) {
    drift_sum += alpha_pow * (rot_pow * splice.period.translation);
    alpha_pow /= alpha;
    rot_pow = splice.period.rotation * rot_pow;
  }

  Similarity relabel;
  relabel.alpha = scale;
  relabel.rotation = Mat2::Identity();
  relabel.translation = Vec2::Zero();
  relabel.shift = fwd.shift;
  relabel.reversed = fwd.reversed;

  RescaleResult out;
  const double tol = 1e-9 * std::max(1.0, tau_next);
  for (std::size_t m = 0; m < splice.history.size(); ++m) {
    const double tau = splice.history.times[m];
    if (tau < tau_j - tol || tau > tau_next + tol) continue;
    out.history.times.push_back(tau / tau_j);
    out.history.slices.push_back(apply_similarity(splice.history.slices[m], relabel));
  }
  validate(out.history);

  out.scale_ratio = std::pow(alpha, 2.0 * (j + 1)) * tau_j;
  out.scale_ratio_limit = 1.0 / (1.0 / (alpha * alpha) - 1.0);
  out.drift = scale * drift_sum;
  out.drift_bound = std::sqrt(1.0 / (alpha * alpha) - 1.0) / (1.0 / alpha - 1.0) *
                    splice.period.translation.norm();
  return out;
}

OrbitReport orbit_boundedness(const FlowHistory& history, const Similarity& s,
                              Eigen::Index p0, bool forward, int copies) {
  validate(history);
  validate(s);
  if (copies < 1) throw Error("precondition", "copies must be at least 1");
  const Curve& slice = history.slices.front();
  const Eigen::Index n = slice.size();
  if (p0 < 0 || p0 >= n) throw Error("index", "p0 outside the slice");

  const Similarity step = forward ? s : inverse(s);

  OrbitReport report;
  report.magnitudes.reserve(static_cast<std::size_t>(copies) + 1);
  Eigen::Index p = p0;
  report.magnitudes.push_back(slice.points.col(p).norm());
  for (int k = 0; k < copies; ++k) {
    if (slice.closed()) {
      p = wrap(step.reversed ? step.shift - p : p + step.shift, n);
    } else {
      Eigen::Index q = step.reversed ? n - 1 - p : p;
      q += step.shift;
      if (q < 0) {
        q = 0;
        report.escaped = true;
      } else if (q >= n) {
        q = n - 1;
        report.escaped = true;
      }
      p = q;
    }
    report.magnitudes.push_back(slice.points.col(p).norm());
  }

  const std::size_t total = report.magnitudes.size();
  const std::size_t half = total / 2;
  double first = 0.0, last = 0.0;
  for (std::size_t i = 0; i < total; ++i) {
    if (i < half)
      first = std::max(first, report.magnitudes[i]);
    else
      last = std::max(last, report.magnitudes[i]);
  }
  report.sup = std::max(first, last);
  report.bounded = last <= 1.05 * first;
  return report;
}

}  // namespace csf
