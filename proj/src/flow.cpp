#include "csf/flow.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace csf {

namespace {

constexpr double kTimeSlack = 1e-12;

void check_step_health(const Curve& curve) {
  if (!curve.points.allFinite()) throw Error("step", "coordinates left the finite range");
  if (min_segment_length(curve) <= 0.0) throw Error("step", "segment length collapsed to 0");
}

double explicit_bound(const Curve& curve, double cfl) {
  const double h = min_segment_length(curve);
  return cfl * h * h;
}

// Interior max |kappa|; open curves skip the 2-point end collar.
double interior_max_kappa(const Curve& curve, const CurvatureField& field) {
  const Eigen::Index n = curve.size();
  Eigen::Index begin = 0, end = n;
  if (!curve.closed()) {
    begin = 2;
    end = n - 2;
  }
  double best = 0.0;
  for (Eigen::Index i = begin; i < end; ++i) best = std::max(best, std::abs(field.kappa(i)));
  return best;
}

// Tridiagonal solve, overwriting d with the solution. a is the subdiagonal
// (a[0] unused), c the superdiagonal (c[n-1] unused).
void thomas(std::vector<double>& a, std::vector<double>& b, std::vector<double>& c,
            std::vector<double>& d) {
  const std::size_t n = b.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double m = a[i] / b[i - 1];
    b[i] -= m * c[i - 1];
    d[i] -= m * d[i - 1];
  }
  d[n - 1] /= b[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) d[i] = (d[i] - c[i] * d[i + 1]) / b[i];
}

// Cyclic tridiagonal solve via the Sherman-Morrison correction.
std::vector<double> cyclic_thomas(const std::vector<double>& a, const std::vector<double>& b,
                                  const std::vector<double>& c, const std::vector<double>& d) {
  const std::size_t n = b.size();
  const double corner_last = a[0];     // row 0, column n-1
  const double corner_first = c[n - 1];  // row n-1, column 0
  const double gamma = -b[0];

  std::vector<double> bb = b;
  bb[0] = b[0] - gamma;
  bb[n - 1] = b[n - 1] - corner_last * corner_first / gamma;

  std::vector<double> u(n, 0.0);
  u[0] = gamma;
  u[n - 1] = corner_first;

  std::vector<double> aa = a, cc = c, y = d, z = u;
  {
    std::vector<double> a1 = aa, b1 = bb, c1 = cc;
    thomas(a1, b1, c1, y);
  }
  {
    std::vector<double> a2 = aa, b2 = bb, c2 = cc;
    thomas(a2, b2, c2, z);
  }
  const double vy = y[0] + corner_last / gamma * y[n - 1];
  const double vz = z[0] + corner_last / gamma * z[n - 1];
  const double factor = vy / (1.0 + vz);
  for (std::size_t i = 0; i < n; ++i) y[i] -= factor * z[i];
  return y;
}

}  // namespace

Curve step_csf(const Curve& curve, double dt, double cfl) {
  validate(curve);
  if (!(dt > 0.0)) throw Error("step", "dt must be positive");
  if (dt > explicit_bound(curve, cfl) * (1.0 + kTimeSlack))
    throw Error("step", "dt exceeds the stability bound cfl*h_min^2");
  const CurvatureField field = signed_curvature(curve);
  Curve out = curve;
  for (Eigen::Index i = 0; i < curve.size(); ++i)
    out.points.col(i) += dt * field.kappa(i) * field.normals.col(i);
  check_step_health(out);
  return out;
}

Curve step_drifted(const Curve& curve, double dt, const Vec2& x0, double t0, double t,
                   double cfl) {
  validate(curve);
  if (!(dt > 0.0)) throw Error("step", "dt must be positive");
  if (t0 - t <= dt) throw Error("kernel", "kernel scale t0-t collapses within the step");
  if (dt > explicit_bound(curve, cfl) * (1.0 + kTimeSlack))
    throw Error("step", "dt exceeds the stability bound cfl*h_min^2");
  const CurvatureField field = signed_curvature(curve);
  const double inv = 1.0 / (2.0 * (t0 - t));
  Curve out = curve;
  for (Eigen::Index i = 0; i < curve.size(); ++i) {
    const Vec2 tangent = field.tangents.col(i);
    const Vec2 drift = (curve.points.col(i) - x0) * inv;
    out.points.col(i) += dt * (field.kappa(i) * field.normals.col(i) -
                               drift.dot(tangent) * tangent);
  }
  check_step_health(out);
  return out;
}

Curve step_semi_implicit(const Curve& curve, double dt) {
  validate(curve);
  if (!(dt > 0.0)) throw Error("step", "dt must be positive");
  const Eigen::Index n = curve.size();

  auto seg = [&](Eigen::Index i, Eigen::Index j) {
    return (curve.points.col(j) - curve.points.col(i)).norm();
  };

  Curve out = curve;
  if (curve.closed()) {
    const std::size_t m = static_cast<std::size_t>(n);
    std::vector<double> a(m), b(m), c(m), dx(m), dy(m);
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::Index prev = (i + n - 1) % n;
      const Eigen::Index next = (i + 1) % n;
      const double ha = seg(prev, i);
      const double hb = seg(i, next);
      const double cl = 2.0 / (ha * (ha + hb));
      const double cr = 2.0 / (hb * (ha + hb));
      a[i] = -dt * cl;
      c[i] = -dt * cr;
      b[i] = 1.0 + dt * (cl + cr);
      dx[i] = curve.points(0, i);
      dy[i] = curve.points(1, i);
    }
    const std::vector<double> sx = cyclic_thomas(a, b, c, dx);
    const std::vector<double> sy = cyclic_thomas(a, b, c, dy);
    for (Eigen::Index i = 0; i < n; ++i) {
      out.points(0, i) = sx[i];
      out.points(1, i) = sy[i];
    }
  } else {
    // Endpoints take their explicit one-sided motion and serve as boundary
    // values for the interior solve.
    const CurvatureField field = signed_curvature(curve);
    const Vec2 first = curve.points.col(0) + dt * field.kappa(0) * field.normals.col(0);
    const Vec2 last =
        curve.points.col(n - 1) + dt * field.kappa(n - 1) * field.normals.col(n - 1);
    const std::size_t m = static_cast<std::size_t>(n - 2);
    std::vector<double> a(m), b(m), c(m), dx(m), dy(m);
    for (Eigen::Index k = 0; k < n - 2; ++k) {
      const Eigen::Index i = k + 1;
      const double ha = seg(i - 1, i);
      const double hb = seg(i, i + 1);
      const double cl = 2.0 / (ha * (ha + hb));
      const double cr = 2.0 / (hb * (ha + hb));
      a[k] = -dt * cl;
      c[k] = -dt * cr;
      b[k] = 1.0 + dt * (cl + cr);
      dx[k] = curve.points(0, i);
      dy[k] = curve.points(1, i);
      if (i == 1) {
        dx[k] += dt * cl * first.x();
        dy[k] += dt * cl * first.y();
        a[k] = 0.0;
      }
      if (i == n - 2) {
        dx[k] += dt * cr * last.x();
        dy[k] += dt * cr * last.y();
        c[k] = 0.0;
      }
    }
    thomas(a, b, c, dx);
    std::vector<double> a2(m), b2(m), c2(m);
    for (Eigen::Index k = 0; k < n - 2; ++k) {
      const Eigen::Index i = k + 1;
      const double ha = seg(i - 1, i);
      const double hb = seg(i, i + 1);
      const double cl = 2.0 / (ha * (ha + hb));
      const double cr = 2.0 / (hb * (ha + hb));
      a2[k] = (i == 1) ? 0.0 : -dt * cl;
      c2[k] = (i == n - 2) ? 0.0 : -dt * cr;
      b2[k] = 1.0 + dt * (cl + cr);
    }
    thomas(a2, b2, c2, dy);
    out.points.col(0) = first;
    out.points.col(n - 1) = last;
    for (Eigen::Index k = 0; k < n - 2; ++k) {
      out.points(0, k + 1) = dx[k];
      out.points(1, k + 1) = dy[k];
    }
  }
  check_step_health(out);
  return out;
}

FlowHistory evolve(const Curve& initial, double t_start, double t_end,
                   const SolverOptions& options) {
  validate(initial);
  if (t_end < t_start) throw Error("precondition", "t_end must not precede t_start");

  FlowHistory history;
  history.times.push_back(t_start);
  history.slices.push_back(initial);
  if (t_end == t_start) return history;

  const double h0 = mean_segment_length(initial);
  const double span = t_end - t_start;
  Curve current = initial;
  double t = t_start;
  long steps = 0;
  double next_record =
      options.record_dt > 0.0 ? t_start + options.record_dt : t_start;

  auto record = [&](double time) {
    if (!history.times.empty() && time <= history.times.back()) return;
    history.times.push_back(time);
    history.slices.push_back(current);
  };

  while (t < t_end - kTimeSlack * span) {
    double dt = options.dt;
    if (dt <= 0.0) {
      dt = options.scheme == Scheme::explicit_euler
               ? explicit_bound(current, options.cfl)
               : std::max(explicit_bound(current, options.cfl), span / 1000.0);
    }
    dt = std::min(dt, t_end - t);
    try {
      current = options.scheme == Scheme::explicit_euler
                    ? step_csf(current, dt, options.cfl)
                    : step_semi_implicit(current, dt);
    } catch (const Error& e) {
      throw Error(e.code(), std::string(e.what()) + " at t=" + std::to_string(t));
    }
    t += dt;
    ++steps;

    if (options.redistribute_every > 0 && steps % options.redistribute_every == 0 &&
        t < t_end - kTimeSlack * span) {
      current = resample_by_arclength(current, current.size());
      history.resample_times.push_back(t);
    }

    if (options.singular_factor > 0.0) {
      const CurvatureField field = signed_curvature(current);
      const double max_kappa = interior_max_kappa(current, field);
      if (max_kappa * options.singular_factor * h0 > 1.0) {
        record(t);
        history.singular_time = t;
        validate(history);
        return history;
      }
    }

    if (options.record_dt <= 0.0) {
      record(t);
    } else if (t >= next_record - kTimeSlack * span) {
      record(t);
      while (next_record <= t + kTimeSlack * span) next_record += options.record_dt;
    }
  }
  record(t_end);
  validate(history);
  return history;
}

Curve analytic_selfsimilar_flow(const SolitonSpec& spec, const Curve& profile, double t) {
  validate(spec);
  validate(profile);
  const double a2 = 1.0 + 2.0 * spec.lambda * t;
  if (a2 <= 0.0) throw Error("time", "time is past the extinction of the scaling factor");
  const double a = std::sqrt(a2);
  const double theta =
      spec.lambda == 0.0 ? spec.omega * t : spec.omega / (2.0 * spec.lambda) * std::log(a2);
  Mat2 rot;
  rot << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  Curve out = profile;
  for (Eigen::Index i = 0; i < profile.size(); ++i)
    out.points.col(i) = a * (rot * profile.points.col(i)) + spec.e * t;
  return out;
}

FlowHistory selfsimilar_history(const SolitonSpec& spec, const Curve& profile,
                                const std::vector<double>& times, double clock_offset) {
  FlowHistory history;
  for (double t : times) {
    history.times.push_back(t + clock_offset);
    history.slices.push_back(analytic_selfsimilar_flow(spec, profile, t));
  }
  validate(history);
  return history;
}

}  // namespace csf
