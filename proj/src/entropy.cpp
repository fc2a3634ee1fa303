#include "csf/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

namespace csf {

namespace {

// Gaussian decay rate of polyline mass beyond an open end. Estimated as
// arclength accumulated per unit distance-from-x0 over the trailing samples;
// a curve that stops receding from x0 yields a large rate and the tail
// certificate blows up honestly.
double end_growth_rate(const Curve& curve, const Vec2& x0, bool at_tail) {
  const Eigen::Index n = curve.size();
  const Eigen::Index k = std::max<Eigen::Index>(3, n / 20);
  const Eigen::Index last = at_tail ? n - 1 : 0;
  const Eigen::Index inner = at_tail ? n - 1 - k : k;
  double arc = 0.0;
  for (Eigen::Index i = 0; i < k; ++i) {
    const Eigen::Index a = at_tail ? n - 1 - i : i;
    const Eigen::Index b = at_tail ? n - 2 - i : i + 1;
    arc += (curve.points.col(a) - curve.points.col(b)).norm();
  }
  const double span = std::abs((curve.points.col(last) - x0).norm() -
                               (curve.points.col(inner) - x0).norm());
  return arc / std::max(span, 1e-12);
}

double end_tail(const Curve& curve, const Vec2& x0, double T, bool at_tail) {
  const Eigen::Index last = at_tail ? curve.size() - 1 : 0;
  const double d = (curve.points.col(last) - x0).norm();
  const double g = end_growth_rate(curve, x0, at_tail);
  // Mass beyond the end <= g * integral_d^inf exp(-r^2/4T) dr, and the
  // integral is bounded by min(sqrt(pi T), exp(-d^2/4T) * 2T/d).
  double integral = std::sqrt(std::numbers::pi * T);
  if (d > 0.0) integral = std::min(integral, std::exp(-d * d / (4.0 * T)) * 2.0 * T / d);
  return g * integral / std::sqrt(4.0 * std::numbers::pi * T);
}

struct WindowSets {
  std::vector<double> dist;   // arclength distance from the reference sample
  std::vector<double> radius;  // |x| per sample
};

WindowSets window_geometry(const Curve& curve) {
  const Eigen::Index n = curve.size();
  WindowSets ws;
  ws.radius.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) ws.radius[i] = curve.points.col(i).norm();
  const Eigen::Index anchor = static_cast<Eigen::Index>(
      std::min_element(ws.radius.begin(), ws.radius.end()) - ws.radius.begin());

  std::vector<double> s(n, 0.0);
  for (Eigen::Index i = 1; i < n; ++i)
    s[i] = s[i - 1] + (curve.points.col(i) - curve.points.col(i - 1)).norm();
  const double total = curve.closed()
                           ? s[n - 1] + (curve.points.col(0) - curve.points.col(n - 1)).norm()
                           : s[n - 1];
  ws.dist.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double d = std::abs(s[i] - s[anchor]);
    if (curve.closed()) d = std::min(d, total - d);
    ws.dist[i] = d;
  }
  return ws;
}

}  // namespace

double backward_heat_kernel(const Vec2& x, double t, const Vec2& x0, double t0) {
  const double T = t0 - t;
  if (!(T > 0.0)) throw Error("kernel", "kernel requires t < t0");
  const double r2 = (x - x0).squaredNorm();
  return std::exp(-r2 / (4.0 * T)) / std::sqrt(4.0 * std::numbers::pi * T);
}

EntropyReport huisken_functional(const Curve& curve, double t, const Vec2& x0, double t0) {
  validate(curve);
  const double T = t0 - t;
  if (!(T > 0.0)) throw Error("kernel", "kernel requires t < t0");
  const Eigen::VectorXd w = measure_weights(curve);
  double value = 0.0;
  for (Eigen::Index i = 0; i < curve.size(); ++i)
    value += w(i) * backward_heat_kernel(curve.points.col(i), t, x0, t0);
  EntropyReport report;
  report.value = value;
  report.deficit = 0.0;
  report.x0 = x0;
  report.t0 = t0;
  report.t = t;
  report.tail_estimate = curve.closed()
                             ? 0.0
                             : end_tail(curve, x0, T, false) + end_tail(curve, x0, T, true);
  return report;
}

double deficit(const Curve& curve, double t, const Vec2& x0, double t0) {
  validate(curve);
  const double T = t0 - t;
  if (!(T > 0.0)) throw Error("kernel", "kernel requires t < t0");
  const CurvatureField field = signed_curvature(curve);
  const Eigen::VectorXd w = measure_weights(curve);
  Eigen::Index begin = 0, end = curve.size();
  if (!curve.closed()) {
    begin = 2;
    end = curve.size() - 2;
  }
  double total = 0.0;
  for (Eigen::Index i = begin; i < end; ++i) {
    const Vec2 offset = curve.points.col(i) - x0;
    const double along = field.kappa(i) + offset.dot(field.normals.col(i)) / (2.0 * T);
    total += w(i) * along * along * backward_heat_kernel(curve.points.col(i), t, x0, t0);
  }
  return total;
}

MonotonicityReport verify_monotonicity(const FlowHistory& history, const Vec2& x0, double t0) {
  validate(history);
  if (history.times.size() < 2) throw Error("precondition", "need at least two slices");
  if (!(t0 > history.times.back())) throw Error("kernel", "t0 must exceed the final time");

  std::vector<double> values(history.times.size());
  std::vector<double> deficits(history.times.size());
  for (std::size_t m = 0; m < history.times.size(); ++m) {
    const EntropyReport r =
        huisken_functional(history.slices[m], history.times[m], x0, t0);
    if (!history.slices[m].closed() && r.tail_estimate >= 0.01 * r.value)
      throw Error("precondition", "open-curve tail is not certified small");
    values[m] = r.value;
    deficits[m] = deficit(history.slices[m], history.times[m], x0, t0);
  }
  MonotonicityReport report;
  report.lhs_drop = values.front() - values.back();
  report.integrated_deficit = 0.0;
  for (std::size_t m = 0; m + 1 < history.times.size(); ++m) {
    const double dt = history.times[m + 1] - history.times[m];
    report.integrated_deficit += 0.5 * dt * (deficits[m] + deficits[m + 1]);
  }
  report.discrepancy = std::abs(report.lhs_drop - report.integrated_deficit);
  return report;
}

SupEntropyResult sup_entropy(const Curve& curve, double t, double t0,
                             const SupEntropySearch& search) {
  validate(curve);
  if (!curve.closed()) throw Error("precondition", "sup search requires a closed curve");
  const double T = t0 - t;
  if (!(T > 0.0)) throw Error("kernel", "kernel requires t < t0");
  const double scale = std::sqrt(T);
  const Eigen::VectorXd w = measure_weights(curve);

  auto value_at = [&](const Vec2& x0) {
    double v = 0.0;
    for (Eigen::Index i = 0; i < curve.size(); ++i)
      v += w(i) * backward_heat_kernel(curve.points.col(i), t, x0, t0);
    return v;
  };

  const Vec2 lo = curve.points.rowwise().minCoeff();
  const Vec2 hi = curve.points.rowwise().maxCoeff();
  const Vec2 center = 0.5 * (lo + hi);
  const Vec2 half =
      0.5 * (hi - lo) + Vec2::Constant(search.box_inflation * scale);
  const double step = search.grid_spacing_factor * scale;

  const int nx = static_cast<int>(std::floor(half.x() / step));
  const int ny = static_cast<int>(std::floor(half.y() / step));
  SupEntropyResult best{-std::numeric_limits<double>::infinity(), center};
  for (int iy = -ny; iy <= ny; ++iy) {
    for (int ix = -nx; ix <= nx; ++ix) {
      const Vec2 x0 = center + Vec2(ix * step, iy * step);
      const double v = value_at(x0);
      if (v > best.value) best = {v, x0};
    }
  }

  double pattern = 0.5 * step;
  for (int iter = 0; iter < search.refine_iterations; ++iter) {
    const Vec2 moves[4] = {Vec2(pattern, 0.0), Vec2(-pattern, 0.0), Vec2(0.0, pattern),
                           Vec2(0.0, -pattern)};
    SupEntropyResult improved = best;
    for (const Vec2& m : moves) {
      const Vec2 x0 = best.x0 + m;
      const double v = value_at(x0);
      if (v > improved.value) improved = {v, x0};
    }
    if (improved.value > best.value)
      best = improved;
    else
      pattern *= 0.5;
  }
  return best;
}

GammaReport gamma_integral(const Curve& curve, double gamma, const std::vector<double>& windows) {
  validate(curve);
  if (!(gamma > 0.0)) throw Error("precondition", "gamma must be positive");
  for (std::size_t k = 0; k < windows.size(); ++k) {
    if (!(windows[k] > 0.0) || (k > 0 && windows[k] <= windows[k - 1]))
      throw Error("window", "windows must be positive and strictly increasing");
  }

  GammaReport report;
  report.gamma = gamma;
  report.verdict = GammaVerdict::inconclusive;
  if (windows.empty()) return report;

  const WindowSets ws = window_geometry(curve);
  const Eigen::VectorXd w = measure_weights(curve);
  const Eigen::Index n = curve.size();

  std::vector<double> mass(windows.size(), 0.0);    // integral per window
  std::vector<double> weight(windows.size(), 0.0);  // plain length per window
  for (std::size_t k = 0; k < windows.size(); ++k) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (ws.dist[i] <= windows[k]) {
        mass[k] += w(i) * std::exp(-gamma * ws.radius[i] * ws.radius[i]);
        weight[k] += w(i);
      }
    }
  }
  report.window_values = mass;

  const std::size_t K = windows.size();
  if (K < 3) return report;

  std::vector<double> inc(K), rate(K);
  for (std::size_t k = 0; k < K; ++k) {
    inc[k] = mass[k] - (k > 0 ? mass[k - 1] : 0.0);
    const double width = windows[k] - (k > 0 ? windows[k - 1] : 0.0);
    rate[k] = inc[k] / width;
  }

  // Tail certificate for the mass beyond the last window: Gaussian factor at
  // the nearest uncounted point times the local length growth rate. Open
  // curve ends always count as uncounted continuation.
  double reach = std::numeric_limits<double>::infinity();
  bool tail_exists = false;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (ws.dist[i] > windows.back()) {
      tail_exists = true;
      reach = std::min(reach, ws.radius[i]);
    }
  }
  if (!curve.closed()) {
    tail_exists = true;
    reach = std::min({reach, ws.radius[0], ws.radius[static_cast<std::size_t>(n - 1)]});
  }
  double tail_factor = 0.0;
  if (tail_exists) {
    const double g =
        std::max(1.0, (weight[K - 1] - weight[K - 2]) / (windows[K - 1] - windows[K - 2]));
    tail_factor = g * std::exp(-gamma * reach * reach);
  }

  const bool decreasing = inc[K - 3] >= inc[K - 2] && inc[K - 2] >= inc[K - 1];
  if (decreasing && inc[K - 1] <= 1e-8 * mass[K - 1] && tail_factor <= 1e-6) {
    report.verdict = GammaVerdict::convergent;
    return report;
  }
  const double rmin = std::min({rate[K - 3], rate[K - 2], rate[K - 1]});
  const double rmax = std::max({rate[K - 3], rate[K - 2], rate[K - 1]});
  if (mass[K - 1] > 0.0 && rmin >= 0.25 * rmax && inc[K - 1] >= 0.01 * mass[K - 1])
    report.verdict = GammaVerdict::divergent;
  return report;
}

double breather_gamma_threshold(double alpha, double t1, double t2) {
  if (!(alpha > 0.0) || !(alpha < 1.0))
    throw Error("precondition", "alpha must lie in (0,1)");
  if (!(t2 > t1)) throw Error("precondition", "t2 must exceed t1");
  return (1.0 - alpha * alpha) / (4.0 * (t2 - t1));
}

}  // namespace csf
