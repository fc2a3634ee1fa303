#include "csf/solitons.hpp"

#include "csf/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace csf {

namespace {

constexpr double kBlowupKappa = 1e6;

struct ArmState {
  Vec2 x;
  double theta;
};

// Pointwise curvature of a self-similar profile: the normal component of the
// similarity velocity field lambda*x + omega*J*x + e.
double field_kappa(const SolitonSpec& spec, const Vec2& x, double theta) {
  const Vec2 n(-std::sin(theta), std::cos(theta));
  const Vec2 v(spec.lambda * x.x() - spec.omega * x.y(),
               spec.lambda * x.y() + spec.omega * x.x());
  return (v + spec.e).dot(n);
}

ArmState rhs(const SolitonSpec& spec, const ArmState& s) {
  ArmState d;
  d.x = Vec2(std::cos(s.theta), std::sin(s.theta));
  d.theta = field_kappa(spec, s.x, s.theta);
  return d;
}

ArmState rk4_step(const SolitonSpec& spec, const ArmState& s, double h) {
  const ArmState k1 = rhs(spec, s);
  const ArmState s2{s.x + 0.5 * h * k1.x, s.theta + 0.5 * h * k1.theta};
  const ArmState k2 = rhs(spec, s2);
  const ArmState s3{s.x + 0.5 * h * k2.x, s.theta + 0.5 * h * k2.theta};
  const ArmState k3 = rhs(spec, s3);
  const ArmState s4{s.x + h * k3.x, s.theta + h * k3.theta};
  const ArmState k4 = rhs(spec, s4);
  ArmState out;
  out.x = s.x + h / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x);
  out.theta = s.theta + h / 6.0 * (k1.theta + 2.0 * k2.theta + 2.0 * k3.theta + k4.theta);
  return out;
}

// Integrates one arm, start excluded. Returns early on curvature blow-up.
std::vector<Vec2> integrate_arm(const SolitonSpec& spec, ArmState s, long steps, double h,
                                bool* blew_up) {
  std::vector<Vec2> points;
  points.reserve(static_cast<std::size_t>(steps));
  *blew_up = false;
  for (long i = 0; i < steps; ++i) {
    s = rk4_step(spec, s, h);
    if (std::abs(field_kappa(spec, s.x, s.theta)) > kBlowupKappa) {
      *blew_up = true;
      break;
    }
    points.push_back(s.x);
  }
  return points;
}

}  // namespace

void validate(const SolitonSpec& spec) {
  if (!std::isfinite(spec.lambda) || !std::isfinite(spec.omega) || !spec.e.allFinite())
    throw Error("spec", "soliton parameters must be finite");
  const bool centered = spec.e.norm() == 0.0;
  switch (spec.kind) {
    case SolitonKind::shrinker:
      if (!(spec.lambda < 0.0) || spec.omega != 0.0 || !centered)
        throw Error("spec", "shrinker requires lambda < 0, omega = 0, e = 0");
      break;
    case SolitonKind::expander:
      if (!(spec.lambda > 0.0) || spec.omega != 0.0 || !centered)
        throw Error("spec", "expander requires lambda > 0, omega = 0, e = 0");
      break;
    case SolitonKind::translator:
      if (spec.lambda != 0.0 || spec.omega != 0.0 || centered)
        throw Error("spec", "translator requires lambda = omega = 0 and e != 0");
      break;
    case SolitonKind::rotator:
      if (spec.lambda != 0.0 || spec.omega == 0.0 || !centered)
        throw Error("spec", "rotator requires lambda = 0, omega != 0, e = 0");
      break;
    case SolitonKind::mixed:
      if (spec.lambda == 0.0 || spec.omega == 0.0 || !centered)
        throw Error("spec", "mixed soliton requires lambda != 0, omega != 0, e = 0");
      break;
    case SolitonKind::custom:
      break;
  }
}

Curve generate(const SolitonSpec& spec, const ProfileStart& start, double s_max, double ds,
               bool symmetric) {
  validate(spec);
  if (!(s_max > 0.0) || !(ds > 0.0)) throw Error("precondition", "s_max and ds must be positive");
  const long steps = std::max<long>(3, std::lround(s_max / ds));
  const double h = s_max / static_cast<double>(steps);

  bool fwd_blew = false, back_blew = false;
  const ArmState forward_start{start.x, start.theta};
  const std::vector<Vec2> forward = integrate_arm(spec, forward_start, steps, h, &fwd_blew);

  std::vector<Vec2> backward;
  if (symmetric) {
    // Traversing the profile the other way flips the tangent angle by pi; the
    // resulting arm, reversed, continues the same immersed curve.
    const ArmState backward_start{start.x, start.theta + std::numbers::pi};
    backward = integrate_arm(spec, backward_start, steps, h, &back_blew);
  }

  Curve out;
  out.topology = Topology::open;
  out.truncated = true;
  const Eigen::Index n =
      static_cast<Eigen::Index>(backward.size() + 1 + forward.size());
  if (n < 3) throw Error("precondition", "profile degenerated before three samples");
  out.points.resize(2, n);
  Eigen::Index col = 0;
  for (auto it = backward.rbegin(); it != backward.rend(); ++it) out.points.col(col++) = *it;
  out.points.col(col++) = start.x;
  for (const Vec2& p : forward) out.points.col(col++) = p;
  validate(out);
  return out;
}

double residual(const Curve& curve, const SolitonSpec& spec) {
  validate(curve);
  validate(spec);
  const CurvatureField field = signed_curvature(curve);
  Eigen::Index begin = 0, end = curve.size();
  if (!curve.closed()) {
    begin = 2;
    end = curve.size() - 2;
  }
  double worst = 0.0;
  for (Eigen::Index i = begin; i < end; ++i) {
    const Vec2 x = curve.points.col(i);
    const Vec2 n = field.normals.col(i);
    const Vec2 v(spec.lambda * x.x() - spec.omega * x.y(),
                 spec.lambda * x.y() + spec.omega * x.x());
    worst = std::max(worst, std::abs(field.kappa(i) - (v + spec.e).dot(n)));
  }
  return worst;
}

CounterexampleReport classify_counterexample(const SolitonSpec& spec, const Curve& curve,
                                             double gamma) {
  const double res = residual(curve, spec);
  if (res >= 1e-6)
    throw Error("precondition", "profile residual too large for classification");

  const CurvatureField field = signed_curvature(curve);
  Eigen::Index begin = 0, end = curve.size();
  if (!curve.closed()) {
    begin = 2;
    end = curve.size() - 2;
  }
  double min_kappa = field.kappa(begin);
  for (Eigen::Index i = begin; i < end; ++i) min_kappa = std::min(min_kappa, field.kappa(i));

  CounterexampleReport report;
  report.weakly_convex = min_kappa >= -1e-6;
  report.weakly_mean_convex = report.weakly_convex;
  report.gamma = gamma;

  // Window geometry shared with the gamma integral: arclength distance from
  // the sample nearest the origin.
  const Eigen::Index n = curve.size();
  std::vector<double> radius(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) radius[i] = curve.points.col(i).norm();
  const Eigen::Index anchor = static_cast<Eigen::Index>(
      std::min_element(radius.begin(), radius.end()) - radius.begin());
  std::vector<double> s(static_cast<std::size_t>(n), 0.0);
  for (Eigen::Index i = 1; i < n; ++i)
    s[i] = s[i - 1] + (curve.points.col(i) - curve.points.col(i - 1)).norm();
  const double total = curve.closed()
                           ? s[n - 1] + (curve.points.col(0) - curve.points.col(n - 1)).norm()
                           : s[n - 1];
  double d_max = 0.0;
  std::vector<double> dist(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    double d = std::abs(s[i] - s[anchor]);
    if (curve.closed()) d = std::min(d, total - d);
    dist[i] = d;
    d_max = std::max(d_max, d);
  }

  const GammaReport gr = gamma_integral(
      curve, gamma, {d_max / 8.0, d_max / 4.0, d_max / 2.0, d_max});
  report.gamma_ok = gr.verdict == GammaVerdict::convergent;

  // A profile whose outermost quarter (by window distance) stays within the
  // radius range of the rest is treated as staying bounded.
  const double cut = 0.75 * d_max;
  double inner = 0.0, outer = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (dist[i] <= cut)
      inner = std::max(inner, radius[i]);
    else
      outer = std::max(outer, radius[i]);
  }
  report.bounded_orbit = outer <= 1.05 * inner;
  return report;
}

const std::vector<SolitonPreset>& soliton_presets() {
  static const std::vector<SolitonPreset> presets = [] {
    std::vector<SolitonPreset> p;
    const double pi = std::numbers::pi;
    p.push_back({"grim-reaper",
                 {SolitonKind::translator, 0.0, 0.0, Vec2(0.0, 1.0)},
                 {Vec2(0.0, 0.0), 0.0},
                 2.46,
                 1e-3,
                 true,
                 false});
    p.push_back({"shrinker-circle",
                 {SolitonKind::shrinker, -0.5, 0.0, Vec2(0.0, 0.0)},
                 {Vec2(std::sqrt(2.0), 0.0), pi / 2.0},
                 2.0 * pi * std::sqrt(2.0),
                 1e-3,
                 false,
                 true});
    p.push_back({"expander",
                 {SolitonKind::expander, 0.5, 0.0, Vec2(0.0, 0.0)},
                 {Vec2(1.0, 0.0), -pi / 2.0},
                 3.0,
                 1e-3,
                 true,
                 false});
    p.push_back({"yin-yang",
                 {SolitonKind::rotator, 0.0, -1.0, Vec2(0.0, 0.0)},
                 {Vec2(0.0, 0.0), 0.0},
                 30.0,
                 1e-3,
                 true,
                 false});
    p.push_back({"shrink-rotator",
                 {SolitonKind::mixed, -0.5, 2.0, Vec2(0.0, 0.0)},
                 {Vec2(0.3, 0.0), pi / 2.0},
                 800.0,
                 1e-3,
                 false,
                 false});
    p.push_back({"expand-rotator",
                 {SolitonKind::mixed, 0.5, 2.0, Vec2(0.0, 0.0)},
                 {Vec2(0.3, 0.0), pi / 2.0},
                 200.0,
                 1e-3,
                 true,
                 false});
    return p;
  }();
  return presets;
}

std::optional<SolitonPreset> soliton_preset(const std::string& name) {
  for (const SolitonPreset& p : soliton_presets())
    if (p.name == name) return p;
  return std::nullopt;
}

Curve generate_preset(const SolitonPreset& preset) {
  Curve curve = generate(preset.spec, preset.start, preset.s_max, preset.ds, preset.symmetric);
  if (preset.close_profile) {
    const long steps = std::max<long>(3, std::lround(preset.s_max / preset.ds));
    const double h = preset.s_max / static_cast<double>(steps);
    Eigen::Index n = curve.size();
    while (n > 3 &&
           (curve.points.col(n - 1) - curve.points.col(0)).norm() < 0.75 * h)
      --n;
    if (n == curve.size())
      throw Error("precondition", "profile endpoint does not return to the start");
    Curve closed;
    closed.topology = Topology::closed;
    closed.truncated = false;
    closed.points = curve.points.leftCols(n);
    validate(closed);
    return closed;
  }
  return curve;
}

}  // namespace csf
