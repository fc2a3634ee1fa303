// End-to-end gate for the laboratory. Runs ten independent checks, prints
// exactly one PASS/FAIL line for each, and exits with the number of failures.
// Tolerances are pinned in the bodies below. The CLI-facing checks need the
// executable path, passed as --cli <path>.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "csf/breather.hpp"
#include "csf/entropy.hpp"
#include "csf/flow.hpp"
#include "csf/harnack.hpp"
#include "csf/io.hpp"
#include "csf/solitons.hpp"

namespace {

using namespace csf;

constexpr double kShrinkerValue = 1.5203469010662808;  // sqrt(2 pi / e)

Curve make_circle(double radius, Eigen::Index n, const Vec2& center = Vec2::Zero()) {
  Curve curve;
  curve.points.resize(2, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double phi =
        2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
    curve.points.col(i) = center + radius * Vec2(std::cos(phi), std::sin(phi));
  }
  return curve;
}

// Closed star-shaped curve with no rotational or mirror symmetry, so a
// similarity fit has a unique optimum.
Curve make_bumpy(Eigen::Index n) {
  Curve curve;
  curve.points.resize(2, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double phi =
        2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
    const double r = 1.0 + 0.3 * std::cos(phi) + 0.12 * std::sin(2.0 * phi) +
                     0.05 * std::cos(3.0 * phi);
    curve.points.col(i) = r * Vec2(std::cos(phi), std::sin(phi));
  }
  return curve;
}

Mat2 rot2(double theta) {
  Mat2 r;
  r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return r;
}

Similarity make_similarity(double alpha, double theta, const Vec2& v, int shift) {
  Similarity s;
  s.alpha = alpha;
  s.rotation = rot2(theta);
  s.translation = v;
  s.shift = shift;
  return s;
}

SolitonSpec translator_spec() {
  SolitonSpec spec;
  spec.kind = SolitonKind::translator;
  spec.e = Vec2(0.0, 1.0);
  return spec;
}

SolitonSpec expander_spec() {
  SolitonSpec spec;
  spec.kind = SolitonKind::expander;
  spec.lambda = 0.5;
  return spec;
}

// Arclength parametrization of y = -log cos x from the apex.
Vec2 reaper_point(double s) {
  return Vec2(std::atan(std::sinh(s)), std::log(std::cosh(s)));
}

Curve make_line(double half_span, double h) {
  const auto n = static_cast<Eigen::Index>(std::lround(2.0 * half_span / h)) + 1;
  Curve c;
  c.topology = Topology::open;
  c.points.resize(2, n);
  for (Eigen::Index i = 0; i < n; ++i)
    c.points.col(i) = Vec2(-half_span + h * static_cast<double>(i), 0.0);
  return c;
}

double mean_radius(const Curve& c) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < c.size(); ++i) acc += c.points.col(i).norm();
  return acc / static_cast<double>(c.size());
}

// Doubling arclength windows up to the farthest sample, measured from the
// sample closest to the origin; the anchor convention matches the gamma
// integral's.
std::vector<double> doubling_windows(const Curve& curve) {
  const Eigen::Index n = curve.size();
  Eigen::Index anchor = 0;
  for (Eigen::Index i = 1; i < n; ++i)
    if (curve.points.col(i).norm() < curve.points.col(anchor).norm()) anchor = i;
  std::vector<double> s(static_cast<std::size_t>(n), 0.0);
  for (Eigen::Index i = 1; i < n; ++i)
    s[static_cast<std::size_t>(i)] =
        s[static_cast<std::size_t>(i - 1)] +
        (curve.points.col(i) - curve.points.col(i - 1)).norm();
  const double d_max =
      std::max(s[static_cast<std::size_t>(anchor)],
               s.back() - s[static_cast<std::size_t>(anchor)]);
  return {d_max / 8.0, d_max / 4.0, d_max / 2.0, d_max};
}

// Shrinking-circle breather period: radius sqrt(4 - 2t) on [0, 1].
FlowHistory circle_period(std::size_t m_count, Eigen::Index n) {
  FlowHistory period;
  for (std::size_t m = 0; m < m_count; ++m) {
    const double t = static_cast<double>(m) / static_cast<double>(m_count - 1);
    period.times.push_back(t);
    period.slices.push_back(make_circle(std::sqrt(4.0 - 2.0 * t), n));
  }
  return period;
}

// Evolved circle breather period: R(0) = 2 contracts to R(1) close to
// sqrt(2), so the detected map has alpha near sqrt(1/2).
FlowHistory evolved_circle_period() {
  SolverOptions opts;
  opts.record_dt = 0.05;
  return evolve(make_circle(2.0, 256), 0.0, 1.0, opts);
}

struct Checks {
  std::vector<std::string> failures;
  void check(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
};

int run_criterion(int number, const char* title, const std::function<void(Checks&)>& body) {
  Checks c;
  try {
    body(c);
  } catch (const Error& e) {
    c.failures.push_back(std::string("error ") + e.code() + ": " + e.what());
  } catch (const std::exception& e) {
    c.failures.push_back(std::string("exception: ") + e.what());
  }
  if (c.failures.empty()) {
    std::printf("PASS: %d %s\n", number, title);
    return 0;
  }
  std::string detail = c.failures.front();
  if (c.failures.size() > 1)
    detail += " [+" + std::to_string(c.failures.size() - 1) + " more]";
  std::printf("FAIL: %d %s (%s)\n", number, title, detail.c_str());
  return 1;
}

// --- subprocess plumbing for the CLI-facing checks ---

std::string shell_quote(const std::string& s) {
  std::string q;
  q.reserve(s.size() + 2);
  q += '\'';
  for (char c : s) {
    if (c == '\'')
      q += "'\\''";
    else
      q += c;
  }
  q += '\'';
  return q;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

RunResult run_cli(const std::string& exe, const std::vector<std::string>& args,
                  const std::filesystem::path& cwd = {}) {
  static int counter = 0;
  const std::string tag =
      std::to_string(::getpid()) + "_" + std::to_string(counter++);
  const auto out_path =
      std::filesystem::temp_directory_path() / ("csf_acc_" + tag + ".out");
  const auto err_path =
      std::filesystem::temp_directory_path() / ("csf_acc_" + tag + ".err");

  std::string cmd;
  if (!cwd.empty()) cmd += "cd " + shell_quote(cwd.string()) + " && ";
  cmd += shell_quote(exe);
  for (const std::string& a : args) cmd += " " + shell_quote(a);
  cmd += " > " + shell_quote(out_path.string()) + " 2> " +
         shell_quote(err_path.string());

  const int status = std::system(cmd.c_str());
  RunResult r;
  if (status == -1)
    r.code = -1;
  else if (WIFEXITED(status))
    r.code = WEXITSTATUS(status);
  else
    r.code = 128;
  r.out = slurp(out_path);
  r.err = slurp(err_path);
  std::filesystem::remove(out_path);
  std::filesystem::remove(err_path);
  return r;
}

// --- the ten checks ---

void criterion_monotonicity(Checks& c) {
  constexpr double kIdentityTol = 1e-2;
  constexpr double kIncreaseSlack = 1e-9;
  constexpr double kRatioLo = 1.8;
  constexpr double kRatioHi = 2.2;
  constexpr double kBudgetSeconds = 10.0;
  // Both fixed steps sit under the explicit stability bound 0.2 h_min^2 at
  // the smallest radius the circle reaches (about 6.0e-5 at N = 512).
  constexpr double kDtCoarse = 5e-5;
  constexpr double kDtFine = 2.5e-5;

  const auto clock_start = std::chrono::steady_clock::now();
  const Curve circle = make_circle(2.0, 512);
  auto run = [&](double dt) {
    SolverOptions opts;
    opts.dt = dt;
    opts.record_dt = 2e-4;
    return evolve(circle, 0.0, 1.0, opts);
  };
  const FlowHistory coarse = run(kDtCoarse);
  const FlowHistory fine = run(kDtFine);

  // The pinned center (0, 2) is the circle's own extinction point, where the
  // flow is exactly critical: the identity is tight and the functional must
  // not increase along the discrete flow.
  const MonotonicityReport pinned = verify_monotonicity(coarse, Vec2::Zero(), 2.0);
  c.check(pinned.discrepancy < kIdentityTol, "drop vs integrated deficit at (0, 2)");

  double previous = std::numeric_limits<double>::infinity();
  double max_increase = 0.0;
  for (std::size_t m = 0; m < coarse.size(); ++m) {
    const double value =
        huisken_functional(coarse.slices[m], coarse.times[m], Vec2::Zero(), 2.0).value;
    if (m > 0) max_increase = std::max(max_increase, value - previous);
    previous = value;
  }
  c.check(max_increase <= kIncreaseSlack, "functional non-increasing at (0, 2)");

  // First-order convergence of the verification is read at (0, 3). At the
  // critical center the continuum deficit vanishes and the leading error
  // cancels, leaving a superconvergent quadratic remainder, so the halving
  // ratio is measured where the deficit integral is genuinely nonzero.
  const MonotonicityReport generic_coarse =
      verify_monotonicity(coarse, Vec2::Zero(), 3.0);
  const MonotonicityReport generic_fine = verify_monotonicity(fine, Vec2::Zero(), 3.0);
  c.check(generic_fine.discrepancy > 0.0, "fine-step discrepancy nonzero at (0, 3)");
  const double ratio = generic_coarse.discrepancy / generic_fine.discrepancy;
  c.check(ratio > kRatioLo && ratio < kRatioHi,
          "discrepancy halves under dt halving at (0, 3)");

  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - clock_start)
          .count();
  c.check(seconds < kBudgetSeconds, "runtime under 10 s");
}

void criterion_shrinker_criticality(Checks& c) {
  constexpr double kDeficitTol = 1e-6;
  constexpr double kValueTol = 1e-4;

  const auto preset = soliton_preset("shrinker-circle");
  c.check(preset.has_value(), "shrinker-circle preset exists");
  if (!preset) return;
  const Curve profile = generate_preset(*preset);

  std::vector<double> times;
  for (int k = 0; k < 10; ++k) times.push_back(0.1 * k);
  const FlowHistory hist = selfsimilar_history(preset->spec, profile, times);
  for (std::size_t m = 0; m < hist.size(); ++m) {
    c.check(deficit(hist.slices[m], hist.times[m], Vec2::Zero(), 1.0) < kDeficitTol,
            "deficit below 1e-6 along the analytic flow");
    const double value =
        huisken_functional(hist.slices[m], hist.times[m], Vec2::Zero(), 1.0).value;
    c.check(std::abs(value - kShrinkerValue) < kValueTol,
            "functional equals sqrt(2 pi / e) along the analytic flow");
  }
}

void criterion_soliton_residuals(Checks& c) {
  constexpr double kResidualTol = 1e-6;
  constexpr double kRadiusTol = 1e-5;
  constexpr double kOrderLo = 14.0;
  constexpr double kOrderHi = 18.0;

  for (const char* name :
       {"grim-reaper", "shrinker-circle", "yin-yang", "shrink-rotator", "expand-rotator"}) {
    const auto preset = soliton_preset(name);
    c.check(preset.has_value(), std::string(name) + " preset exists");
    if (!preset) continue;
    const Curve curve = generate_preset(*preset);
    c.check(residual(curve, preset->spec) < kResidualTol,
            std::string(name) + " residual below 1e-6");
    if (preset->name == "shrinker-circle") {
      double worst = 0.0;
      for (Eigen::Index i = 0; i < curve.size(); ++i)
        worst = std::max(worst, std::abs(curve.points.col(i).norm() - std::sqrt(2.0)));
      c.check(worst < kRadiusTol, "shrinker circle radius sqrt(2) within 1e-5");
    }
  }

  const Vec2 exact = reaper_point(2.0);
  const Curve coarse = generate(translator_spec(), ProfileStart{}, 2.0, 0.02);
  const Curve fine = generate(translator_spec(), ProfileStart{}, 2.0, 0.01);
  const double e_coarse = (coarse.points.rightCols<1>() - exact).norm();
  const double e_fine = (fine.points.rightCols<1>() - exact).norm();
  c.check(e_fine > 0.0, "fine-step profile error nonzero");
  const double ratio = e_coarse / e_fine;
  c.check(ratio > kOrderLo && ratio < kOrderHi, "ds refinement ratio in [14, 18]");
}

void criterion_breather_detection(Checks& c) {
  constexpr double kExactTol = 1e-9;
  constexpr double kAlphaTol = 1e-3;

  const Curve slice1 = make_bumpy(256);
  const Similarity truth = make_similarity(0.8, 0.7, Vec2(0.3, -0.2), 37);
  const Curve slice2 = apply_similarity(slice1, truth);
  const Similarity found = detect(slice1, slice2);
  c.check(std::abs(found.alpha - truth.alpha) < kExactTol, "alpha recovered to 1e-9");
  c.check((found.rotation - truth.rotation).norm() < kExactTol,
          "rotation recovered to 1e-9");
  c.check((found.translation - truth.translation).norm() < kExactTol,
          "translation recovered to 1e-9");
  c.check(found.shift == truth.shift, "index shift recovered");
  c.check(!found.reversed, "orientation preserved");

  const FlowHistory period = evolved_circle_period();
  const Similarity s = detect(period.slices.front(), period.slices.back());
  c.check(std::abs(s.alpha - std::sqrt(0.5)) < kAlphaTol,
          "evolved circle alpha sqrt(1/2) within 1e-3");
}

void criterion_splice(Checks& c) {
  constexpr double kSeriesRel = 1e-12;
  constexpr double kJunctionTol = 1e-10;
  constexpr double kVelocityLo = 1.7;
  constexpr double kVelocityHi = 2.3;
  constexpr double kRadiusRel = 1e-3;

  // Junction times against the geometric series, forty periods each way.
  {
    const Curve front = make_bumpy(12);
    FlowHistory period;
    period.times = {0.0, 1.0};
    period.slices.push_back(front);
    const Similarity shrink = make_similarity(std::sqrt(0.5), 0.3, Vec2(0.05, -0.02), 5);
    period.slices.push_back(apply_similarity(front, shrink));
    const SpliceResult backward = splice_shrinking(period, shrink, 40);
    c.check(backward.junction_times.size() == 40, "forty shrinking junctions");
    const double r_shrink = 1.0 / (shrink.alpha * shrink.alpha);
    for (std::size_t k = 0; k < backward.junction_times.size(); ++k) {
      const double ref =
          (std::pow(r_shrink, static_cast<double>(k) + 1.0) - 1.0) / (r_shrink - 1.0);
      c.check(std::abs(backward.junction_times[k] - ref) <= kSeriesRel * std::max(1.0, ref),
              "shrinking series matches to 1e-12");
    }

    FlowHistory period_x;
    period_x.times = {0.0, 1.0};
    period_x.slices.push_back(front);
    const Similarity expand = make_similarity(1.25, -0.2, Vec2(0.02, 0.04), 3);
    period_x.slices.push_back(apply_similarity(front, expand));
    const SpliceResult forward = splice_expanding(period_x, expand, 40);
    c.check(forward.junction_times.size() == 40, "forty expanding junctions");
    const double r_expand = expand.alpha * expand.alpha;
    for (std::size_t k = 0; k < forward.junction_times.size(); ++k) {
      const double ref =
          (std::pow(r_expand, static_cast<double>(k) + 1.0) - 1.0) / (r_expand - 1.0);
      c.check(std::abs(forward.junction_times[k] - ref) <= kSeriesRel * std::max(1.0, ref),
              "expanding series matches to 1e-12");
    }
  }

  // Junction position identities on exact synthetic periods, all modes.
  {
    const Curve front = make_bumpy(16);
    auto exact_period = [&](const Similarity& s) {
      FlowHistory period;
      period.times = {0.0, 0.4, 1.0};
      period.slices.push_back(front);
      period.slices.push_back(
          apply_similarity(front, make_similarity(0.85, 0.1, Vec2(0.01, 0.02), 0)));
      period.slices.push_back(apply_similarity(front, s));
      return period;
    };
    const Similarity shrink = make_similarity(std::sqrt(0.5), 0.2, Vec2(0.1, 0.0), 2);
    for (double e : splice_shrinking(exact_period(shrink), shrink, 8).junction_position_errors)
      c.check(e <= kJunctionTol, "shrinking junction identities below 1e-10");
    const Similarity expand = make_similarity(1.25, -0.2, Vec2(0.02, 0.04), 3);
    for (double e : splice_expanding(exact_period(expand), expand, 8).junction_position_errors)
      c.check(e <= kJunctionTol, "expanding junction identities below 1e-10");
    const Similarity steady = make_similarity(1.0, 0.4, Vec2(0.3, 0.1), 3);
    for (double e :
         splice_steady(exact_period(steady), steady, 8, true).junction_position_errors)
      c.check(e <= kJunctionTol, "steady junction identities below 1e-10");
  }

  // Junction velocity mismatch shrinks at first order in the slice spacing.
  {
    const FlowHistory coarse_period = circle_period(11, 64);
    const FlowHistory fine_period = circle_period(21, 64);
    const SpliceResult coarse = splice_shrinking(
        coarse_period, detect(coarse_period.slices.front(), coarse_period.slices.back()), 2);
    const SpliceResult fine = splice_shrinking(
        fine_period, detect(fine_period.slices.front(), fine_period.slices.back()), 2);
    const auto rc = junction_smoothness(coarse, 1);
    const auto rf = junction_smoothness(fine, 1);
    c.check(!rc.empty() && !rf.empty(), "junction reports nonempty");
    if (!rc.empty() && !rf.empty()) {
      c.check(rf[0].discrepancy > 0.0, "fine velocity discrepancy nonzero");
      const double ratio = rc[0].discrepancy / rf[0].discrepancy;
      c.check(ratio > kVelocityLo && ratio < kVelocityHi,
              "velocity mismatch first order in dt");
    }
  }

  // The spliced evolved circle is the ancient solution R = sqrt(2 (tau + 1)).
  {
    const FlowHistory period = evolved_circle_period();
    const Similarity s = detect(period.slices.front(), period.slices.back());
    const SpliceResult splice = splice_shrinking(period, s, 8);
    for (std::size_t m = 0; m < splice.history.size(); ++m) {
      const double ref = std::sqrt(2.0 * (splice.history.times[m] + 1.0));
      c.check(std::abs(mean_radius(splice.history.slices[m]) - ref) < kRadiusRel * ref,
              "ancient circle radius law within 1e-3");
    }
  }
}

void criterion_entropy_boundedness(Checks& c) {
  constexpr double kEnvelope = 1.05;

  const FlowHistory period = evolved_circle_period();
  const Similarity s = detect(period.slices.front(), period.slices.back());
  const SpliceResult splice = splice_shrinking(period, s, 8);
  c.check(splice.junction_times.size() >= 2, "at least two junctions");
  if (splice.junction_times.size() < 2) return;

  // Functional at backward time tau, kernel scale tau: the natural reading
  // of the ancient solution toward its extinction point. tau = 0 carries no
  // kernel scale and is skipped. The envelope is anchored at the first
  // spliced period, the copy on [tau_0, tau_1].
  const double first_period_end = splice.junction_times[1] + 1e-9;
  double first_max = 0.0;
  double global_max = 0.0;
  for (std::size_t m = 0; m < splice.history.size(); ++m) {
    const double tau = splice.history.times[m];
    if (!(tau > 0.0)) continue;
    const double value =
        huisken_functional(splice.history.slices[m], -tau, Vec2::Zero(), 0.0).value;
    global_max = std::max(global_max, value);
    if (tau <= first_period_end) first_max = std::max(first_max, value);
  }
  c.check(first_max > 0.0, "first-period functional sampled");
  c.check(global_max <= kEnvelope * first_max,
          "functional within 1.05x the first-period max");

  // Parabolic rescalings of later periods approach the self-shrinker, so
  // their deficit at the unit kernel scale decreases in j.
  double previous = std::numeric_limits<double>::infinity();
  for (int j = 2; j <= 6; ++j) {
    const RescaleResult rescaled = rescale_sequence(splice, j);
    const double d = deficit(rescaled.history.slices[0], -1.0, Vec2::Zero(), 0.0);
    c.check(d < previous, "rescaled deficit decreases at j = " + std::to_string(j));
    previous = d;
  }
}

void criterion_gamma_condition(Checks& c, const std::string& cli) {
  constexpr double kLineTol = 1e-4;
  const double line_value = std::sqrt(10.0 * std::numbers::pi);

  c.check(!cli.empty(), "cli path provided");
  if (!cli.empty()) {
    const RunResult r = run_cli(
        cli, {"gamma-check", "--alpha", "0.7071067811865476", "--t1", "0", "--t2", "1"});
    c.check(r.code == 0, "threshold invocation exits 0");
    c.check(r.out == "threshold 0.12500\n", "threshold output exact");
  }

  const GammaReport line = gamma_integral(make_line(40.0, 0.02), 0.1, {10.0, 20.0, 40.0});
  c.check(!line.window_values.empty() &&
              std::abs(line.window_values.back() - line_value) < kLineTol,
          "line integral sqrt(10 pi) within 1e-4");

  const auto shrink_preset = soliton_preset("shrink-rotator");
  const auto expand_preset = soliton_preset("expand-rotator");
  c.check(shrink_preset.has_value() && expand_preset.has_value(), "spiral presets exist");
  if (shrink_preset) {
    const Curve spiral = generate_preset(*shrink_preset);
    const GammaReport g = gamma_integral(spiral, 0.1, doubling_windows(spiral));
    c.check(g.verdict == GammaVerdict::divergent, "rotate-and-shrink spiral divergent");
  }
  if (expand_preset) {
    const Curve spiral = generate_preset(*expand_preset);
    const GammaReport g = gamma_integral(spiral, 0.1, doubling_windows(spiral));
    c.check(g.verdict == GammaVerdict::convergent, "rotate-and-expand spiral convergent");
  }

  const Curve reaper = generate(translator_spec(), ProfileStart{}, 32.0, 2e-3, true);
  const GammaReport g = gamma_integral(reaper, 0.1, {4.0, 8.0, 16.0, 32.0});
  c.check(g.verdict == GammaVerdict::convergent, "grim reaper convergent");
}

void criterion_harnack(Checks& c) {
  constexpr double kEqualityTol = 5e-3;
  constexpr double kCubeTol = 1e-3;
  constexpr double kConstancyTol = 1e-3;

  // Translator equality on the evolved grim reaper, best tangential field.
  {
    const Curve reaper = generate(translator_spec(), ProfileStart{}, 4.0, 2e-3, true);
    SolverOptions opts;
    opts.scheme = Scheme::semi_implicit;
    opts.dt = 1e-3;
    opts.record_dt = 0.01;
    const FlowHistory hist = evolve(reaper, 0.0, 0.06, opts);
    const auto samples = steady_harnack(hist, 3, VMode::optimal);
    double worst = 0.0;
    std::size_t valid_count = 0;
    for (const HarnackSample& s : samples) {
      if (!s.valid) continue;
      ++valid_count;
      worst = std::max(worst, std::abs(s.quantity));
    }
    c.check(valid_count > 2000, "free-end collar leaves the bulk in play");
    c.check(worst < kEqualityTol, "translator equality below 5e-3 with optimal V");
  }

  // Shrinking circle: the steady quantity reduces to kappa cubed.
  {
    SolitonSpec spec;
    spec.kind = SolitonKind::shrinker;
    spec.lambda = -0.25;
    std::vector<double> times;
    for (int m = 0; m <= 5; ++m) times.push_back(0.1 * m);
    const FlowHistory hist = selfsimilar_history(spec, make_circle(2.0, 64), times);
    const double cube = std::pow(4.0 - 2.0 * 0.2, -1.5);
    for (const HarnackSample& s : steady_harnack(hist, 2, VMode::zero)) {
      c.check(s.valid, "circle samples valid");
      c.check(std::abs(s.quantity - cube) < kCubeTol, "circle quantity kappa^3 within 1e-3");
    }
  }

  // Analytic expander: sqrt(t) kappa is constant per material index.
  const Curve profile = generate(
      expander_spec(), ProfileStart{Vec2(1.0, 0.0), -std::numbers::pi / 2.0}, 2.0, 2e-3, true);
  {
    std::vector<double> times;
    for (int m = 0; m <= 5; ++m) times.push_back(0.05 * m);
    const FlowHistory hist = selfsimilar_history(expander_spec(), profile, times, 1.0);
    std::vector<CurvatureField> fields(hist.size());
    for (std::size_t m = 0; m < hist.size(); ++m)
      fields[m] = signed_curvature(hist.slices[m]);
    const Eigen::Index n = hist.slices.front().size();
    double worst = 0.0;
    for (Eigen::Index i = 2; i < n - 2; ++i) {
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (std::size_t m = 0; m < hist.size(); ++m) {
        const double g = std::sqrt(hist.times[m]) * fields[m].kappa(i);
        lo = std::min(lo, g);
        hi = std::max(hi, g);
      }
      worst = std::max(worst, hi - lo);
    }
    c.check(worst < kConstancyTol, "sqrt(t) kappa constant within 1e-3 per index");
  }

  // Spliced expanding breather: sqrt(t) kappa non-decreasing at every index.
  {
    std::vector<double> times;
    for (int m = 0; m <= 4; ++m) times.push_back(0.25 * m);
    const FlowHistory period = selfsimilar_history(expander_spec(), profile, times);
    const Similarity s = detect(period.slices.front(), period.slices.back());
    const SpliceResult splice = splice_expanding(period, s, 3);
    FlowHistory positive;
    for (std::size_t m = 0; m < splice.history.size(); ++m) {
      if (!(splice.history.times[m] > 0.0)) continue;
      positive.times.push_back(splice.history.times[m]);
      positive.slices.push_back(splice.history.slices[m]);
    }
    const Eigen::Index n = positive.slices.front().size();
    for (Eigen::Index i = 2; i < n - 2; i += 200) {
      const SqrtTHReport report = sqrt_t_H_monotone(positive, i);
      c.check(report.valid, "spliced expander weakly convex");
      c.check(report.monotone, "sqrt(t) kappa monotone on the spliced expander");
    }
  }
}

void criterion_rotator_minimality(Checks& c) {
  constexpr double kResidualGate = 1e-2;

  const auto yy = soliton_preset("yin-yang");
  c.check(yy.has_value(), "yin-yang preset exists");
  if (yy) {
    const Curve spiral = generate_preset(*yy);
    const RotatorMinimalityReport report = rotator_minimality_check(spiral, yy->spec.omega);
    c.check(report.pass, "yin-yang passes minimality");
    c.check(report.argmin_index == (spiral.size() - 1) / 2, "yin-yang argmin at the origin sample");
    c.check(report.min_radius < 1e-12, "yin-yang min radius zero");
  }

  SolitonSpec rotator;
  rotator.kind = SolitonKind::rotator;
  rotator.omega = -1.0;
  const Curve offset = generate(
      rotator, ProfileStart{Vec2(2.0, 0.0), std::numbers::pi / 2.0}, 4.0, 1e-3, true);
  c.check(rotator_minimality_check(offset, -1.0).pass, "offset rotator passes");

  SolitonSpec mirror;
  mirror.kind = SolitonKind::rotator;
  mirror.omega = 1.0;
  const Curve mirrored = generate(mirror, ProfileStart{}, 15.0, 1e-3, true);
  c.check(rotator_minimality_check(mirrored, 1.0).pass, "mirrored rotator passes");

  SolitonSpec fast;
  fast.kind = SolitonKind::rotator;
  fast.omega = -2.0;
  const Curve tight = generate(
      fast, ProfileStart{Vec2(1.0, 0.0), std::numbers::pi / 2.0}, 3.0, 1e-3, true);
  c.check(rotator_minimality_check(tight, -2.0).pass, "fast rotator passes");

  const Curve reaper = generate(translator_spec(), ProfileStart{}, 2.0, 2e-3, true);
  const RotatorMinimalityReport not_rotating = rotator_minimality_check(reaper, 1.0);
  c.check(!not_rotating.pass && not_rotating.residual > kResidualGate,
          "grim reaper fails the residual gate");

  const RotatorMinimalityReport circle = rotator_minimality_check(make_circle(2.0, 128), 1.0);
  c.check(!circle.pass && circle.residual > kResidualGate,
          "circle fails the residual gate");
}

void criterion_determinism(Checks& c, const std::string& cli) {
  c.check(!cli.empty(), "cli path provided");
  if (cli.empty()) return;

  namespace fs = std::filesystem;
  const fs::path root =
      fs::temp_directory_path() / ("csf_acceptance_" + std::to_string(::getpid()));
  struct Cleanup {
    fs::path path;
    ~Cleanup() {
      std::error_code ec;
      fs::remove_all(path, ec);
    }
  } cleanup{root};

  const fs::path inputs = root / "inputs";
  fs::create_directories(inputs);
  io::write_curve(make_circle(2.0, 256), (inputs / "circle_big.json").string());
  io::write_curve(make_circle(std::sqrt(2.0), 256), (inputs / "circle_small.json").string());

  // One invocation of every subcommand, chained through shared files. Paths
  // stay relative so the two runs produce byte-identical artifacts.
  const std::vector<std::vector<std::string>> pipeline = {
      {"soliton", "--kind", "grim-reaper", "--smax", "6", "--ds", "0.002",
       "--output", "reaper.json"},
      {"soliton", "--kind", "yin-yang", "--smax", "6", "--ds", "0.002",
       "--output", "yinyang.json"},
      {"evolve", "--input", "../inputs/circle_big.json", "--t0", "0", "--t1", "1",
       "--scheme", "explicit", "--record", "0.05", "--output", "hist.jsonl"},
      {"evolve", "--input", "../inputs/circle_big.json", "--t0", "0.5", "--t1", "1",
       "--scheme", "semi-implicit", "--dt", "0.001", "--redistribute", "50",
       "--record", "0.05", "--output", "hist2.jsonl"},
      {"entropy", "--history", "hist.jsonl", "--center", "0,0", "--t0", "2",
       "--report", "entropy.json"},
      {"entropy-verify", "--history", "hist.jsonl", "--center", "0,0", "--t0", "2",
       "--report", "verify.json"},
      {"sup-entropy", "--input", "../inputs/circle_big.json", "--t", "0", "--t0", "2",
       "--report", "sup.json"},
      {"gamma-check", "--alpha", "0.7071067811865476", "--t1", "0", "--t2", "1",
       "--report", "threshold.json"},
      {"gamma-check", "--input", "reaper.json", "--gamma", "0.1", "--windows",
       "1.5,3,6", "--report", "gamma.json"},
      {"breather-detect", "--slice1", "../inputs/circle_big.json", "--slice2",
       "../inputs/circle_small.json", "--report", "sim.json"},
      {"splice", "--history", "hist.jsonl", "--similarity", "sim.json", "--mode",
       "shrinking", "--copies", "4", "--output", "splice.jsonl", "--sidecar",
       "splice.json"},
      {"junction-check", "--splice", "splice.json", "--order", "1", "--report",
       "junction.json"},
      {"rescale", "--splice", "splice.json", "--j", "1", "--output", "rescale.jsonl"},
      {"harnack", "--history", "hist.jsonl", "--quantity", "steady", "--v-mode",
       "optimal", "--report", "harnack.json"},
      {"harnack", "--history", "hist2.jsonl", "--quantity", "sqrtTH", "--report",
       "sqrt.csv"},
      {"rotator-check", "--input", "yinyang.json", "--omega", "-1", "--report",
       "rotator.json"},
      {"orbit", "--history", "hist.jsonl", "--similarity", "sim.json", "--p0", "7",
       "--direction", "forward", "--j", "10", "--report", "orbit.json"},
  };
  const std::vector<std::string> artifacts = {
      "reaper.json",  "yinyang.json", "hist.jsonl",    "hist2.jsonl",  "entropy.json",
      "verify.json",  "sup.json",     "threshold.json", "gamma.json",  "sim.json",
      "splice.jsonl", "splice.json",  "junction.json", "rescale.jsonl", "harnack.json",
      "sqrt.csv",     "rotator.json", "orbit.json"};

  auto run_all = [&](const char* dirname, std::string* out_cat, std::string* err_cat) {
    const fs::path dir = root / dirname;
    fs::create_directories(dir);
    bool ok = true;
    for (const auto& args : pipeline) {
      const RunResult r = run_cli(cli, args, dir);
      if (r.code != 0) {
        ok = false;
        c.check(false, args.front() + " exits 0");
      }
      *out_cat += r.out;
      *err_cat += r.err;
    }
    return ok;
  };

  std::string out_a, err_a, out_b, err_b;
  const bool ok_a = run_all("a", &out_a, &err_a);
  const bool ok_b = run_all("b", &out_b, &err_b);
  if (!ok_a || !ok_b) return;

  c.check(out_a == out_b, "stdout byte-identical across reruns");
  c.check(err_a == err_b, "stderr byte-identical across reruns");
  for (const std::string& name : artifacts) {
    const std::string first = slurp(root / "a" / name);
    const std::string second = slurp(root / "b" / name);
    c.check(!first.empty(), name + " nonempty");
    c.check(first == second, name + " byte-identical across reruns");
  }
}

}  // namespace

int main(int argc, char** argv) {
  std::string cli;
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--cli") cli = argv[i + 1];
  // The pipeline check changes directory per run, so the path must survive.
  if (!cli.empty()) cli = std::filesystem::absolute(cli).string();

  int failed = 0;
  failed += run_criterion(1, "Huisken monotonicity identity on the shrinking circle",
                          criterion_monotonicity);
  failed += run_criterion(2, "shrinker criticality of the self-similar circle",
                          criterion_shrinker_criticality);
  failed += run_criterion(3, "soliton generator residuals and refinement order",
                          criterion_soliton_residuals);
  failed += run_criterion(4, "breather similarity detection", criterion_breather_detection);
  failed += run_criterion(5, "breather splice construction", criterion_splice);
  failed += run_criterion(6, "entropy boundedness along splices",
                          criterion_entropy_boundedness);
  failed += run_criterion(7, "Gaussian-weight gamma condition",
                          [&](Checks& c) { criterion_gamma_condition(c, cli); });
  failed += run_criterion(8, "differential Harnack checks", criterion_harnack);
  failed += run_criterion(9, "rotator minimality at closest approach",
                          criterion_rotator_minimality);
  failed += run_criterion(10, "CLI pipeline determinism",
                          [&](Checks& c) { criterion_determinism(c, cli); });
  return failed;
}
