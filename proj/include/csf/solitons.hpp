#pragma once

#include <optional>
#include <string>
#include <vector>

#include "csf/geometry.hpp"

namespace csf {

enum class SolitonKind { shrinker, expander, translator, rotator, mixed, custom };

// Defining vector field of a self-similar solution: the profile satisfies
// kappa = <lambda x + omega J x + e, n> with J = [[0,-1],[1,0]].
// Sign dictionary under the n = +90(T) convention: canonical shrinker
// lambda = -1/2, expander lambda = +1/2, translator |e| = 1, the reference
// rotator omega = -1.
struct SolitonSpec {
  SolitonKind kind = SolitonKind::custom;
  double lambda = 0.0;
  double omega = 0.0;
  Vec2 e = Vec2::Zero();
};

// Enforces kind consistency (shrinker: lambda < 0, omega = 0, e = 0; ...).
void validate(const SolitonSpec& spec);

struct ProfileStart {
  Vec2 x = Vec2::Zero();
  double theta = 0.0;
};

// Integrate the profile ODE x' = (cos theta, sin theta), theta' = kappa by
// classical RK4 at arclength step ds, for arclength s_max. With symmetric set,
// also integrates the backward continuation so the start point is interior.
// Truncates early with Curve::truncated if |kappa| blows up past 1e6.
Curve generate(const SolitonSpec& spec, const ProfileStart& start, double s_max, double ds,
               bool symmetric = false);

// Max over interior points of |kappa_i - <lambda x_i + omega J x_i + e, n_i>|.
double residual(const Curve& curve, const SolitonSpec& spec);

struct CounterexampleReport {
  bool weakly_convex;
  bool weakly_mean_convex;
  double gamma;
  bool gamma_ok;
  bool bounded_orbit;
};

// Checks the hypotheses a non-soliton breather candidate would need: sign of
// kappa, Gaussian-weighted length at the given gamma, and |x| boundedness
// over the sampled window.
CounterexampleReport classify_counterexample(const SolitonSpec& spec, const Curve& curve,
                                             double gamma);

struct SolitonPreset {
  std::string name;
  SolitonSpec spec;
  ProfileStart start;
  double s_max;
  double ds;
  bool symmetric;
  // The generated profile closes onto itself; drop the duplicate endpoint and
  // mark the curve closed.
  bool close_profile;
};

const std::vector<SolitonPreset>& soliton_presets();
std::optional<SolitonPreset> soliton_preset(const std::string& name);

// Generate a preset's curve, applying its closure post-processing.
Curve generate_preset(const SolitonPreset& preset);

}  // namespace csf
