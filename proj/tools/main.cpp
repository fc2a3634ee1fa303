#include "CLI11.hpp"
#include "json.hpp"

#include "csf/breather.hpp"
#include "csf/entropy.hpp"
#include "csf/flow.hpp"
#include "csf/harnack.hpp"
#include "csf/io.hpp"
#include "csf/solitons.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace {

using nlohmann::json;

csf::Vec2 parse_vec2(const std::string& text, const char* what) {
  double x = 0.0, y = 0.0;
  char tail = 0;
  if (std::sscanf(text.c_str(), "%lf,%lf%c", &x, &y, &tail) != 2)
    throw csf::Error("cli", std::string(what) + " must be \"x,y\"");
  return csf::Vec2(x, y);
}

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> values;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    try {
      std::size_t used = 0;
      const std::string item = text.substr(pos, comma - pos);
      values.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw csf::Error("cli", std::string(what) + " must be a comma-separated number list");
    }
    pos = comma + 1;
  }
  return values;
}

void write_report(const std::string& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw csf::Error("io", "cannot open " + path + " for writing");
  out << j.dump(2) << "\n";
  if (!out) throw csf::Error("io", "write to " + path + " failed");
}

std::string format_double(double v) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

constexpr const char* kEntropyFormula =
    "integral of (4 pi (t0-t))^(-1/2) exp(-|x-x0|^2 / (4 (t0-t))) d length";
constexpr const char* kDeficitFormula =
    "integral of |kappa n + (x-x0)_normal / (2 (t0-t))|^2 Phi d length";
constexpr const char* kGammaFormula = "integral of exp(-gamma |x|^2) d length";
constexpr const char* kThresholdFormula = "(1 - alpha^2) / (4 (t2 - t1))";
constexpr const char* kSteadyFormula = "dH/dt + 2 V gradH + kappa V^2";
constexpr const char* kExpandingFormula = "dH/dt + 2 V gradH + kappa V^2 + H / (2 t)";
constexpr const char* kSqrtFormula = "d/dt of sqrt(t) kappa(i, t)";
constexpr const char* kRotatorFormula = "kappa = <omega J x, n>";

struct EvolveArgs {
  std::string input, output;
  double t0 = 0.0, t1 = 0.0;
  long n = 0;
  double dt = 0.0;
  std::string scheme = "explicit";
  int redistribute = 0;
  double record = -1.0;
  bool record_given = false;
};

void run_evolve(const EvolveArgs& args) {
  csf::Curve curve = csf::io::read_curve(args.input);
  if (args.n > 0) curve = csf::resample_by_arclength(curve, args.n);
  csf::SolverOptions options;
  if (args.scheme == "explicit")
    options.scheme = csf::Scheme::explicit_euler;
  else if (args.scheme == "semi-implicit")
    options.scheme = csf::Scheme::semi_implicit;
  else
    throw csf::Error("cli", "scheme must be explicit or semi-implicit");
  options.dt = args.dt;
  options.redistribute_every = args.redistribute;
  options.record_dt = args.record_given ? args.record : (args.t1 - args.t0) / 1024.0;
  const csf::FlowHistory history = csf::evolve(curve, args.t0, args.t1, options);
  csf::io::write_history(history, args.output);
}

struct EntropyArgs {
  std::string history, center, report;
  double t0 = 0.0;
};

void run_entropy(const EntropyArgs& args) {
  const csf::FlowHistory history = csf::io::read_history(args.history);
  const csf::Vec2 x0 = parse_vec2(args.center, "--center");
  json slices = json::array();
  for (std::size_t m = 0; m < history.size(); ++m) {
    const csf::EntropyReport r =
        csf::huisken_functional(history.slices[m], history.times[m], x0, args.t0);
    slices.push_back({{"t", r.t}, {"value", r.value}, {"tail_estimate", r.tail_estimate}});
  }
  json report;
  report["x0"] = {x0.x(), x0.y()};
  report["t0"] = args.t0;
  report["formula"] = kEntropyFormula;
  report["slices"] = slices;
  write_report(args.report, report);
}

void run_entropy_verify(const EntropyArgs& args) {
  const csf::FlowHistory history = csf::io::read_history(args.history);
  const csf::Vec2 x0 = parse_vec2(args.center, "--center");
  const csf::MonotonicityReport r = csf::verify_monotonicity(history, x0, args.t0);

  double max_increase = 0.0;
  double previous = 0.0;
  for (std::size_t m = 0; m < history.size(); ++m) {
    const double value =
        csf::huisken_functional(history.slices[m], history.times[m], x0, args.t0).value;
    if (m > 0) max_increase = std::max(max_increase, value - previous);
    previous = value;
  }

  json report;
  report["x0"] = {x0.x(), x0.y()};
  report["t0"] = args.t0;
  report["lhs_drop"] = r.lhs_drop;
  report["integrated_deficit"] = r.integrated_deficit;
  report["discrepancy"] = r.discrepancy;
  report["max_increase"] = max_increase;
  report["non_increasing"] = max_increase <= 1e-9;
  report["formula"] = kDeficitFormula;
  write_report(args.report, report);
}

struct SupEntropyArgs {
  std::string input, report;
  double t = 0.0, t0 = 0.0;
};

void run_sup_entropy(const SupEntropyArgs& args) {
  const csf::Curve curve = csf::io::read_curve(args.input);
  const csf::SupEntropyResult r = csf::sup_entropy(curve, args.t, args.t0);
  json report;
  report["value"] = r.value;
  report["x0"] = {r.x0.x(), r.x0.y()};
  report["t"] = args.t;
  report["t0"] = args.t0;
  report["formula"] = kEntropyFormula;
  write_report(args.report, report);
}

struct GammaArgs {
  std::string input, windows, report;
  double gamma = 0.0;
  bool gamma_given = false;
  std::optional<double> alpha, t1, t2;
};

void run_gamma_check(const GammaArgs& args) {
  std::optional<double> threshold;
  if (args.alpha || args.t1 || args.t2) {
    if (!(args.alpha && args.t1 && args.t2))
      throw csf::Error("cli", "--alpha, --t1, --t2 must be given together");
    threshold = csf::breather_gamma_threshold(*args.alpha, *args.t1, *args.t2);
  }

  if (args.input.empty()) {
    if (!threshold)
      throw csf::Error("cli", "need either --input or the --alpha/--t1/--t2 triple");
    std::printf("threshold %.5f\n", *threshold);
    if (!args.report.empty()) {
      json report;
      report["threshold"] = *threshold;
      report["alpha"] = *args.alpha;
      report["t1"] = *args.t1;
      report["t2"] = *args.t2;
      report["formula"] = kThresholdFormula;
      write_report(args.report, report);
    }
    return;
  }

  if (!args.gamma_given) throw csf::Error("cli", "--gamma is required with --input");
  if (args.windows.empty()) throw csf::Error("cli", "--windows is required with --input");
  const csf::Curve curve = csf::io::read_curve(args.input);
  const std::vector<double> windows = parse_list(args.windows, "--windows");
  csf::GammaReport r = csf::gamma_integral(curve, args.gamma, windows);
  r.threshold = threshold;

  const char* verdict = r.verdict == csf::GammaVerdict::convergent     ? "convergent"
                        : r.verdict == csf::GammaVerdict::divergent    ? "divergent"
                                                                       : "inconclusive";
  std::printf("verdict %s\n", verdict);
  if (threshold) std::printf("threshold %.5f\n", *threshold);

  if (!args.report.empty()) {
    json report;
    report["gamma"] = r.gamma;
    report["windows"] = windows;
    report["window_values"] = r.window_values;
    report["verdict"] = verdict;
    if (threshold) report["threshold"] = *threshold;
    report["formula"] = kGammaFormula;
    write_report(args.report, report);
  }
}

struct SolitonArgs {
  std::string kind, output, e = "0,0", start;
  double lambda = 0.0, omega = 0.0;
  bool lambda_given = false, omega_given = false, e_given = false, start_given = false;
  double smax = 0.0, ds = 0.0;
  bool symmetric = false, symmetric_given = false;
};

void run_soliton(const SolitonArgs& args) {
  csf::SolitonPreset preset;
  if (const auto found = csf::soliton_preset(args.kind)) {
    preset = *found;
  } else {
    csf::SolitonSpec spec;
    if (args.kind == "shrinker") {
      spec.kind = csf::SolitonKind::shrinker;
      spec.lambda = -0.5;
    } else if (args.kind == "expander") {
      spec.kind = csf::SolitonKind::expander;
      spec.lambda = 0.5;
    } else if (args.kind == "translator") {
      spec.kind = csf::SolitonKind::translator;
      spec.e = csf::Vec2(0.0, 1.0);
    } else if (args.kind == "rotator") {
      spec.kind = csf::SolitonKind::rotator;
      spec.omega = -1.0;
    } else if (args.kind == "mixed") {
      spec.kind = csf::SolitonKind::mixed;
      spec.lambda = -0.5;
      spec.omega = 2.0;
    } else if (args.kind == "custom") {
      spec.kind = csf::SolitonKind::custom;
    } else {
      throw csf::Error("cli", "unknown soliton kind \"" + args.kind + "\"");
    }
    preset.name = args.kind;
    preset.spec = spec;
    preset.start = csf::ProfileStart{};
    preset.s_max = 10.0;
    preset.ds = 1e-3;
    preset.symmetric = false;
    preset.close_profile = false;
  }

  if (args.lambda_given) preset.spec.lambda = args.lambda;
  if (args.omega_given) preset.spec.omega = args.omega;
  if (args.e_given) preset.spec.e = parse_vec2(args.e, "--e");
  if (args.smax > 0.0) preset.s_max = args.smax;
  if (args.ds > 0.0) preset.ds = args.ds;
  if (args.symmetric_given) preset.symmetric = args.symmetric;
  if (args.start_given) {
    const std::vector<double> s = parse_list(args.start, "--start");
    if (s.size() != 3) throw csf::Error("cli", "--start must be \"x,y,theta\"");
    preset.start = {csf::Vec2(s[0], s[1]), s[2]};
  }

  const csf::Curve curve = csf::generate_preset(preset);
  csf::io::write_curve(curve, args.output);
}

struct DetectArgs {
  std::string slice1, slice2, report;
  bool allow_reflection = false;
};

void run_detect(const DetectArgs& args) {
  const csf::Curve s1 = csf::io::read_curve(args.slice1);
  const csf::Curve s2 = csf::io::read_curve(args.slice2);
  const csf::Similarity s = csf::detect(s1, s2, args.allow_reflection);
  csf::io::write_similarity(s, args.report);
}

struct SpliceArgs {
  std::string history, similarity, mode, output, sidecar;
  int copies = 0;
};

void run_splice(const SpliceArgs& args) {
  const csf::FlowHistory period = csf::io::read_history(args.history);
  const csf::Similarity s = csf::io::read_similarity(args.similarity);
  const csf::SpliceMode mode = csf::io::parse_splice_mode(args.mode);
  csf::SpliceResult result;
  switch (mode) {
    case csf::SpliceMode::shrinking:
      result = csf::splice_shrinking(period, s, args.copies);
      break;
    case csf::SpliceMode::expanding:
      result = csf::splice_expanding(period, s, args.copies);
      break;
    case csf::SpliceMode::steady_backward:
      result = csf::splice_steady(period, s, args.copies, false);
      break;
    case csf::SpliceMode::steady_eternal:
      result = csf::splice_steady(period, s, args.copies, true);
      break;
  }
  csf::io::write_splice(result, args.output, args.sidecar);
}

struct JunctionArgs {
  std::string splice, report;
  int order = 1;
};

void run_junction_check(const JunctionArgs& args) {
  const csf::SpliceResult splice = csf::io::read_splice(args.splice);
  const std::vector<csf::JunctionReport> reports =
      csf::junction_smoothness(splice, args.order);
  json rows = json::array();
  double max_discrepancy = 0.0, max_gap = 0.0;
  for (const csf::JunctionReport& r : reports) {
    rows.push_back({{"time", r.time},
                    {"position_gap", r.position_gap},
                    {"discrepancy", r.discrepancy},
                    {"dt_scale", r.dt_scale}});
    max_discrepancy = std::max(max_discrepancy, r.discrepancy);
    max_gap = std::max(max_gap, r.position_gap);
  }
  json report;
  report["order"] = args.order;
  report["junctions"] = rows;
  report["max_discrepancy"] = max_discrepancy;
  report["max_position_gap"] = max_gap;
  write_report(args.report, report);
}

struct RescaleArgs {
  std::string splice, output;
  int j = 0;
};

void run_rescale(const RescaleArgs& args) {
  const csf::SpliceResult splice = csf::io::read_splice(args.splice);
  const csf::RescaleResult r = csf::rescale_sequence(splice, args.j);
  csf::io::write_history(r.history, args.output);
  json line;
  line["j"] = args.j;
  line["scale_ratio"] = r.scale_ratio;
  line["scale_ratio_limit"] = r.scale_ratio_limit;
  line["drift"] = {r.drift.x(), r.drift.y()};
  line["drift_bound"] = r.drift_bound;
  std::printf("%s\n", line.dump().c_str());
}

struct HarnackArgs {
  std::string history, quantity, report;
  std::string v_mode = "zero";
};

bool csv_report(const std::string& path) {
  return path.size() >= 4 && path.substr(path.size() - 4) == ".csv";
}

void run_harnack(const HarnackArgs& args) {
  const csf::FlowHistory history = csf::io::read_history(args.history);
  csf::VMode mode;
  if (args.v_mode == "zero")
    mode = csf::VMode::zero;
  else if (args.v_mode == "optimal")
    mode = csf::VMode::optimal;
  else
    throw csf::Error("cli", "v-mode must be zero or optimal");

  if (args.quantity == "sqrtTH") {
    // Batch evaluation across indices: the per-slice curvature fields and the
    // shared convexity flag are computed once.
    if (history.size() < 3) throw csf::Error("precondition", "need at least three slices");
    for (double t : history.times)
      if (!(t > 0.0)) throw csf::Error("time", "all slice times must be positive");
    const csf::Curve& first = history.slices.front();
    const Eigen::Index n = first.size();
    std::vector<csf::CurvatureField> fields(history.size());
    bool convex = true;
    double dt_min = std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < history.size(); ++m) {
      fields[m] = csf::signed_curvature(history.slices[m]);
      Eigen::Index begin = 0, end = n;
      if (!history.slices[m].closed()) {
        begin = 2;
        end = n - 2;
      }
      for (Eigen::Index p = begin; p < end; ++p)
        if (fields[m].kappa(p) < -1e-6) convex = false;
      if (m > 0) dt_min = std::min(dt_min, history.times[m] - history.times[m - 1]);
    }
    Eigen::Index begin = 0, end = n;
    if (!first.closed()) {
      begin = 2;
      end = n - 2;
    }
    json rows = json::array();
    std::string csv = "index,min_slope,monotone,valid\n";
    double global_min = std::numeric_limits<double>::infinity();
    bool all_monotone = true;
    for (Eigen::Index i = begin; i < end; ++i) {
      double g_max = 0.0;
      for (std::size_t m = 0; m < history.size(); ++m)
        g_max = std::max(g_max, std::abs(std::sqrt(history.times[m]) * fields[m].kappa(i)));
      double min_slope = std::numeric_limits<double>::infinity();
      for (std::size_t m = 0; m + 1 < history.size(); ++m) {
        const double g0 = std::sqrt(history.times[m]) * fields[m].kappa(i);
        const double g1 = std::sqrt(history.times[m + 1]) * fields[m + 1].kappa(i);
        min_slope = std::min(min_slope, (g1 - g0) / (history.times[m + 1] - history.times[m]));
      }
      const bool monotone = min_slope >= -1e-8 * (1.0 + g_max) / dt_min;
      global_min = std::min(global_min, min_slope);
      all_monotone = all_monotone && monotone;
      rows.push_back({{"index", i},
                      {"min_slope", min_slope},
                      {"monotone", monotone},
                      {"valid", convex}});
      csv += std::to_string(i) + "," + format_double(min_slope) + "," +
             (monotone ? "1" : "0") + "," + (convex ? "1" : "0") + "\n";
    }
    if (csv_report(args.report)) {
      std::ofstream out(args.report, std::ios::binary);
      if (!out) throw csf::Error("io", "cannot open " + args.report + " for writing");
      out << csv;
    } else {
      json report;
      report["quantity"] = "sqrtTH";
      report["min_slope"] = global_min;
      report["all_monotone"] = all_monotone;
      report["valid"] = convex;
      report["per_index"] = rows;
      report["formula"] = kSqrtFormula;
      write_report(args.report, report);
    }
    return;
  }

  const bool expanding = args.quantity == "expanding";
  if (!expanding && args.quantity != "steady")
    throw csf::Error("cli", "quantity must be steady, expanding, or sqrtTH");

  std::vector<csf::HarnackSample> all;
  std::size_t slices_used = 0;
  for (std::size_t m = 1; m + 1 < history.size(); ++m) {
    if (expanding && !(history.times[m] > 0.0)) continue;
    const std::vector<csf::HarnackSample> samples =
        expanding ? csf::expanding_harnack(history, m, mode)
                  : csf::steady_harnack(history, m, mode);
    all.insert(all.end(), samples.begin(), samples.end());
    ++slices_used;
  }
  if (slices_used == 0)
    throw csf::Error("precondition", "no interior slices available for the quantity");

  if (csv_report(args.report)) {
    std::string csv = "index,t,H,dHdt,gradH,V,quantity,valid\n";
    for (const csf::HarnackSample& s : all) {
      csv += std::to_string(s.index) + "," + format_double(s.t) + "," + format_double(s.H) +
             "," + format_double(s.dH_dt) + "," + format_double(s.gradH) + "," +
             format_double(s.V) + "," + format_double(s.quantity) + "," +
             (s.valid ? "1" : "0") + "\n";
    }
    std::ofstream out(args.report, std::ios::binary);
    if (!out) throw csf::Error("io", "cannot open " + args.report + " for writing");
    out << csv;
  } else {
    double max_abs = 0.0;
    double min_quantity = std::numeric_limits<double>::infinity();
    std::size_t invalid = 0;
    for (const csf::HarnackSample& s : all) {
      if (!s.valid) {
        ++invalid;
        continue;
      }
      max_abs = std::max(max_abs, std::abs(s.quantity));
      min_quantity = std::min(min_quantity, s.quantity);
    }
    json report;
    report["quantity"] = args.quantity;
    report["v_mode"] = args.v_mode;
    report["slices"] = slices_used;
    report["samples"] = all.size();
    report["invalid"] = invalid;
    report["max_abs_quantity"] = max_abs;
    report["min_quantity"] = min_quantity;
    report["formula"] = expanding ? kExpandingFormula : kSteadyFormula;
    write_report(args.report, report);
  }
}

struct RotatorArgs {
  std::string input, report;
  double omega = 0.0;
};

void run_rotator_check(const RotatorArgs& args) {
  const csf::Curve curve = csf::io::read_curve(args.input);
  const csf::RotatorMinimalityReport r = csf::rotator_minimality_check(curve, args.omega);
  json report;
  report["omega"] = args.omega;
  report["argmin_index"] = r.argmin_index;
  report["min_radius"] = r.min_radius;
  report["H_at_argmin"] = r.H_at_argmin;
  report["tangency_defect"] = r.tangency_defect;
  report["max_abs_kappa"] = r.max_abs_kappa;
  report["residual"] = r.residual;
  report["pass"] = r.pass;
  report["formula"] = kRotatorFormula;
  write_report(args.report, report);
}

struct OrbitArgs {
  std::string history, similarity, report;
  std::string direction = "forward";
  long p0 = 0;
  int j = 0;
};

void run_orbit(const OrbitArgs& args) {
  const csf::FlowHistory history = csf::io::read_history(args.history);
  const csf::Similarity s = csf::io::read_similarity(args.similarity);
  bool forward;
  if (args.direction == "forward")
    forward = true;
  else if (args.direction == "backward")
    forward = false;
  else
    throw csf::Error("cli", "direction must be forward or backward");
  const csf::OrbitReport r = csf::orbit_boundedness(history, s, args.p0, forward, args.j);
  json report;
  report["p0"] = args.p0;
  report["direction"] = args.direction;
  report["j"] = args.j;
  report["magnitudes"] = r.magnitudes;
  report["sup"] = r.sup;
  report["bounded"] = r.bounded;
  report["escaped"] = r.escaped;
  write_report(args.report, report);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"curve shortening flow laboratory"};
  app.require_subcommand(1);

  EvolveArgs evolve_args;
  CLI::App* evolve = app.add_subcommand("evolve", "run the flow on a curve");
  evolve->add_option("--input", evolve_args.input)->required();
  evolve->add_option("--t0", evolve_args.t0)->required();
  evolve->add_option("--t1", evolve_args.t1)->required();
  evolve->add_option("--n", evolve_args.n);
  evolve->add_option("--dt", evolve_args.dt);
  evolve->add_option("--scheme", evolve_args.scheme);
  evolve->add_option("--redistribute", evolve_args.redistribute);
  evolve->add_option("--record", evolve_args.record)
      ->each([&](const std::string&) { evolve_args.record_given = true; });
  evolve->add_option("--output", evolve_args.output)->required();

  EntropyArgs entropy_args;
  CLI::App* entropy = app.add_subcommand("entropy", "kernel-weighted length per slice");
  entropy->add_option("--history", entropy_args.history)->required();
  entropy->add_option("--center", entropy_args.center)->required();
  entropy->add_option("--t0", entropy_args.t0)->required();
  entropy->add_option("--report", entropy_args.report)->required();

  EntropyArgs verify_args;
  CLI::App* verify = app.add_subcommand("entropy-verify", "drop vs integrated deficit");
  verify->add_option("--history", verify_args.history)->required();
  verify->add_option("--center", verify_args.center)->required();
  verify->add_option("--t0", verify_args.t0)->required();
  verify->add_option("--report", verify_args.report)->required();

  SupEntropyArgs sup_args;
  CLI::App* sup = app.add_subcommand("sup-entropy", "sup over centers of the functional");
  sup->add_option("--input", sup_args.input)->required();
  sup->add_option("--t", sup_args.t)->required();
  sup->add_option("--t0", sup_args.t0)->required();
  sup->add_option("--report", sup_args.report)->required();

  GammaArgs gamma_args;
  double alpha_opt = 0.0, t1_opt = 0.0, t2_opt = 0.0;
  CLI::App* gamma = app.add_subcommand("gamma-check", "Gaussian-weighted length windows");
  gamma->add_option("--input", gamma_args.input);
  gamma->add_option("--gamma", gamma_args.gamma)
      ->each([&](const std::string&) { gamma_args.gamma_given = true; });
  gamma->add_option("--windows", gamma_args.windows);
  gamma->add_option("--alpha", alpha_opt);
  gamma->add_option("--t1", t1_opt);
  gamma->add_option("--t2", t2_opt);
  gamma->add_option("--report", gamma_args.report);

  SolitonArgs soliton_args;
  CLI::App* soliton = app.add_subcommand("soliton", "generate a self-similar profile");
  soliton->add_option("--kind", soliton_args.kind)->required();
  soliton->add_option("--lambda", soliton_args.lambda)
      ->each([&](const std::string&) { soliton_args.lambda_given = true; });
  soliton->add_option("--omega", soliton_args.omega)
      ->each([&](const std::string&) { soliton_args.omega_given = true; });
  soliton->add_option("--e", soliton_args.e)
      ->each([&](const std::string&) { soliton_args.e_given = true; });
  soliton->add_option("--smax", soliton_args.smax);
  soliton->add_option("--ds", soliton_args.ds);
  soliton->add_option("--start", soliton_args.start)
      ->each([&](const std::string&) { soliton_args.start_given = true; });
  soliton->add_flag("--symmetric,!--no-symmetric", soliton_args.symmetric)
      ->each([&](const std::string&) { soliton_args.symmetric_given = true; });
  soliton->add_option("--output", soliton_args.output)->required();

  DetectArgs detect_args;
  CLI::App* detect = app.add_subcommand("breather-detect", "fit a similarity between slices");
  detect->add_option("--slice1", detect_args.slice1)->required();
  detect->add_option("--slice2", detect_args.slice2)->required();
  detect->add_flag("--allow-reflection", detect_args.allow_reflection);
  detect->add_option("--report", detect_args.report)->required();

  SpliceArgs splice_args;
  CLI::App* splice = app.add_subcommand("splice", "extend one period by similarity powers");
  splice->add_option("--history", splice_args.history)->required();
  splice->add_option("--similarity", splice_args.similarity)->required();
  splice->add_option("--mode", splice_args.mode)->required();
  splice->add_option("--copies", splice_args.copies)->required();
  splice->add_option("--output", splice_args.output)->required();
  splice->add_option("--sidecar", splice_args.sidecar)->required();

  JunctionArgs junction_args;
  CLI::App* junction = app.add_subcommand("junction-check", "difference quotients at junctions");
  junction->add_option("--splice", junction_args.splice)->required();
  junction->add_option("--order", junction_args.order)->required();
  junction->add_option("--report", junction_args.report)->required();

  RescaleArgs rescale_args;
  CLI::App* rescale = app.add_subcommand("rescale", "parabolic rescaling of one period");
  rescale->add_option("--splice", rescale_args.splice)->required();
  rescale->add_option("--j", rescale_args.j)->required();
  rescale->add_option("--output", rescale_args.output)->required();

  HarnackArgs harnack_args;
  CLI::App* harnack = app.add_subcommand("harnack", "differential Harnack quantities");
  harnack->add_option("--history", harnack_args.history)->required();
  harnack->add_option("--quantity", harnack_args.quantity)->required();
  harnack->add_option("--v-mode", harnack_args.v_mode);
  harnack->add_option("--report", harnack_args.report)->required();

  RotatorArgs rotator_args;
  CLI::App* rotator = app.add_subcommand("rotator-check", "minimality at the closest point");
  rotator->add_option("--input", rotator_args.input)->required();
  rotator->add_option("--omega", rotator_args.omega)->required();
  rotator->add_option("--report", rotator_args.report)->required();

  OrbitArgs orbit_args;
  CLI::App* orbit = app.add_subcommand("orbit", "iterate the similarity index map");
  orbit->add_option("--history", orbit_args.history)->required();
  orbit->add_option("--similarity", orbit_args.similarity)->required();
  orbit->add_option("--p0", orbit_args.p0)->required();
  orbit->add_option("--direction", orbit_args.direction);
  orbit->add_option("--j", orbit_args.j)->required();
  orbit->add_option("--report", orbit_args.report)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "E:cli:" << e.what() << "\n";
    return 2;
  }

  try {
    if (*evolve) run_evolve(evolve_args);
    if (*entropy) run_entropy(entropy_args);
    if (*verify) run_entropy_verify(verify_args);
    if (*sup) run_sup_entropy(sup_args);
    if (*gamma) {
      if (gamma->count("--alpha")) gamma_args.alpha = alpha_opt;
      if (gamma->count("--t1")) gamma_args.t1 = t1_opt;
      if (gamma->count("--t2")) gamma_args.t2 = t2_opt;
      run_gamma_check(gamma_args);
    }
    if (*soliton) run_soliton(soliton_args);
    if (*detect) run_detect(detect_args);
    if (*splice) run_splice(splice_args);
    if (*junction) run_junction_check(junction_args);
    if (*rescale) run_rescale(rescale_args);
    if (*harnack) run_harnack(harnack_args);
    if (*rotator) run_rotator_check(rotator_args);
    if (*orbit) run_orbit(orbit_args);
  } catch (const csf::Error& e) {
    std::cerr << "E:" << e.code() << ":" << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "E:internal:" << e.what() << "\n";
    return 2;
  }

  if (const char* log = std::getenv("CSF_LOG"); log && *log)
    std::cerr << "done " << app.get_subcommands().front()->get_name() << "\n";
  return 0;
}
