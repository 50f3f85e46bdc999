#pragma once

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "circle.hpp"
#include "correspondence.hpp"
#include "errors.hpp"
#include "expansion.hpp"
#include "io.hpp"
#include "linearization.hpp"
#include "measures.hpp"
#include "periodic.hpp"
#include "render.hpp"

namespace holoscope::cli {

using nlohmann::json;

inline constexpr const char* kVersion = "0.1.0";

enum class Workflow { linearize, periodic, mmem, green, harmonic, compare, correspond, blaschke, tce, ballscale, render };

inline constexpr std::pair<Workflow, const char*> kWorkflowNames[] = {
    {Workflow::linearize, "linearize"}, {Workflow::periodic, "periodic"},   {Workflow::mmem, "mmem"},
    {Workflow::green, "green"},         {Workflow::harmonic, "harmonic"},   {Workflow::compare, "compare"},
    {Workflow::correspond, "correspond"}, {Workflow::blaschke, "blaschke"}, {Workflow::tce, "tce"},
    {Workflow::ballscale, "ballscale"}, {Workflow::render, "render"},
};

inline const char* to_string(Workflow w) {
  for (const auto& [k, name] : kWorkflowNames)
    if (k == w) return name;
  return "?";
}

/// Everything one invocation needs. Point-valued fields hold the raw
/// `re,im` text; an empty string means "not given".
struct RunConfig {
  Workflow workflow = Workflow::green;
  std::string map, map1, map2, zeros, measure, measure2, points;
  std::string point, p1, p2, z, z0, beta = "1";
  std::string window = "-2,2,-2,2";
  std::string mode = "escape-time", branch = "random";
  int trunc = 64, period = 1, nmax = 0, amax = 8, bmax = 8, depth = 30, bins = 64;
  int width = 512, height = 512, budget = 256, ell = 1, root = 0, nradii = 12;
  long long samples = 100000;
  double radius = 0.01, eps = 1e-3, rmin = 1e-3, rmax = 0.3;
  std::uint64_t seed = 0;
  std::string out;

  /// Canonical parameter record; the manifest hashes this.
  json parameters() const {
    return json{{"workflow", to_string(workflow)},
                {"map", map}, {"map1", map1}, {"map2", map2}, {"zeros", zeros},
                {"measure", measure}, {"measure2", measure2}, {"points", points},
                {"point", point}, {"p1", p1}, {"p2", p2}, {"z", z}, {"z0", z0}, {"beta", beta},
                {"window", window}, {"mode", mode}, {"branch", branch},
                {"trunc", trunc}, {"period", period}, {"nmax", nmax}, {"amax", amax}, {"bmax", bmax},
                {"depth", depth}, {"bins", bins}, {"width", width}, {"height", height}, {"budget", budget},
                {"ell", ell}, {"root", root}, {"nradii", nradii}, {"samples", samples},
                {"radius", radius}, {"eps", eps}, {"rmin", rmin}, {"rmax", rmax},
                {"seed", seed}, {"out", out}};
  }
};

// ---------------------------------------------------------------------------
// Value parsing

inline std::vector<double> parse_numbers(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("--" + what + ": '" + text + "' is not a comma-separated list of numbers");
    }
  }
  return out;
}

/// `re,im`, `re`, or `inf`.
inline SpherePoint parse_point(const std::string& text, const std::string& what) {
  if (text == "inf" || text == "infinity") return SpherePoint::infinity();
  const auto v = parse_numbers(text, what);
  if (v.empty() || v.size() > 2) throw ConfigError("--" + what + ": expected re,im");
  return SpherePoint(Cx{v[0], v.size() == 2 ? v[1] : 0.0});
}

inline Cx parse_finite(const std::string& text, const std::string& what) {
  const SpherePoint p = parse_point(text, what);
  if (p.is_infinity()) throw ConfigError("--" + what + ": must be a finite point");
  return p.finite();
}

inline Window parse_window(const std::string& text) {
  const auto v = parse_numbers(text, "window");
  if (v.size() != 4 || !(v[0] < v[1]) || !(v[2] < v[3]))
    throw ConfigError("--window: expected xmin,xmax,ymin,ymax with xmin < xmax and ymin < ymax");
  return {v[0], v[1], v[2], v[3]};
}

inline const std::string& require(const std::string& value, const char* flag, const RunConfig& cfg) {
  if (value.empty()) throw ConfigError(std::string(to_string(cfg.workflow)) + ": missing required option --" + flag);
  return value;
}

// ---------------------------------------------------------------------------
// Artifacts

/// Collects written files and input hashes, then emits the manifest.
class Artifacts {
 public:
  explicit Artifacts(const RunConfig& cfg) : cfg_(cfg), start_(std::chrono::steady_clock::now()) {}

  void input(const std::string& path) {
    if (path.empty()) return;
    inputs_.push_back(json{{"path", path}, {"fnv1a", io::hex64(io::fnv1a(io::read_file(path)))}});
  }

  /// Writes to --out when given, otherwise to stdout.
  void primary(std::string_view contents) {
    if (cfg_.out.empty()) {
      std::cout << contents;
      if (!contents.empty() && contents.back() != '\n') std::cout << '\n';
      return;
    }
    write(cfg_.out, contents);
  }

  void write(const std::string& path, std::string_view contents) {
    io::write_atomic(path, contents);
    outputs_.push_back(path);
  }

  void finish() {
    if (cfg_.out.empty()) return;
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    const json params = cfg_.parameters();
    json m{{"tool", "holoscope"},
           {"version", kVersion},
           {"workflow", to_string(cfg_.workflow)},
           {"parameters", params},
           {"parameter_hash", io::hex64(io::fnv1a(params.dump()))},
           {"inputs", inputs_},
           {"outputs", outputs_},
           {"wall_time", wall}};
    io::write_atomic(cfg_.out + ".manifest.json", m.dump(2) + "\n");
  }

 private:
  const RunConfig& cfg_;
  std::chrono::steady_clock::time_point start_;
  json inputs_ = json::array();
  json outputs_ = json::array();
};

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

inline json multiplier_relation_json(const MultiplierRelation& r) {
  return json{{"a", r.a}, {"b", r.b}, {"ell", r.ell}, {"defect", r.defect}, {"branch", r.branch}, {"primitive", r.primitive}};
}

inline json curve_json(const CurveCandidate& c) {
  json coeffs = json::array();
  for (Eigen::Index i = 0; i <= c.m; ++i)
    for (Eigen::Index j = 0; j <= c.n; ++j)
      if (std::abs(c.coeffs(i, j)) > 1e-10)
        coeffs.push_back(json{{"x", i}, {"y", j}, {"c", io::cx_json(c.coeffs(i, j))}});
  json out{{"bidegree", {c.m, c.n}},
           {"terms", coeffs},
           {"fit_residual", c.fit_residual},
           {"dropped", c.dropped},
           {"possibly_reducible", c.possibly_reducible}};
  out["invariance_residual"] = c.invariance_residual ? json(*c.invariance_residual) : json(nullptr);
  return out;
}

inline void write_measure(Artifacts& art, const RunConfig& cfg, const EmpiricalMeasure& mu, const std::string& hash) {
  art.primary(io::measure_csv(mu));
  if (!cfg.out.empty()) art.write(cfg.out + ".json", dump(io::measure_sidecar(mu, hash)));
}

// ---------------------------------------------------------------------------
// Workflows

inline void run_linearize(const RunConfig& cfg, Artifacts& art) {
  const RationalMap f = io::load_map(require(cfg.map, "map", cfg));
  art.input(cfg.map);
  const SpherePoint p = parse_point(require(cfg.point, "point", cfg), "point");
  const Linearizer L = koenigs_series(f, p, cfg.trunc);
  json coeffs = json::array();
  for (Cx c : L.coeffs) coeffs.push_back(io::cx_json(c));
  json j{{"base", io::point_json(L.base)},
         {"chart", L.chart == Chart::standard ? "standard" : "reciprocal"},
         {"lambda", io::cx_json(L.lambda)},
         {"coeffs", coeffs},
         {"trust_radius", L.trust_radius},
         {"residual", L.residual_at_trust}};
  if (cfg.ell != 1 || parse_finite(cfg.beta, "beta") != Cx{1.0}) {
    const auto g = generalized_koenigs(f, p, parse_finite(cfg.beta, "beta"), cfg.ell, cfg.root, cfg.trunc);
    const double r = generalized_trust_radius(g);
    j["generalized"] = json{{"beta", io::cx_json(g.beta)},
                            {"ell", g.ell},
                            {"root_index", g.root_index},
                            {"kappa", io::cx_json(g.kappa)},
                            {"trust_radius", r},
                            {"residual", generalized_residual(g, f, r)}};
  }
  art.primary(dump(j));
}

inline void run_periodic(const RunConfig& cfg, Artifacts& art) {
  const RationalMap f = io::load_map(require(cfg.map, "map", cfg));
  art.input(cfg.map);
  const PeriodicSearch s = find_periodic_points(f, cfg.period);
  json cycles = json::array();
  for (const Cycle& c : s.cycles) {
    json pts = json::array();
    for (const auto& p : c.points) pts.push_back(io::point_json(p));
    cycles.push_back(json{{"period", c.period},
                          {"points", pts},
                          {"multiplier", io::cx_json(c.multiplier)},
                          {"kind", to_string(c.kind)},
                          {"multiplicity", c.multiplicity}});
  }
  art.primary(dump(cycles));
  std::fprintf(stderr, "periodic: %zu cycles of period %d; %lld of %lld fixed points of f^n found%s\n", s.cycles.size(),
               cfg.period, static_cast<long long>(s.found_fixed_points), static_cast<long long>(s.expected_fixed_points),
               s.deficit ? " (deficit)" : "");
}

inline void run_mmem(const RunConfig& cfg, Artifacts& art) {
  const RationalMap f = io::load_map(require(cfg.map, "map", cfg));
  art.input(cfg.map);
  const SpherePoint z0 = cfg.z0.empty() ? SpherePoint(Cx{0.3, 0.2}) : parse_point(cfg.z0, "z0");
  if (cfg.samples < 1) throw ConfigError("mmem: --samples must be positive");
  const auto mu = sample_mmem(f, static_cast<std::size_t>(cfg.samples), cfg.depth, z0, cfg.seed);
  write_measure(art, cfg, mu, io::map_hash(f));
}

inline void run_green(const RunConfig& cfg, Artifacts& art) {
  const RationalMap f = io::load_map(require(cfg.map, "map", cfg));
  art.input(cfg.map);
  const Cx z = parse_finite(require(cfg.z, "z", cfg), "z");
  const auto g = green_function(f, z, cfg.nmax > 0 ? cfg.nmax : 1000);
  std::printf("%.6f\n", g.value);
  if (!cfg.out.empty()) {
    json j{{"z", io::cx_json(z)}, {"green", g.value}, {"converged", g.converged}};
    j["escape_time"] = g.escape_time ? json(*g.escape_time) : json(nullptr);
    art.write(cfg.out, dump(j));
  }
}

inline void run_harmonic(const RunConfig& cfg, Artifacts& art) {
  const RationalMap f = io::load_map(require(cfg.map, "map", cfg));
  art.input(cfg.map);
  const Cx z = cfg.z.empty() ? Cx{1000.0, 0.0} : parse_finite(cfg.z, "z");
  if (cfg.samples < 1) throw ConfigError("harmonic: --samples must be positive");
  const auto mu = brownian_exit_measure(f, z, static_cast<std::size_t>(cfg.samples), cfg.eps, cfg.seed);
  write_measure(art, cfg, mu, io::map_hash(f));
}

inline void run_compare(const RunConfig& cfg, Artifacts& art) {
  const auto a = io::load_measure(require(cfg.measure, "measure", cfg));
  const auto b = io::load_measure(require(cfg.measure2, "measure2", cfg));
  art.input(cfg.measure);
  art.input(cfg.measure2);
  const auto r = measure_compare(a, b, parse_window(cfg.window), cfg.bins);
  auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  art.primary(dump(json{{"bins", r.bins},
                        {"tv_distance", r.tv_distance},
                        {"ratio_low", num(r.ratio_low)},
                        {"ratio_high", num(r.ratio_high)},
                        {"occupied_bins", r.occupied_bins},
                        {"samples_a", r.samples_a},
                        {"samples_b", r.samples_b}}));
}

inline void run_correspond(const RunConfig& cfg, Artifacts& art) {
  const RationalMap f1 = io::load_map(require(cfg.map1, "map1", cfg));
  const RationalMap f2 = io::load_map(require(cfg.map2, "map2", cfg));
  art.input(cfg.map1);
  art.input(cfg.map2);
  CorrespondenceOptions opt;
  opt.a_max = cfg.amax;
  opt.b_max = cfg.bmax;
  opt.beta = parse_finite(cfg.beta, "beta");
  opt.ell = cfg.ell;
  opt.root_index = cfg.root;
  opt.truncation = cfg.trunc;
  const auto rep = analyze_correspondence(f1, parse_point(require(cfg.p1, "p1", cfg), "p1"), f2,
                                          parse_point(require(cfg.p2, "p2", cfg), "p2"), opt);
  json rel = json::array();
  for (const auto& r : rep.relations) rel.push_back(multiplier_relation_json(r));
  json deg = json::array();
  for (const auto& d : rep.degree_checks) deg.push_back(json{{"a", d.a}, {"b", d.b}, {"holds", d.holds}});
  json tried = json::array();
  for (const auto& [m, n] : rep.bidegrees_tried) tried.push_back({m, n});
  json j{{"lambda1", io::cx_json(rep.lambda1)},
         {"lambda2", io::cx_json(rep.lambda2)},
         {"d1", rep.d1},
         {"d2", rep.d2},
         {"relations", rel},
         {"degree_checks", deg},
         {"bidegrees_tried", tried}};
  j["curve"] = rep.curve ? curve_json(*rep.curve) : json(nullptr);
  j["invariance_relation"] = rep.invariance_relation ? multiplier_relation_json(*rep.invariance_relation) : json(nullptr);
  art.primary(dump(j));
}

inline void run_blaschke(const RunConfig& cfg, Artifacts& art) {
  const auto B = io::parse_blaschke(io::read_file(require(cfg.zeros, "zeros", cfg)), cfg.zeros);
  art.input(cfg.zeros);
  const int n_max = cfg.nmax > 0 ? cfg.nmax : 8;
  const auto S = lyapunov_spectrum(B, n_max);
  std::string csv = "period,angle,exponent,primitive_period\n";
  for (const auto& e : S.entries)
    csv += std::to_string(e.period) + "," + io::format_double(e.angle) + "," + io::format_double(e.exponent) + "," +
           std::to_string(e.primitive_period) + "\n";
  art.primary(csv);
  const auto iv = spectrum_interval_check(S);
  json summary{{"d", S.d},
               {"n_max", S.n_max},
               {"cycles", S.cycle_exponents().size()},
               {"min", iv.min},
               {"max", iv.max},
               {"largest_gap", iv.largest_gap},
               {"empty_cells", iv.empty_cells}};
  if (n_max >= 6) {
    const auto v = rigidity_verdict(S);
    summary["verdict"] = to_string(v.verdict);
    summary["spread"] = v.spread;
    summary["mean"] = v.mean;
  } else {
    summary["verdict"] = to_string(Verdict::inconclusive);
  }
  if (!cfg.out.empty()) art.write(cfg.out + ".json", dump(summary));
  std::fprintf(stderr, "blaschke: verdict %s\n", summary["verdict"].get<std::string>().c_str());
}

inline void run_tce(const RunConfig& cfg, Artifacts& art) {
  const RationalMap f = io::load_map(require(cfg.map, "map", cfg));
  art.input(cfg.map);
  ShrinkOptions opt;
  if (cfg.branch == "nearest") opt.mode = BranchMode::nearest;
  else if (cfg.branch != "random") throw ConfigError("--branch: expected random or nearest");
  const Cx x = parse_finite(require(cfg.point, "point", cfg), "point");
  const int n_max = cfg.nmax > 0 ? cfg.nmax : 12;
  const auto est = shrink_rate_estimate(f, x, cfg.radius, n_max, cfg.budget, cfg.seed, opt);
  art.primary(dump(json{{"center", io::cx_json(est.center)},
                        {"radius", est.radius},
                        {"seed", cfg.seed},
                        {"branch_mode", cfg.branch},
                        {"diam_by_n", est.diam_by_n},
                        {"branch_count_by_n", est.branch_count_by_n},
                        {"fitted_rate", est.fitted_rate},
                        {"truncated", est.truncated}}));
}

inline void run_ballscale(const RunConfig& cfg, Artifacts& art) {
  const auto mu = io::load_measure(require(cfg.measure, "measure", cfg));
  const auto pts = io::load_points(require(cfg.points, "points", cfg));
  art.input(cfg.measure);
  art.input(cfg.points);
  const auto rep = measure_ball_scaling(mu, pts, geometric_radii(cfg.rmin, cfg.rmax, cfg.nradii));
  std::string csv = "re,im,exponent,radii_used,flagged\n";
  for (const auto& p : rep.per_point)
    csv += io::format_double(p.x.real()) + "," + io::format_double(p.x.imag()) + "," + io::format_double(p.exponent) +
           "," + std::to_string(p.radii_used) + "," + (p.flagged ? "1" : "0") + "\n";
  art.primary(csv);
  std::fprintf(stderr, "ballscale: theta_hat %.6f\n", rep.theta_hat);
}

inline void run_render(const RunConfig& cfg, Artifacts& art) {
  require(cfg.out, "out", cfg);
  if (cfg.width < 1 || cfg.height < 1 || cfg.width > 16384 || cfg.height > 16384)
    throw ConfigError("render: --width/--height must lie in [1, 16384]");
  const Window w = parse_window(cfg.window);
  Image img;
  if (cfg.mode == "escape-time") {
    const RationalMap f = io::load_map(require(cfg.map, "map", cfg));
    art.input(cfg.map);
    img = render_escape_time(f, w, cfg.width, cfg.height, cfg.nmax > 0 ? cfg.nmax : 500);
  } else if (cfg.mode == "measure-density") {
    const auto mu = io::load_measure(require(cfg.measure, "measure", cfg));
    art.input(cfg.measure);
    img = render_density(bin_density(mu, w, cfg.width, cfg.height));
  } else {
    throw ConfigError("--mode: expected escape-time or measure-density");
  }
  art.primary(img.ppm());
}

/// Executes one workflow. Returns the process exit status.
inline int run(const RunConfig& cfg, std::ostream& err = std::cerr) {
  try {
    Artifacts art(cfg);
    switch (cfg.workflow) {
      case Workflow::linearize: run_linearize(cfg, art); break;
      case Workflow::periodic: run_periodic(cfg, art); break;
      case Workflow::mmem: run_mmem(cfg, art); break;
      case Workflow::green: run_green(cfg, art); break;
      case Workflow::harmonic: run_harmonic(cfg, art); break;
      case Workflow::compare: run_compare(cfg, art); break;
      case Workflow::correspond: run_correspond(cfg, art); break;
      case Workflow::blaschke: run_blaschke(cfg, art); break;
      case Workflow::tce: run_tce(cfg, art); break;
      case Workflow::ballscale: run_ballscale(cfg, art); break;
      case Workflow::render: run_render(cfg, art); break;
    }
    art.finish();
    return 0;
  } catch (const ConfigError& e) {
    err << "holoscope: config error: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    err << "holoscope: numeric error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    err << "holoscope: internal error: " << e.what() << "\n";
    return 4;
  }
}

// ---------------------------------------------------------------------------
// Command line

/// Replaces `--config FILE` with the file's `key = value` entries as
/// `--key value` tokens; tokens after it on the command line win.
inline std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const bool eq_form = args[i].rfind("--config=", 0) == 0;
    if (args[i] != "--config" && !eq_form) {
      out.push_back(args[i]);
      continue;
    }
    std::string path;
    if (eq_form) path = args[i].substr(9);
    else if (i + 1 < args.size()) path = args[++i];
    else throw ConfigError("--config needs a file");
    for (const auto& [key, value] : io::parse_config_text(io::read_file(path), path)) {
      out.push_back("--" + key);
      if (value.is_array()) {
        std::string joined;
        for (const auto& v : value) {
          if (!v.is_number()) throw ConfigError(path + ": key '" + key + "': expected numbers");
          if (!joined.empty()) joined += ',';
          joined += io::format_double(v.get<double>());
        }
        out.push_back(joined);
      } else if (value.is_string()) {
        out.push_back(value.get<std::string>());
      } else if (value.is_number_integer()) {
        out.push_back(std::to_string(value.get<long long>()));
      } else if (value.is_number()) {
        out.push_back(io::format_double(value.get<double>()));
      } else {
        throw ConfigError(path + ": key '" + key + "': unsupported value");
      }
    }
  }
  return out;
}

/// Parses argv into a RunConfig and runs it.
inline int run_main(int argc, char** argv, std::ostream& err = std::cerr) {
  RunConfig cfg;
  CLI::App app{"holoscope: numerical complex dynamics toolkit"};
  app.set_version_flag("--version", std::string("holoscope ") + kVersion);
  app.require_subcommand(1);

  auto add = [&](CLI::App* sub, const std::string& name, auto& field, const std::string& help) {
    sub->add_option("--" + name, field, help)->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  };
  auto common = [&](CLI::App* sub) {
    add(sub, "seed", cfg.seed, "random seed");
    add(sub, "out", cfg.out, "output path (stdout when absent)");
  };
  std::vector<std::pair<CLI::App*, Workflow>> subs;
  auto sub = [&](Workflow w, const std::string& help) {
    CLI::App* s = app.add_subcommand(to_string(w), help);
    subs.emplace_back(s, w);
    common(s);
    return s;
  };

  auto* lin = sub(Workflow::linearize, "Koenigs series at a repelling fixed point");
  add(lin, "map", cfg.map, "map file");
  add(lin, "point", cfg.point, "fixed point re,im or inf");
  add(lin, "trunc", cfg.trunc, "series truncation N");
  add(lin, "beta", cfg.beta, "generalized form: beta re,im");
  add(lin, "ell", cfg.ell, "generalized form: ell");
  add(lin, "root", cfg.root, "generalized form: root index of kappa");

  auto* per = sub(Workflow::periodic, "periodic cycles of exact period n");
  add(per, "map", cfg.map, "map file");
  add(per, "period", cfg.period, "period n");

  auto* mm = sub(Workflow::mmem, "sample the measure of maximal entropy by inverse iteration");
  add(mm, "map", cfg.map, "map file");
  add(mm, "samples", cfg.samples, "number of samples");
  add(mm, "depth", cfg.depth, "backward steps per sample (>= 20)");
  add(mm, "z0", cfg.z0, "start point re,im");

  auto* gr = sub(Workflow::green, "Green's function of a polynomial");
  add(gr, "map", cfg.map, "map file");
  add(gr, "z", cfg.z, "point re,im");
  add(gr, "nmax", cfg.nmax, "iteration cap");

  auto* hm = sub(Workflow::harmonic, "harmonic measure by walk-on-spheres");
  add(hm, "map", cfg.map, "map file");
  add(hm, "z", cfg.z, "start point re,im (default 1000,0)");
  add(hm, "samples", cfg.samples, "number of walks");
  add(hm, "eps", cfg.eps, "stopping distance");

  auto* cmp = sub(Workflow::compare, "binned comparison of two measures");
  add(cmp, "measure", cfg.measure, "first measure CSV");
  add(cmp, "measure2", cfg.measure2, "second measure CSV");
  add(cmp, "window", cfg.window, "xmin,xmax,ymin,ymax");
  add(cmp, "bins", cfg.bins, "bins per axis");

  auto* cor = sub(Workflow::correspond, "multiplier relations and invariant curve between two maps");
  add(cor, "map1", cfg.map1, "first map file");
  add(cor, "map2", cfg.map2, "second map file");
  add(cor, "p1", cfg.p1, "fixed point of map1");
  add(cor, "p2", cfg.p2, "fixed point of map2");
  add(cor, "amax", cfg.amax, "largest a");
  add(cor, "bmax", cfg.bmax, "largest b");
  add(cor, "beta", cfg.beta, "scale beta of the second linearizer");
  add(cor, "ell", cfg.ell, "power ell of the second linearizer");
  add(cor, "root", cfg.root, "root index of kappa");
  add(cor, "trunc", cfg.trunc, "series truncation N");

  auto* bl = sub(Workflow::blaschke, "Lyapunov spectrum of an expanding Blaschke product");
  add(bl, "zeros", cfg.zeros, "zeros file");
  add(bl, "nmax", cfg.nmax, "largest period");

  auto* tc = sub(Workflow::tce, "shrinking rate of pullbacks of a small ball");
  add(tc, "map", cfg.map, "map file");
  add(tc, "point", cfg.point, "point on the Julia set re,im");
  add(tc, "radius", cfg.radius, "ball radius");
  add(tc, "nmax", cfg.nmax, "pullback depth");
  add(tc, "budget", cfg.budget, "number of branches");
  add(tc, "branch", cfg.branch, "random or nearest");

  auto* bs = sub(Workflow::ballscale, "local scaling exponents of a measure");
  add(bs, "measure", cfg.measure, "measure CSV");
  add(bs, "points", cfg.points, "query points CSV");
  add(bs, "rmin", cfg.rmin, "smallest radius");
  add(bs, "rmax", cfg.rmax, "largest radius");
  add(bs, "nradii", cfg.nradii, "number of radii");

  auto* rd = sub(Workflow::render, "PPM rendering");
  add(rd, "map", cfg.map, "map file (escape-time)");
  add(rd, "measure", cfg.measure, "measure CSV (measure-density)");
  add(rd, "mode", cfg.mode, "escape-time or measure-density");
  add(rd, "window", cfg.window, "xmin,xmax,ymin,ymax");
  add(rd, "width", cfg.width, "pixels");
  add(rd, "height", cfg.height, "pixels");
  add(rd, "nmax", cfg.nmax, "escape iteration cap");

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = expand_config(std::move(args));
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    err << "holoscope: config error: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    err << "holoscope: config error: " << e.what() << "\n";
    return 2;
  }
  for (const auto& [s, w] : subs)
    if (s->parsed()) cfg.workflow = w;
  return run(cfg, err);
}

}  // namespace holoscope::cli
