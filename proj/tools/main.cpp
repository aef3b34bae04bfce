// imcf: command-line front end.
//
// Subcommands: report | flow | certify | verify | ball-model.  Configuration
// comes from a JSON file (--config), individual flags override file values,
// and --print-config shows the fully resolved configuration.  Exit codes:
// 0 success, 1 certification or residual-check failure, 2 configuration
// error, 3 numerical breakdown of a run.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "imcf/calculus.hpp"
#include "imcf/certify.hpp"
#include "imcf/config.hpp"
#include "imcf/errors.hpp"
#include "imcf/flow.hpp"
#include "imcf/geometry.hpp"
#include "imcf/io.hpp"
#include "imcf/roundness.hpp"

namespace fs = std::filesystem;
using namespace imcf;

namespace {

struct CliValues {
  std::string config_path;
  bool print_config = false;
  int n = 3;
  std::string mode;
  int L = 0;
  std::string preset;
  double r0 = 1.0, s = 3.0, eps = 0.15;
  double t_final = 2.0, cadence = 0.1, dt_max = 0.02;
  double s0 = 8.0, certify_t_final = 0.0, probe_t = 3.0;
  bool force = false, refine = false;
  double max_residual = 0.05;
  std::string output_dir;
};

void add_options(CLI::App* sub, CliValues& v) {
  sub->add_option("--config", v.config_path, "JSON configuration file");
  sub->add_flag("--print-config", v.print_config,
                "print the resolved configuration and exit");
  sub->add_option("--n", v.n, "ambient dimension (surface lives in H^n)");
  sub->add_option("--mode", v.mode, "grid mode: full2d or polar");
  sub->add_option("--L", v.L, "band limit (0 = per-mode default)");
  sub->add_option("--preset", v.preset,
                  "initial surface: sphere, p2, fbar, coefficients");
  sub->add_option("--r0", v.r0, "radius of the sphere preset");
  sub->add_option("--s", v.s, "base radius of the p2/fbar presets");
  sub->add_option("--eps", v.eps, "bump amplitude of the p2 preset");
  sub->add_option("--t-final", v.t_final, "flow end time");
  sub->add_option("--cadence", v.cadence, "trace sampling interval");
  sub->add_option("--dt-max", v.dt_max, "step size cap");
  sub->add_option("--s0", v.s0, "certification base radius");
  sub->add_option("--certify-t-final", v.certify_t_final,
                  "certification flow end time (0 = per-dimension default)");
  sub->add_option("--probe-t", v.probe_t, "probe flow length for certify_s0");
  sub->add_flag("--force", v.force, "run the certification flow even if a "
                                    "pre-condition failed");
  sub->add_flag("--refine", v.refine, "verify: repeat at doubled resolution "
                                      "and check the residuals shrink");
  sub->add_option("--max-residual", v.max_residual,
                  "verify: pass threshold for the relative residuals");
  sub->add_option("--output-dir,-o", v.output_dir, "output directory");
}

void apply_overrides(const CLI::App& sub, RunConfig& cfg, const CliValues& v) {
  if (sub.count("--n")) cfg.n = v.n;
  if (sub.count("--mode")) {
    if (v.mode == "full2d")
      cfg.mode = GridMode::Full2D;
    else if (v.mode == "polar")
      cfg.mode = GridMode::Polar;
    else
      throw ConfigError("mode: must be full2d or polar");
  }
  if (sub.count("--L")) cfg.L = v.L;
  if (sub.count("--preset")) cfg.initial.preset = v.preset;
  if (sub.count("--r0")) cfg.initial.r0 = v.r0;
  if (sub.count("--s")) cfg.initial.s = v.s;
  if (sub.count("--eps")) cfg.initial.eps = v.eps;
  if (sub.count("--t-final")) cfg.t_final = v.t_final;
  if (sub.count("--cadence")) cfg.flow.cadence = v.cadence;
  if (sub.count("--dt-max")) cfg.flow.dt_max = v.dt_max;
  if (sub.count("--s0")) cfg.s0 = v.s0;
  if (sub.count("--certify-t-final")) cfg.certify_t_final = v.certify_t_final;
  if (sub.count("--probe-t")) cfg.probe_t = v.probe_t;
  if (sub.count("--force")) cfg.force = v.force;
  if (sub.count("--refine")) cfg.verify.refine = v.refine;
  if (sub.count("--max-residual")) cfg.verify.max_residual = v.max_residual;
  if (sub.count("--output-dir")) cfg.output_dir = v.output_dir;
}

fs::path resolve_output_dir(const RunConfig& cfg) {
  fs::path p = cfg.output_dir;
  if (const char* root = std::getenv("IMCF_OUTPUT_ROOT"))
    if (*root != '\0' && p.is_relative()) p = fs::path(root) / p;
  return p;
}

void write_out(const fs::path& dir, const std::string& name,
               const std::string& content) {
  fs::create_directories(dir);
  write_file((dir / name).string(), content);
}

void write_snapshots(const fs::path& dir, const FlowTrace& tr) {
  fs::create_directories(dir / "snapshots");
  for (size_t k = 0; k < tr.samples.size(); ++k) {
    HarmonicCoeffs c(tr.work_grid);
    c.a = tr.samples[k].coeffs;
    char name[40];
    std::snprintf(name, sizeof(name), "snapshot_%04zu.json", k);
    write_file((dir / "snapshots" / name).string(), coeffs_to_json(c));
  }
}

int cmd_report(const RunConfig& cfg) {
  const GridPtr grid = config_grid(cfg);
  const GraphSurface surface = build_initial(cfg, grid);
  const GeometryReport rep = geometry_report(surface);
  const fs::path out = resolve_output_dir(cfg);
  write_out(out, "report.json", geometry_report_to_json(rep));
  write_out(out, "config.json", config_to_json(cfg));
  std::cout << "report: n=" << cfg.n << " L=" << resolved_band_limit(cfg)
            << " area=" << fmt17(rep.area) << " mtilde=" << fmt17(rep.modified)
            << " Q=" << fmt17(rep.q) << " -> " << (out / "report.json").string()
            << "\n";
  return 0;
}

int cmd_flow(const RunConfig& cfg) {
  const GridPtr grid = config_grid(cfg);
  const GraphSurface initial = build_initial(cfg, grid);
  const FlowTrace tr = run(initial, cfg.t_final, cfg.flow);
  const fs::path out = resolve_output_dir(cfg);
  write_out(out, "trace.csv", trace_to_csv(tr));
  write_out(out, "config.json", config_to_json(cfg));
  write_snapshots(out, tr);
  const FlowSample& last = tr.samples.back();
  std::cout << "flow: t=" << fmt17(last.t) << " samples=" << tr.samples.size()
            << " area_ratio=" << fmt17(last.area / tr.samples.front().area)
            << " mtilde=" << fmt17(last.mtilde) << " -> "
            << (out / "trace.csv").string() << "\n";
  return 0;
}

int cmd_certify(const RunConfig& cfg) {
  const CertifySetup setup = config_setup(cfg);
  const double tf = resolved_certify_t_final(cfg);
  const CertificationReport rep =
      cfg.n == 3 ? run_and_certify(cfg.initial.fbar, cfg.s0, tf, setup, cfg.force)
                 : highdim_construct_and_certify(cfg.n, cfg.initial.fbar, cfg.s0,
                                                 tf, setup, cfg.force);
  const fs::path out = resolve_output_dir(cfg);
  write_out(out, "certification.json", certification_report_to_json(rep));
  write_out(out, "config.json", config_to_json(cfg));
  if (rep.has_trace) write_out(out, "trace.csv", trace_to_csv(rep.trace));
  for (const ConditionCheck& c : rep.conditions)
    std::cout << (c.passed ? "  [ok]   " : "  [FAIL] ") << c.name << ": "
              << c.detail << "\n";
  std::cout << "certify: " << rep.summary << " -> "
            << (out / "certification.json").string() << "\n";
  return rep.certified ? 0 : 1;
}

struct VerifyCheck {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool passed = false;
};

// Worst interior value of each evolution-identity residual along one run,
// in mixed normalization |lhs - rhs| / (1 + |rhs|): behaves like the relative
// residual on generic flows and like the absolute one on near-exact cases
// (geodesic spheres), where both sides of an identity vanish and a pure
// relative measure would just amplify roundoff.
struct ResidualMaxima {
  double mono = 0.0;
  double hev = 0.0;
  double aring = 0.0;
  double integral = 0.0;
  bool any = false;
};

double mixed_from(double abs_v, double rel_v) {
  const double rhs = rel_v > 0.0 ? abs_v / rel_v : 0.0;
  return abs_v / (1.0 + rhs);
}

ResidualMaxima residual_maxima(const FlowTrace& tr) {
  ResidualMaxima m;
  const int ns = static_cast<int>(tr.samples.size());
  for (int k = 1; k + 1 < ns; ++k) {
    m.any = true;
    const FlowSample& sm = tr.samples[k - 1];
    const FlowSample& s0 = tr.samples[k];
    const FlowSample& sp = tr.samples[k + 1];
    if (tr.n == 3) {
      m.mono = std::max(m.mono, mixed_from(monotonicity_residual(tr, k),
                                           monotonicity_residual_rel(tr, k)));
      const double hm = s0.t - sm.t, hp = sp.t - s0.t;
      const double fd = (hm * hm * sp.int_aring2 - hp * hp * sm.int_aring2 +
                         (hp * hp - hm * hm) * s0.int_aring2) /
                        (hm * hp * (hm + hp));
      const double rhs = -(s0.int_aring2 + s0.int_gradh2_over_h2);
      m.integral = std::max(m.integral, std::abs(fd - rhs) / (1.0 + std::abs(rhs)));
    }
    m.hev = std::max(m.hev, mixed_from(h_evolution_residual(tr, k),
                                       h_evolution_residual_rel(tr, k)));
    m.aring = std::max(m.aring, mixed_from(aring_evolution_residual(tr, k),
                                           aring_evolution_residual_rel(tr, k)));
  }
  return m;
}

int cmd_verify(const RunConfig& cfg) {
  const GridPtr grid = config_grid(cfg);
  const GraphSurface initial = build_initial(cfg, grid);
  const double thr = cfg.verify.max_residual;

  std::vector<VerifyCheck> checks;
  auto add = [&](const std::string& name, double value, double threshold) {
    checks.push_back({name, value, threshold, value < threshold});
  };

  if (cfg.n == 3)
    add("gauss_identity", gauss_identity_check(initial), thr);

  const FlowTrace tr = run(initial, cfg.t_final, cfg.flow);
  const ResidualMaxima coarse = residual_maxima(tr);
  if (!coarse.any)
    throw InsufficientData("verify: flow too short for interior residual "
                           "samples; raise flow.t_final or lower the cadence");
  if (cfg.n == 3) {
    add("monotonicity_residual", coarse.mono, thr);
    add("aring_integral_consistency", coarse.integral, thr);
  }
  add("h_evolution_residual", coarse.hev, thr);
  add("aring_evolution_residual", coarse.aring, thr);

  ResidualMaxima fine;
  if (cfg.verify.refine) {
    RunConfig rcfg = cfg;
    rcfg.L = 2 * resolved_band_limit(cfg);
    rcfg.flow.cadence = cfg.flow.cadence / 2.0;
    rcfg.flow.dt_max = cfg.flow.dt_max / 2.0;
    rcfg.flow.c_stab = cfg.flow.c_stab / 2.0;
    const GridPtr rgrid = config_grid(rcfg);
    const FlowTrace rtr = run(build_initial(rcfg, rgrid), rcfg.t_final, rcfg.flow);
    fine = residual_maxima(rtr);
    // Halving the sampling step should cut the finite-difference part of each
    // residual at least in half; 1e-10 is the roundoff floor for cases (like
    // the geodesic sphere) that are exact already at the coarse level.
    auto ratio_check = [&](const std::string& name, double c, double f) {
      add(name + "_refinement", f, std::max(0.6 * c, 1e-10));
    };
    if (cfg.n == 3) {
      ratio_check("monotonicity_residual", coarse.mono, fine.mono);
      ratio_check("aring_integral_consistency", coarse.integral, fine.integral);
    }
    ratio_check("h_evolution_residual", coarse.hev, fine.hev);
    ratio_check("aring_evolution_residual", coarse.aring, fine.aring);
  }

  bool all_ok = true;
  for (const VerifyCheck& c : checks) all_ok = all_ok && c.passed;

  std::string json = "{\n  \"n\": " + std::to_string(cfg.n) +
                     ",\n  \"t_final\": " + fmt17(cfg.t_final) +
                     ",\n  \"checks\": [\n";
  for (size_t i = 0; i < checks.size(); ++i) {
    const VerifyCheck& c = checks[i];
    json += std::string("    {\"name\": \"") + c.name + "\", \"value\": " +
            fmt17(c.value) + ", \"threshold\": " + fmt17(c.threshold) +
            ", \"passed\": " + (c.passed ? "true" : "false") + "}";
    json += (i + 1 < checks.size()) ? ",\n" : "\n";
  }
  json += std::string("  ],\n  \"passed\": ") + (all_ok ? "true" : "false") +
          "\n}\n";

  const fs::path out = resolve_output_dir(cfg);
  write_out(out, "verify.json", json);
  write_out(out, "config.json", config_to_json(cfg));
  for (const VerifyCheck& c : checks)
    std::cout << (c.passed ? "  [ok]   " : "  [FAIL] ") << c.name << " = "
              << fmt17(c.value) << "  (threshold " << fmt17(c.threshold)
              << ")\n";
  std::cout << "verify: " << (all_ok ? "all checks passed" : "checks FAILED")
            << " -> " << (out / "verify.json").string() << "\n";
  return all_ok ? 0 : 1;
}

int cmd_ball_model(const RunConfig& cfg) {
  if (cfg.n != 3)
    throw ConfigError("ball-model: the disk model is implemented for n = 3");
  const GridPtr grid = config_grid(cfg);
  const GraphSurface initial = build_initial(cfg, grid);
  const FlowTrace tr = run(initial, cfg.t_final, cfg.flow);
  const BallModelLimit bm = ball_model_limit(tr);
  const fs::path out = resolve_output_dir(cfg);
  write_out(out, "ball_field.txt", field_to_text(bm.field));
  write_out(out, "config.json", config_to_json(cfg));
  std::string json = "{\n  \"t_final\": " + fmt17(cfg.t_final) +
                     ",\n  \"gap\": " + fmt17(bm.gap) +
                     ",\n  \"gap_monotone\": " +
                     (bm.gap_monotone ? "true" : "false") + "\n}\n";
  write_out(out, "ball_model.json", json);
  std::cout << "ball-model: gap=" << fmt17(bm.gap)
            << " monotone=" << (bm.gap_monotone ? "yes" : "no") << " -> "
            << (out / "ball_model.json").string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"imcf: inverse mean curvature flow of star-shaped surfaces in "
               "hyperbolic space"};
  app.require_subcommand(1);
  CliValues v;
  CLI::App* subs[5] = {
      app.add_subcommand("report", "geometry report of an initial surface"),
      app.add_subcommand("flow", "run the flow; write trace CSV and snapshots"),
      app.add_subcommand("certify", "run the counterexample certification"),
      app.add_subcommand("verify", "evolution-identity residual battery"),
      app.add_subcommand("ball-model", "ball-model limit field of a flow"),
  };
  for (CLI::App* s : subs) add_options(s, v);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const CLI::App* sub = app.get_subcommands().front();
  try {
    RunConfig cfg = default_config();
    if (!v.config_path.empty()) cfg = parse_config_json(read_file(v.config_path));
    cfg.command = sub->get_name();
    apply_overrides(*sub, cfg, v);
    validate_config(cfg);
    if (v.print_config) {
      std::cout << config_to_json(cfg);
      return 0;
    }
    if (cfg.command == "report") return cmd_report(cfg);
    if (cfg.command == "flow") return cmd_flow(cfg);
    if (cfg.command == "certify") return cmd_certify(cfg);
    if (cfg.command == "verify") return cmd_verify(cfg);
    return cmd_ball_model(cfg);
  } catch (const FlowBreakdown& e) {
    std::cerr << "numerical breakdown: " << e.what() << "\n";
    return 3;
  } catch (const StepRejected& e) {
    std::cerr << "numerical breakdown: " << e.what() << "\n";
    return 3;
  } catch (const NotConverged& e) {
    std::cerr << "numerical breakdown: " << e.what() << "\n";
    return 3;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const InsufficientData& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
