#include "imcf/config.hpp"

#include <cmath>
#include <set>

#include "imcf/errors.hpp"
#include <json.hpp>

namespace imcf {

using ordered_json = nlohmann::ordered_json;

RunConfig default_config() {
  RunConfig cfg;
  cfg.initial.preset = "p2";
  cfg.initial.fbar.constant = 1.0;
  cfg.initial.fbar.terms = {FbarTerm{"p2", 2, 0.1}};
  return cfg;
}

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw ConfigError(path + ": " + msg);
}

void check_keys(const ordered_json& j, const std::string& path,
                const std::set<std::string>& allowed) {
  for (const auto& [key, _] : j.items())
    if (!allowed.count(key)) fail(path.empty() ? key : path + "." + key, "unknown key");
}

double get_num(const ordered_json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

int get_int(const ordered_json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<int>();
}

bool get_bool(const ordered_json& j, const std::string& path) {
  if (!j.is_boolean()) fail(path, "expected true or false");
  return j.get<bool>();
}

std::string get_str(const ordered_json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

FbarSpec parse_fbar(const ordered_json& j, const std::string& path) {
  check_keys(j, path, {"constant", "terms"});
  FbarSpec spec;
  spec.terms.clear();
  if (j.contains("constant")) spec.constant = get_num(j["constant"], path + ".constant");
  if (j.contains("terms")) {
    if (!j["terms"].is_array()) fail(path + ".terms", "expected an array");
    int idx = 0;
    for (const auto& t : j["terms"]) {
      const std::string tp = path + ".terms[" + std::to_string(idx++) + "]";
      check_keys(t, tp, {"kind", "degree", "amp"});
      FbarTerm term;
      if (t.contains("kind")) term.kind = get_str(t["kind"], tp + ".kind");
      if (t.contains("degree")) term.degree = get_int(t["degree"], tp + ".degree");
      if (t.contains("amp")) term.amp = get_num(t["amp"], tp + ".amp");
      static const std::set<std::string> kinds = {"p2", "pl", "x1", "x2", "xn"};
      if (!kinds.count(term.kind)) fail(tp + ".kind", "must be one of p2, pl, x1, x2, xn");
      spec.terms.push_back(std::move(term));
    }
  }
  return spec;
}

}  // namespace

RunConfig parse_config_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config: top level must be an object");

  RunConfig cfg = default_config();
  check_keys(j, "", {"command", "n", "mode", "L", "initial", "flow", "certify",
                     "thresholds", "verify", "output_dir"});
  if (j.contains("command")) cfg.command = get_str(j["command"], "command");
  if (j.contains("n")) cfg.n = get_int(j["n"], "n");
  if (j.contains("mode")) {
    const std::string m = get_str(j["mode"], "mode");
    if (m == "full2d")
      cfg.mode = GridMode::Full2D;
    else if (m == "polar")
      cfg.mode = GridMode::Polar;
    else
      fail("mode", "must be full2d or polar");
  }
  if (j.contains("L")) cfg.L = get_int(j["L"], "L");

  if (j.contains("initial")) {
    const auto& ji = j["initial"];
    check_keys(ji, "initial", {"preset", "r0", "s", "eps", "fbar", "coeffs"});
    if (ji.contains("preset")) cfg.initial.preset = get_str(ji["preset"], "initial.preset");
    if (ji.contains("r0")) cfg.initial.r0 = get_num(ji["r0"], "initial.r0");
    if (ji.contains("s")) cfg.initial.s = get_num(ji["s"], "initial.s");
    if (ji.contains("eps")) cfg.initial.eps = get_num(ji["eps"], "initial.eps");
    if (ji.contains("fbar")) cfg.initial.fbar = parse_fbar(ji["fbar"], "initial.fbar");
    if (ji.contains("coeffs")) {
      if (!ji["coeffs"].is_array()) fail("initial.coeffs", "expected an array of numbers");
      cfg.initial.coeffs.clear();
      int idx = 0;
      for (const auto& x : ji["coeffs"])
        cfg.initial.coeffs.push_back(
            get_num(x, "initial.coeffs[" + std::to_string(idx++) + "]"));
    }
  }

  if (j.contains("flow")) {
    const auto& jf = j["flow"];
    check_keys(jf, "flow",
               {"t_final", "cadence", "dt_max", "c_stab", "tail_tol", "max_rejects"});
    if (jf.contains("t_final")) cfg.t_final = get_num(jf["t_final"], "flow.t_final");
    if (jf.contains("cadence")) cfg.flow.cadence = get_num(jf["cadence"], "flow.cadence");
    if (jf.contains("dt_max")) cfg.flow.dt_max = get_num(jf["dt_max"], "flow.dt_max");
    if (jf.contains("c_stab")) cfg.flow.c_stab = get_num(jf["c_stab"], "flow.c_stab");
    if (jf.contains("tail_tol")) cfg.flow.tail_tol = get_num(jf["tail_tol"], "flow.tail_tol");
    if (jf.contains("max_rejects"))
      cfg.flow.max_rejects = get_int(jf["max_rejects"], "flow.max_rejects");
  }

  if (j.contains("certify")) {
    const auto& jc = j["certify"];
    check_keys(jc, "certify",
               {"s0", "t_final", "probe_t", "c0_floor", "tail_frac", "slope_band",
                "profile_tol", "force"});
    if (jc.contains("s0")) cfg.s0 = get_num(jc["s0"], "certify.s0");
    if (jc.contains("t_final"))
      cfg.certify_t_final = get_num(jc["t_final"], "certify.t_final");
    if (jc.contains("probe_t")) cfg.probe_t = get_num(jc["probe_t"], "certify.probe_t");
    if (jc.contains("c0_floor")) cfg.c0_floor = get_num(jc["c0_floor"], "certify.c0_floor");
    if (jc.contains("tail_frac")) cfg.tail_frac = get_num(jc["tail_frac"], "certify.tail_frac");
    if (jc.contains("slope_band"))
      cfg.slope_band = get_num(jc["slope_band"], "certify.slope_band");
    if (jc.contains("profile_tol"))
      cfg.profile_tol = get_num(jc["profile_tol"], "certify.profile_tol");
    if (jc.contains("force")) cfg.force = get_bool(jc["force"], "certify.force");
  }

  if (j.contains("thresholds")) {
    const auto& jt = j["thresholds"];
    check_keys(jt, "thresholds", {"rho_round", "rho_nonround"});
    if (jt.contains("rho_round"))
      cfg.thresholds.rho_round = get_num(jt["rho_round"], "thresholds.rho_round");
    if (jt.contains("rho_nonround"))
      cfg.thresholds.rho_nonround = get_num(jt["rho_nonround"], "thresholds.rho_nonround");
  }

  if (j.contains("verify")) {
    const auto& jv = j["verify"];
    check_keys(jv, "verify", {"refine", "max_residual"});
    if (jv.contains("refine")) cfg.verify.refine = get_bool(jv["refine"], "verify.refine");
    if (jv.contains("max_residual"))
      cfg.verify.max_residual = get_num(jv["max_residual"], "verify.max_residual");
  }

  if (j.contains("output_dir")) cfg.output_dir = get_str(j["output_dir"], "output_dir");

  validate_config(cfg);
  return cfg;
}

void validate_config(const RunConfig& cfg) {
  static const std::set<std::string> commands = {"report", "flow", "certify", "verify",
                                                 "ball-model"};
  if (!commands.count(cfg.command))
    fail("command", "must be one of report, flow, certify, verify, ball-model");
  if (cfg.n < 3) fail("n", "dimension must be at least 3");
  if (cfg.mode == GridMode::Full2D && cfg.n != 3)
    fail("mode", "full2d is only available for n = 3; use polar");
  if (cfg.L != 0 && cfg.L < 2) fail("L", "band limit must be at least 2");
  static const std::set<std::string> presets = {"sphere", "p2", "fbar", "coefficients"};
  if (!presets.count(cfg.initial.preset))
    fail("initial.preset", "must be one of sphere, p2, fbar, coefficients");
  if (cfg.initial.preset == "sphere" && !(cfg.initial.r0 > 0.0))
    fail("initial.r0", "radius must be positive");
  if (cfg.initial.preset == "coefficients" && cfg.initial.coeffs.empty())
    fail("initial.coeffs", "coefficient preset needs a non-empty list");
  if (!(cfg.t_final > 0.0)) fail("flow.t_final", "must be positive");
  if (!(cfg.flow.cadence > 0.0)) fail("flow.cadence", "must be positive");
  if (!(cfg.flow.dt_max > 0.0)) fail("flow.dt_max", "must be positive");
  if (!(cfg.flow.c_stab > 0.0)) fail("flow.c_stab", "must be positive");
  if (!(cfg.flow.tail_tol > 0.0)) fail("flow.tail_tol", "must be positive");
  if (cfg.flow.max_rejects < 0) fail("flow.max_rejects", "must be non-negative");
  if (!(cfg.s0 > 0.0)) fail("certify.s0", "must be positive");
  if (cfg.certify_t_final != 0.0 && !(cfg.certify_t_final > 0.0))
    fail("certify.t_final", "must be positive (or 0 for the default)");
  if (!(cfg.probe_t > 0.0)) fail("certify.probe_t", "must be positive");
  if (!(cfg.tail_frac > 0.0)) fail("certify.tail_frac", "must be positive");
  if (!(cfg.slope_band > 0.0) || cfg.slope_band >= 1.0)
    fail("certify.slope_band", "must lie in (0, 1)");
  if (!(cfg.profile_tol > 0.0)) fail("certify.profile_tol", "must be positive");
  if (!(cfg.thresholds.rho_round > 0.0) ||
      !(cfg.thresholds.rho_nonround > cfg.thresholds.rho_round))
    fail("thresholds", "need 0 < rho_round < rho_nonround");
  if (!(cfg.verify.max_residual > 0.0)) fail("verify.max_residual", "must be positive");
  if (cfg.output_dir.empty()) fail("output_dir", "must not be empty");
}

int resolved_band_limit(const RunConfig& cfg) {
  if (cfg.L != 0) return cfg.L;
  return cfg.mode == GridMode::Full2D ? 32 : 170;
}

double resolved_certify_t_final(const RunConfig& cfg) {
  if (cfg.certify_t_final != 0.0) return cfg.certify_t_final;
  return cfg.n == 3 ? 10.0 : 12.0;
}

GridPtr config_grid(const RunConfig& cfg) {
  return SphereGrid::create(cfg.n, cfg.mode, resolved_band_limit(cfg));
}

GraphSurface build_initial(const RunConfig& cfg, const GridPtr& grid) {
  const InitialSpec& in = cfg.initial;
  if (in.preset == "sphere") return GraphSurface::sphere(grid, in.r0);
  if (in.preset == "p2") {
    SphereField r(grid);
    const SphereGrid& g = *grid;
    for (int k = 0; k < g.nlat; ++k) {
      const double p2 = 0.5 * (3.0 * g.ct[k] * g.ct[k] - 1.0);
      for (int j = 0; j < g.nlon; ++j) r.v[g.node(k, j)] = in.s + in.eps * p2;
    }
    return GraphSurface(grid, std::move(r));
  }
  if (in.preset == "fbar") return construct_initial(grid, in.fbar, in.s);
  // coefficients
  if (static_cast<int>(in.coeffs.size()) != grid->ncoef())
    throw ConfigError("initial.coeffs: expected " + std::to_string(grid->ncoef()) +
                      " entries for this grid, got " + std::to_string(in.coeffs.size()));
  HarmonicCoeffs c(grid);
  c.a = in.coeffs;
  return GraphSurface::from_coeffs(grid, c);
}

CertifySetup config_setup(const RunConfig& cfg) {
  CertifySetup s;
  s.n = cfg.n;
  s.mode = cfg.mode;
  s.L = resolved_band_limit(cfg);
  s.flow = cfg.flow;
  s.roundness = cfg.thresholds;
  s.probe_t = cfg.probe_t;
  s.c0_floor = cfg.c0_floor;
  s.tail_frac = cfg.tail_frac;
  s.slope_band = cfg.slope_band;
  s.profile_tol = cfg.profile_tol;
  return s;
}

std::string config_to_json(const RunConfig& cfg) {
  ordered_json j;
  j["command"] = cfg.command;
  j["n"] = cfg.n;
  j["mode"] = cfg.mode == GridMode::Full2D ? "full2d" : "polar";
  j["L"] = resolved_band_limit(cfg);
  ordered_json ji;
  ji["preset"] = cfg.initial.preset;
  ji["r0"] = cfg.initial.r0;
  ji["s"] = cfg.initial.s;
  ji["eps"] = cfg.initial.eps;
  ordered_json fb;
  fb["constant"] = cfg.initial.fbar.constant;
  ordered_json terms = ordered_json::array();
  for (const FbarTerm& t : cfg.initial.fbar.terms)
    terms.push_back(ordered_json{{"kind", t.kind}, {"degree", t.degree}, {"amp", t.amp}});
  fb["terms"] = std::move(terms);
  ji["fbar"] = std::move(fb);
  ji["coeffs"] = cfg.initial.coeffs;
  j["initial"] = std::move(ji);
  ordered_json jf;
  jf["t_final"] = cfg.t_final;
  jf["cadence"] = cfg.flow.cadence;
  jf["dt_max"] = cfg.flow.dt_max;
  jf["c_stab"] = cfg.flow.c_stab;
  jf["tail_tol"] = cfg.flow.tail_tol;
  jf["max_rejects"] = cfg.flow.max_rejects;
  j["flow"] = std::move(jf);
  ordered_json jc;
  jc["s0"] = cfg.s0;
  jc["t_final"] = resolved_certify_t_final(cfg);
  jc["probe_t"] = cfg.probe_t;
  jc["c0_floor"] = cfg.c0_floor;
  jc["tail_frac"] = cfg.tail_frac;
  jc["slope_band"] = cfg.slope_band;
  jc["profile_tol"] = cfg.profile_tol;
  jc["force"] = cfg.force;
  j["certify"] = std::move(jc);
  ordered_json jt;
  jt["rho_round"] = cfg.thresholds.rho_round;
  jt["rho_nonround"] = cfg.thresholds.rho_nonround;
  j["thresholds"] = std::move(jt);
  ordered_json jv;
  jv["refine"] = cfg.verify.refine;
  jv["max_residual"] = cfg.verify.max_residual;
  j["verify"] = std::move(jv);
  j["output_dir"] = cfg.output_dir;
  return j.dump(2) + "\n";
}

}  // namespace imcf
