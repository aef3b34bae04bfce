#include "imcf/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "imcf/errors.hpp"
#include <json.hpp>

namespace imcf {

using ordered_json = nlohmann::ordered_json;

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

const char* mode_name(GridMode m) { return m == GridMode::Full2D ? "full2d" : "polar"; }

ordered_json field_header(const SphereGrid& g) {
  ordered_json h;
  h["n"] = g.n;
  h["L"] = g.L;
  h["mode"] = mode_name(g.mode);
  h["nlat"] = g.nlat;
  h["nlon"] = g.nlon;
  h["layout"] = "lat-major";
  return h;
}

ordered_json condition_to_json(const ConditionCheck& c) {
  ordered_json j;
  j["name"] = c.name;
  j["passed"] = c.passed;
  j["value"] = c.value;
  j["threshold"] = c.threshold;
  j["detail"] = c.detail;
  return j;
}

}  // namespace

std::string field_to_text(const SphereField& f) {
  const SphereGrid& g = *f.grid;
  std::string out = field_header(g).dump();
  out += '\n';
  for (int k = 0; k < g.nlat; ++k) {
    for (int j = 0; j < g.nlon; ++j) {
      if (j) out += ',';
      out += fmt17(f.v[g.node(k, j)]);
    }
    out += '\n';
  }
  return out;
}

SphereField field_from_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("field file: empty");
  ordered_json h;
  try {
    h = ordered_json::parse(line);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("field file header: ") + e.what());
  }
  for (const char* key : {"n", "L", "mode"})
    if (!h.contains(key)) throw ConfigError(std::string("field file header: missing ") + key);
  const std::string mode = h["mode"].get<std::string>();
  if (mode != "full2d" && mode != "polar")
    throw ConfigError("field file header: mode must be full2d or polar");
  GridPtr grid = SphereGrid::create(h["n"].get<int>(),
                                    mode == "full2d" ? GridMode::Full2D : GridMode::Polar,
                                    h["L"].get<int>());
  SphereField f(grid);
  int k = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (k >= grid->nlat) throw ConfigError("field file: more rows than latitudes");
    std::istringstream row(line);
    std::string cell;
    int j = 0;
    while (std::getline(row, cell, ',')) {
      if (j >= grid->nlon) throw ConfigError("field file: row too long");
      f.v[grid->node(k, j)] = std::stod(cell);
      ++j;
    }
    if (j != grid->nlon) throw ConfigError("field file: row too short");
    ++k;
  }
  if (k != grid->nlat) throw ConfigError("field file: fewer rows than latitudes");
  return f;
}

std::string coeffs_to_json(const HarmonicCoeffs& c) {
  const SphereGrid& g = *c.grid;
  ordered_json j;
  j["n"] = g.n;
  j["L"] = g.L;
  j["mode"] = mode_name(g.mode);
  ordered_json entries = ordered_json::array();
  if (g.mode == GridMode::Polar) {
    for (int l = 0; l <= g.L; ++l)
      entries.push_back(ordered_json{{"l", l}, {"m", 0}, {"a", c.a[l]}});
  } else {
    for (int l = 0; l <= g.L; ++l)
      for (int m = -l; m <= l; ++m)
        entries.push_back(
            ordered_json{{"l", l}, {"m", m}, {"a", c.a[SphereGrid::coef_index(l, m)]}});
  }
  j["coefficients"] = std::move(entries);
  return j.dump(2) + "\n";
}

std::string trace_to_csv(const FlowTrace& tr) {
  std::string out =
      "t,area,mH,mtilde,Q,minH,maxH,mono_residual,hev_residual,aring_residual,"
      "pinch1,pinch2\n";
  for (const FlowSample& s : tr.samples) {
    out += fmt17(s.t);
    for (double x : {s.area, s.mH, s.mtilde, s.Q, s.minH, s.maxH, s.mono_residual,
                     s.hev_residual, s.aring_residual, s.pinch1, s.pinch2}) {
      out += ',';
      out += fmt17(x);
    }
    out += '\n';
  }
  return out;
}

std::string geometry_report_to_json(const GeometryReport& rep) {
  ordered_json j;
  j["n"] = rep.n;
  j["area"] = rep.area;
  j["hawking_mass"] = rep.hawking;
  j["modified_mass"] = rep.modified;
  j["Q"] = rep.q;
  j["minH"] = rep.minH;
  j["maxH"] = rep.maxH;
  j["mean_convex"] = rep.mean_convex;
  j["int_aring2"] = rep.int_aring2;
  j["int_h2_minus_4"] = rep.int_h2m4;
  j["int_gradh2_over_h2"] = rep.int_gradh2_over_h2;
  j["drift_rhs"] = rep.drift_rhs;
  j["sup_h_gap"] = rep.sup_h_gap;
  j["sup_grad_a2"] = rep.sup_grad_a2;
  j["aring_crosscheck"] = rep.aring_crosscheck;
  return j.dump(2) + "\n";
}

std::string roundness_report_to_json(const RoundnessReport& rep) {
  ordered_json j;
  j["n"] = rep.n;
  j["verdict"] = verdict_name(rep.verdict);
  j["rho_proj"] = rep.rho_proj;
  j["k_variation"] = rep.k_variation;
  j["limit_functional"] = rep.limit_value;
  ordered_json proj;
  proj["a0"] = rep.proj.a0;
  proj["ai"] = rep.proj.ai;
  j["projection"] = std::move(proj);
  return j.dump(2) + "\n";
}

std::string certification_report_to_json(const CertificationReport& rep) {
  ordered_json j;
  j["n"] = rep.n;
  j["certified"] = rep.certified;
  j["summary"] = rep.summary;
  j["method"] = rep.method;
  if (!rep.failure.empty()) j["failure"] = rep.failure;
  ordered_json fb;
  fb["constant"] = rep.fbar.constant;
  ordered_json terms = ordered_json::array();
  for (const FbarTerm& t : rep.fbar.terms)
    terms.push_back(ordered_json{{"kind", t.kind}, {"degree", t.degree}, {"amp", t.amp}});
  fb["terms"] = std::move(terms);
  j["fbar"] = std::move(fb);
  j["c0"] = rep.c0;
  j["s0"] = rep.s0;
  j["t_final"] = rep.t_final;
  ordered_json conds = ordered_json::array();
  for (const ConditionCheck& c : rep.conditions) conds.push_back(condition_to_json(c));
  j["conditions"] = std::move(conds);
  ordered_json dr;
  dr["slope"] = rep.drift.slope;
  dr["prefactor"] = rep.drift.C;
  dr["tail_hat"] = rep.drift.tail_hat;
  dr["t_end"] = rep.drift.t_end;
  dr["nsamples"] = rep.drift.nsamples;
  j["drift_fit"] = std::move(dr);
  if (rep.has_pinch) {
    ordered_json p;
    p["slope1"] = rep.pinch.slope1;
    p["C1"] = rep.pinch.C1;
    p["slope2"] = rep.pinch.slope2;
    p["C2"] = rep.pinch.C2;
    p["nsamples"] = rep.pinch.nsamples;
    j["pinching_fit"] = std::move(p);
  }
  j["initial_value"] = rep.initial_value;
  j["final_value"] = rep.final_value;
  j["tail_bound"] = rep.tail_bound;
  j["limit_estimate"] = rep.limit_estimate;
  j["certification_margin"] = rep.certification_margin;
  j["revalidation_gap"] = rep.revalidation_gap;
  if (rep.has_roundness) {
    ordered_json r;
    r["verdict"] = verdict_name(rep.roundness.verdict);
    r["rho_proj"] = rep.roundness.rho_proj;
    r["k_variation"] = rep.roundness.k_variation;
    r["limit_functional"] = rep.roundness.limit_value;
    j["roundness"] = std::move(r);
    if (rep.n == 3) j["ball_model_gap"] = rep.ball_gap;
  }
  return j.dump(2) + "\n";
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open for writing: " + path);
  out << content;
  if (!out) throw ConfigError("write failed: " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace imcf
