// Acceptance battery: one line per criterion, [PASS]/[FAIL] with the measured
// quantities and wall time.  Exit code 0 only when every criterion holds.
// Thresholds and runtime budgets are intentionally hard-coded.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "imcf/calculus.hpp"
#include "imcf/certify.hpp"
#include "imcf/flow.hpp"
#include "imcf/geometry.hpp"
#include "imcf/roundness.hpp"
#include "imcf/surface.hpp"
#include "test_util.hpp"

using namespace imcf;
using namespace testutil;
using Clock = std::chrono::steady_clock;

namespace {

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof(buf), f, ap);
  va_end(ap);
  return buf;
}

GraphSurface p2_initial(const GridPtr& g, double s, double eps) {
  SphereField r(g);
  for (int k = 0; k < g->nlat; ++k) {
    const double p2 = 0.5 * (3.0 * g->ct[k] * g->ct[k] - 1.0);
    for (int j = 0; j < g->nlon; ++j) r.v[g->node(k, j)] = s + eps * p2;
  }
  return GraphSurface(g, r);
}

struct ResidualMax {
  double mono = 0.0, hev = 0.0, aring = 0.0;
};

ResidualMax interior_maxima(const FlowTrace& tr) {
  ResidualMax m;
  for (size_t k = 1; k + 1 < tr.samples.size(); ++k) {
    if (tr.n == 3) m.mono = std::max(m.mono, tr.samples[k].mono_residual);
    m.hev = std::max(m.hev, tr.samples[k].hev_residual);
    m.aring = std::max(m.aring, tr.samples[k].aring_residual);
  }
  return m;
}

// Shared state between criteria: later checks reuse earlier flows.
struct Context {
  FlowTrace mono_coarse;  // criterion 3, L = 32 default controls
  FlowTrace mono_fine;    // criterion 3, L = 64 halved cadence/dt
  bool has_mono = false;

  CertificationReport theorem1;  // criterion 7 full pipeline
  bool has_theorem1 = false;

  double c0_oracle = 0.0;
};

using Criterion = std::function<bool(Context&, std::string&)>;

bool crit1_umbilic(Context&, std::string& detail) {
  const GridPtr g = SphereGrid::create(3, GridMode::Full2D, 32);
  GeometryReport rep = geometry_report(GraphSurface::sphere(g, 1.0));
  const double Href = 2.0 / std::tanh(1.0);
  const double Aref = 4.0 * M_PI * std::pow(std::sinh(1.0), 2);
  const double eH = std::max(std::abs(rep.minH - Href), std::abs(rep.maxH - Href));
  const double eA = std::abs(rep.area - Aref) / Aref;
  detail = fmt("|H-2coth1|=%.2e darea=%.2e |mH|=%.2e |mt|=%.2e", eH, eA,
               std::abs(rep.hawking), std::abs(rep.modified));
  return eH < 1e-8 && eA < 1e-8 && std::abs(rep.hawking) < 1e-8 &&
         std::abs(rep.modified) < 1e-8;
}

bool crit2_area_law(Context&, std::string& detail) {
  const GridPtr g = SphereGrid::create(3, GridMode::Full2D, 32);
  FlowTrace tr = run(GraphSurface::sphere(g, 1.0), 2.0);
  double worst = 0.0;
  for (const FlowSample& s : tr.samples)
    worst = std::max(worst,
                     std::abs(s.area / tr.samples[0].area - std::exp(s.t)) / std::exp(s.t));
  detail = fmt("max |area ratio - e^t|/e^t = %.2e over %zu samples", worst,
               tr.samples.size());
  return worst < 1e-4;
}

bool crit3_monotonicity(Context& ctx, std::string& detail) {
  const GridPtr gc = SphereGrid::create(3, GridMode::Full2D, 32);
  ctx.mono_coarse = run(p2_initial(gc, 3.0, 0.15), 4.0);

  bool monotone = true;
  for (size_t k = 1; k < ctx.mono_coarse.samples.size(); ++k)
    monotone = monotone &&
               ctx.mono_coarse.samples[k].mtilde >= ctx.mono_coarse.samples[k - 1].mtilde;
  const double coarse = interior_maxima(ctx.mono_coarse).mono;

  const GridPtr gf = SphereGrid::create(3, GridMode::Full2D, 64);
  FlowControls fine_controls;
  fine_controls.cadence /= 2.0;
  fine_controls.dt_max /= 2.0;
  ctx.mono_fine = run(p2_initial(gf, 3.0, 0.15), 4.0, fine_controls);
  const double fine = interior_maxima(ctx.mono_fine).mono;
  ctx.has_mono = true;

  detail = fmt("monotone=%d mono_rel: coarse=%.2e fine=%.2e ratio=%.2f", (int)monotone,
               coarse, fine, fine / coarse);
  return monotone && coarse < 5e-2 && fine <= 0.5 * coarse;
}

bool crit4_evolution_identities(Context& ctx, std::string& detail) {
  if (!ctx.has_mono) {
    detail = "prerequisite flow from criterion 3 unavailable";
    return false;
  }
  const ResidualMax c3 = interior_maxima(ctx.mono_coarse);
  const ResidualMax f3 = interior_maxima(ctx.mono_fine);

  const GridPtr g4 = SphereGrid::create(4, GridMode::Polar, 170);
  FlowTrace tr4 = run(p2_initial(g4, 3.0, 0.15), 4.0);
  const ResidualMax c4 = interior_maxima(tr4);

  // Both monitors are sup-norms of a centered difference across the sample
  // cadence, so their leading error term is second order in the cadence; the
  // colatitude discretization is spectral and already saturated at the
  // default band limit for these smooth surfaces.  Raising the band limit
  // further only lifts the pole-adjacent roundoff floor that a sup-norm
  // reports (coefficient noise sums coherently at the poles), so the polar
  // refinement sharpens the time sampling at the default band limit.  The
  // full2d n = 3 pair above doubles the band limit as well, which shows the
  // spatial floor stays below the time-sampling error there.
  FlowControls fine_controls;
  fine_controls.cadence /= 2.0;
  fine_controls.dt_max /= 2.0;
  FlowTrace tr4f = run(p2_initial(g4, 3.0, 0.15), 4.0, fine_controls);
  const ResidualMax f4 = interior_maxima(tr4f);

  detail = fmt("n3 hev=%.2e aring=%.2e (refined %.2f/%.2f)  n4 hev=%.2e aring=%.2e "
               "(refined %.2f/%.2f)",
               c3.hev, c3.aring, f3.hev / c3.hev, f3.aring / c3.aring, c4.hev, c4.aring,
               f4.hev / c4.hev, f4.aring / c4.aring);
  return c3.hev < 5e-2 && c3.aring < 5e-2 && c4.hev < 5e-2 && c4.aring < 5e-2 &&
         f3.hev <= 0.5 * c3.hev && f3.aring <= 0.5 * c3.aring && f4.hev <= 0.5 * c4.hev &&
         f4.aring <= 0.5 * c4.aring;
}

bool crit5_limit_functional(Context& ctx, std::string& detail) {
  ctx.c0_oracle = limit_functional_oracle(3, ZonalPoly{1.0, {{2, 0.1}}});
  const GridPtr g = SphereGrid::create(3, GridMode::Full2D, 32);
  FbarSpec spec;
  spec.terms.push_back({"p2", 2, 0.1});

  double prev = -1e300;
  bool monotone = true;
  double m10 = 0.0;
  for (double s : {4.0, 6.0, 8.0, 10.0}) {
    const double m = geometry_report(construct_initial(g, spec, s)).modified;
    monotone = monotone && m > prev;
    prev = m;
    if (s == 10.0) m10 = m;
  }
  const double gap = std::abs(m10 + ctx.c0_oracle) / ctx.c0_oracle;
  detail = fmt("c0=%.6f |mt(10)+c0|/c0=%.2e monotone=%d", ctx.c0_oracle, gap, (int)monotone);
  return gap < 2e-2 && monotone;
}

bool crit6_dichotomy(Context&, std::string& detail) {
  const GridPtr g = SphereGrid::create(3, GridMode::Full2D, 32);
  std::mt19937 rng(20260814u);
  auto unif = [&](double lo, double hi) {
    const double u = ((rng() >> 5) * 67108864.0 + (rng() >> 6)) * (1.0 / 9007199254740992.0);
    return lo + (hi - lo) * u;
  };

  double span_rho = 0.0, span_L = 0.0, span_kv = 0.0;
  double p2_rho = 1e300, p2_L = 1e300, p2_kv = 1e300;
  for (int trial = 0; trial < 10; ++trial) {
    const double a1 = unif(-0.3, 0.3), a2 = unif(-0.3, 0.3), a3 = unif(-0.3, 0.3);
    SphereField f(g);
    for (int k = 0; k < g->nlat; ++k)
      for (int j = 0; j < g->nlon; ++j) {
        const double w = 1.0 + a1 * g->st[k] * std::cos(g->lam[j]) +
                         a2 * g->st[k] * std::sin(g->lam[j]) + a3 * g->ct[k];
        f.v[g->node(k, j)] = -std::log(w);
      }
    RoundnessResidual rr = roundness_residual(f);
    span_rho = std::max(span_rho, rr.rho_proj);
    span_kv = std::max(span_kv, rr.k_variation);
    span_L = std::max(span_L, limit_functional(f));
  }
  for (int trial = 0; trial < 10; ++trial) {
    const double c2 = unif(0.05, 0.25), a3 = unif(-0.2, 0.2);
    SphereField f(g);
    for (int k = 0; k < g->nlat; ++k)
      for (int j = 0; j < g->nlon; ++j) {
        const double x = g->ct[k];
        const double w = 1.0 + a3 * x + c2 * 0.5 * (3.0 * x * x - 1.0);
        f.v[g->node(k, j)] = -std::log(w);
      }
    RoundnessResidual rr = roundness_residual(f);
    p2_rho = std::min(p2_rho, rr.rho_proj);
    p2_kv = std::min(p2_kv, rr.k_variation);
    p2_L = std::min(p2_L, limit_functional(f));
  }
  detail = fmt("span max: rho=%.1e L=%.1e kv=%.1e | P2 min: rho=%.1e L=%.1e kv=%.1e",
               span_rho, span_L, span_kv, p2_rho, p2_L, p2_kv);
  return span_rho < 1e-6 && span_L < 1e-8 && span_kv < 1e-5 && p2_rho > 1e-3 &&
         p2_L > 1e-3 && p2_kv > 1e-3;
}

bool crit7_theorem1(Context& ctx, std::string& detail) {
  FbarSpec spec;
  spec.terms.push_back({"p2", 2, 0.1});
  CertifySetup setup;  // n = 3, full2d, L = 32

  CertificationReport pre = certify_s0(spec, 8.0, setup);
  if (!pre.certified) {
    detail = "s0 = 8 failed pre-certification: " + pre.failure;
    return false;
  }
  ctx.theorem1 = run_and_certify(spec, 8.0, 10.0, setup);
  ctx.has_theorem1 = true;
  const CertificationReport& r = ctx.theorem1;

  FbarSpec neg;
  neg.terms.push_back({"x1", 1, 0.3});
  CertificationReport nc = certify_s0(neg, 8.0, setup);
  const bool neg_ok = !nc.certified && nc.failure == "condition-2-initial-gap";

  detail = fmt("limit=%.4f -c0/4=%.4f rho=%.3f verdict=%s negcontrol=%s", r.limit_estimate,
               -0.25 * r.c0, r.roundness.rho_proj, verdict_name(r.roundness.verdict),
               neg_ok ? "rejected" : "NOT rejected");
  return r.certified && r.limit_estimate < -0.25 * r.c0 &&
         r.roundness.verdict == Verdict::NonRound && r.roundness.rho_proj > 1e-2 && neg_ok;
}

bool crit8_pinching(Context& ctx, std::string& detail) {
  if (!ctx.has_theorem1 || !ctx.theorem1.has_trace) {
    detail = "prerequisite run from criterion 7 unavailable";
    return false;
  }
  PinchFit pf = pinching_diagnostics(ctx.theorem1.trace);
  detail = fmt("slope1=%.4f slope2=%.4f", pf.slope1, pf.slope2);
  return pf.slope1 > -1.3 && pf.slope1 < -0.7 && pf.slope2 > -3.3 && pf.slope2 < -2.7;
}

bool crit9_ball_model(Context& ctx, std::string& detail) {
  // rho approaches 2 exponentially, so past r ~ 12 the quantity 2 - rho is
  // itself below double resolution relative to rho; test where representable.
  double worst_rt = 0.0;
  for (double r = 0.05; r < 10.0; r += 0.35)
    worst_rt = std::max(worst_rt,
                        std::abs(ball_model_radius_inv(ball_model_radius(r)) - r) / r);
  if (!ctx.has_theorem1) {
    detail = "prerequisite run from criterion 7 unavailable";
    return false;
  }
  const double gap = ctx.theorem1.ball_gap;
  detail = fmt("roundtrip=%.2e gap(t=10)=%.2e", worst_rt, gap);
  return worst_rt < 1e-12 && gap < 1e-2;
}

bool crit10_highdim(Context&, std::string& detail) {
  FbarSpec spec;
  spec.terms.push_back({"p2", 2, 0.1});
  CertifySetup setup;
  setup.L = 170;
  CertificationReport r = highdim_construct_and_certify(4, spec, 8.0, 12.0, setup);
  const double slope_ref = -2.0 / 3.0;
  const bool slope_ok = std::abs(r.drift.slope - slope_ref) < 0.3 * std::abs(slope_ref);
  detail = fmt("c0=%.4f limit=%.4f slope=%.4f verdict=%s", r.c0, r.limit_estimate,
               r.drift.slope, verdict_name(r.roundness.verdict));
  return r.certified && r.c0 > 0.0 && r.limit_estimate > 0.25 * r.c0 && slope_ok &&
         r.roundness.verdict == Verdict::NonRound;
}

}  // namespace

int main() {
  struct Entry {
    int id;
    const char* label;
    double budget_s;
    Criterion fn;
  };
  const std::vector<Entry> entries = {
      {1, "umbilic baseline", 1.0, crit1_umbilic},
      {2, "exponential area law", 10.0, crit2_area_law},
      {3, "modified-mass monotonicity", 120.0, crit3_monotonicity},
      {4, "evolution identities", 180.0, crit4_evolution_identities},
      {5, "limit functional vs geometry", 30.0, crit5_limit_functional},
      {6, "roundness dichotomy battery", 30.0, crit6_dichotomy},
      {7, "counterexample pipeline", 600.0, crit7_theorem1},
      {8, "pinching decay slopes", 600.0, crit8_pinching},
      {9, "ball model", 600.0, crit9_ball_model},
      {10, "higher-dimensional pipeline", 300.0, crit10_highdim},
  };

  Context ctx;
  bool all_ok = true;
  for (const Entry& e : entries) {
    std::string detail;
    bool ok = false;
    const auto t0 = Clock::now();
    try {
      ok = e.fn(ctx, detail);
    } catch (const std::exception& ex) {
      detail = std::string("exception: ") + ex.what();
      ok = false;
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    if (secs > e.budget_s) {
      ok = false;
      detail += fmt("  [over budget %.0fs]", e.budget_s);
    }
    std::printf("[%s] criterion %2d: %-32s (%7.2f s)  %s\n", ok ? "PASS" : "FAIL", e.id,
                e.label, secs, detail.c_str());
    all_ok = all_ok && ok;
  }
  return all_ok ? 0 : 1;
}
