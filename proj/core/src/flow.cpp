#include "imcf/flow.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "imcf/errors.hpp"

namespace imcf {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kTimeEps = 1e-12;

// Radial speed v/H of the graph flow at every node, along with the
// quantities the stepper needs to police itself.
struct SpeedEval {
  HarmonicCoeffs rhs;    // full flow-grid coefficients of v/H
  double minH = std::numeric_limits<double>::infinity();
  double theta_min = 0.0, lambda_min = 0.0;  // node realizing minH
  double heur = std::numeric_limits<double>::infinity();  // min H sinh^2 r / v
  double max_speed = 0.0;
};

SpeedEval eval_speed(const HarmonicCoeffs& a, double t) {
  const SphereGrid& g = *a.grid;
  const FieldJet jet = synthesis(a, 2);
  SphereField w(a.grid);
  SpeedEval ev;
  const bool full = g.mode == GridMode::Full2D;
  const int n = g.n;
  for (int k = 0; k < g.nlat; ++k) {
    const double s_ = g.st[k], c_ = g.ct[k];
    const double s2 = s_ * s_;
    for (int j = 0; j < g.nlon; ++j) {
      const int i = g.node(k, j);
      const double r = jet.u.v[i];
      if (!(r > 0.0) || !std::isfinite(r))
        throw FlowBreakdown(t, g.theta[k], full ? g.lam[j] : 0.0, kNaN,
                            "flow breakdown: radius left (0, inf)");
      const double S = std::sinh(r), C = std::cosh(r);
      const double F1 = 1.0 / S, F2 = -C / (S * S);
      double v, H;
      if (full) {
        const double rt = jet.ut.v[i], rl = jet.ul.v[i];
        const double pt = F1 * rt, pl = F1 * rl;
        const double ptt = F2 * rt * rt + F1 * jet.utt.v[i];
        const double ptl = F2 * rt * rl + F1 * jet.utl.v[i];
        const double pll = F2 * rl * rl + F1 * jet.ull.v[i];
        const double Pc_tt = ptt;
        const double Pc_tl = ptl - (c_ / s_) * pl;
        const double Pc_ll = pll + s_ * c_ * pt;
        const double v2 = 1.0 + pt * pt + pl * pl / s2;
        v = std::sqrt(v2);
        const double M_tt = 1.0 + pt * pt, M_tl = pt * pl, M_ll = s2 + pl * pl;
        const double det = M_tt * M_ll - M_tl * M_tl;
        // mixed trace g^{ij} h_ij with the sinh^2 factors cancelled
        const double gi_tt = M_ll / det, gi_tl = -M_tl / det, gi_ll = M_tt / det;
        const double h_tt = C * M_tt - Pc_tt;
        const double h_tl = C * M_tl - Pc_tl;
        const double h_ll = C * M_ll - Pc_ll;
        H = (gi_tt * h_tt + 2.0 * gi_tl * h_tl + gi_ll * h_ll) / (v * S);
      } else {
        const double rt = jet.ut.v[i];
        const double pt = F1 * rt;
        const double ptt = F2 * rt * rt + F1 * jet.utt.v[i];
        const double v2 = 1.0 + pt * pt;
        v = std::sqrt(v2);
        const double h_rad = C / (v * S) - ptt / (v * S * v2);
        const double h_tan = C / (v * S) - (c_ / s_) * pt / (v * S);
        H = h_rad + (n - 2) * h_tan;
      }
      if (!(H > 0.0)) {
        throw FlowBreakdown(t, g.theta[k], full ? g.lam[j] : 0.0, H,
                            "flow breakdown: mean curvature is not positive");
      }
      w.v[i] = v / H;
      ev.max_speed = std::max(ev.max_speed, w.v[i]);
      if (H < ev.minH) {
        ev.minH = H;
        ev.theta_min = g.theta[k];
        ev.lambda_min = full ? g.lam[j] : 0.0;
      }
      ev.heur = std::min(ev.heur, H * S * S / v);
    }
  }
  ev.rhs = analysis(w);
  return ev;
}

struct RkOutcome {
  HarmonicCoeffs a_new;  // untruncated combination on the flow grid
  double tail = 0.0;     // energy fraction above L_work
};

RkOutcome rk4_step(const HarmonicCoeffs& a, double t, double dt, int L_work,
                   const SpeedEval* k1_hint) {
  const auto axpy = [](const HarmonicCoeffs& base, double h, const HarmonicCoeffs& dir) {
    HarmonicCoeffs out = base;
    for (size_t i = 0; i < out.a.size(); ++i) out.a[i] += h * dir.a[i];
    return out;
  };
  const SpeedEval k1o = k1_hint ? *k1_hint : eval_speed(a, t);
  const HarmonicCoeffs& k1 = k1o.rhs;
  const HarmonicCoeffs k2 = eval_speed(axpy(a, 0.5 * dt, k1), t + 0.5 * dt).rhs;
  const HarmonicCoeffs k3 = eval_speed(axpy(a, 0.5 * dt, k2), t + 0.5 * dt).rhs;
  const HarmonicCoeffs k4 = eval_speed(axpy(a, dt, k3), t + dt).rhs;
  RkOutcome out;
  out.a_new = a;
  for (size_t i = 0; i < a.a.size(); ++i)
    out.a_new.a[i] += (dt / 6.0) * (k1.a[i] + 2.0 * k2.a[i] + 2.0 * k3.a[i] + k4.a[i]);
  out.tail = tail_fraction(out.a_new, L_work);
  return out;
}

// Throws StepRejected if the proposed radius is unusable.
void check_radius(const HarmonicCoeffs& a_new, double r_max_old, double t, double dt,
                  double tail) {
  const SphereField vals = synthesis_values(a_new);
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (double r : vals.v) {
    if (!std::isfinite(r))
      throw StepRejected(t, dt, tail, "step rejected: non-finite radius; retry with smaller dt");
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  if (lo <= 0.0)
    throw StepRejected(t, dt, tail, "step rejected: radius crossed zero; retry with smaller dt");
  if (hi > r_max_old + 1.0)
    throw StepRejected(t, dt, tail, "step rejected: radius jumped; retry with smaller dt");
}

// Second-order derivative at t0 from three samples with arbitrary spacing.
double fd3(double tm, double t0, double tp, double fm, double f0, double fp) {
  const double hm = t0 - tm, hp = tp - t0;
  return (hm * hm * fp - hp * hp * fm + (hp * hp - hm * hm) * f0) /
         (hm * hp * (hm + hp));
}

GeometryReport sample_report(const GraphSurface& s, bool with_evolution) {
  GeometryOptions opt;
  opt.with_grad_a = true;
  opt.with_evolution = with_evolution;
  return geometry_report(s, opt);
}

FlowSample make_sample(double t, double area0, const GeometryReport& rep) {
  FlowSample s;
  s.t = t;
  s.area = rep.area;
  s.mH = rep.hawking;
  s.mtilde = rep.modified;
  s.Q = rep.q;
  s.minH = rep.minH;
  s.maxH = rep.maxH;
  s.mono_residual = kNaN;
  s.hev_residual = kNaN;
  s.aring_residual = kNaN;
  s.int_aring2 = rep.int_aring2;
  s.int_gradh2_over_h2 = rep.int_gradh2_over_h2;
  s.drift_rhs = rep.drift_rhs;
  const int n = rep.n;
  const double w1 = (n == 3) ? area0 : std::pow(area0, 4.0 / (n - 1));
  const double w2 = (n == 3) ? area0 * area0 * area0 : std::pow(area0, 6.0 / (n - 1));
  s.pinch1 = w1 * rep.sup_h_gap;
  s.pinch2 = w2 * rep.sup_grad_a2;
  return s;
}

// Shared formula for the sup-norm evolution residuals: finite-difference time
// derivative at fixed grid node, minus the graph-transport correction, minus
// the identity's right-hand side.
double field_residual(const FlowSample& sm, const FlowSample& s0, const FlowSample& sp,
                      const SphereField& fm, const SphereField& f0, const SphereField& fp,
                      const SphereField& adv, const SphereField& rhs, double* rhs_sup) {
  double sup = 0.0, rsup = 0.0;
  for (size_t i = 0; i < f0.v.size(); ++i) {
    const double fd = fd3(sm.t, s0.t, sp.t, fm.v[i], f0.v[i], fp.v[i]);
    sup = std::max(sup, std::abs(fd - adv.v[i] - rhs.v[i]));
    rsup = std::max(rsup, std::abs(rhs.v[i]));
  }
  if (rhs_sup) *rhs_sup = rsup;
  return sup;
}

void require_interior(const FlowTrace& tr, int k, const char* who) {
  if (k <= 0 || k + 1 >= static_cast<int>(tr.samples.size()))
    throw std::invalid_argument(std::string(who) + ": sample index needs neighbors on both sides");
}

}  // namespace

int dealias_degree(int L) { return (3 * L + 1) / 2; }

GraphSurface FlowTrace::surface_at(int k) const {
  HarmonicCoeffs c(work_grid);
  c.a = samples.at(k).coeffs;
  return GraphSurface(flow_grid, synthesis_values(regrid(c, flow_grid)));
}

FlowState make_state(double t, const GraphSurface& s) {
  GeometryOptions opt;
  opt.with_grad_a = false;
  opt.with_evolution = false;
  return FlowState{t, s, geometry_report(s, opt)};
}

double stable_dt(const FlowState& st, const FlowControls& c) {
  const int L = st.surface.grid->L;
  const double h = M_PI / (L + 1);
  GridPtr fg = SphereGrid::create(st.surface.grid->n, st.surface.grid->mode, dealias_degree(L));
  const SpeedEval ev = eval_speed(regrid(analysis(st.surface.r), fg), st.t);
  return std::min(c.c_stab * h * h * ev.heur, c.dt_max);
}

FlowState step(const FlowState& st, double dt, const FlowControls& c) {
  if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be positive");
  if (!(st.report.minH > 0.0))
    throw FlowBreakdown(st.t, 0.0, 0.0, st.report.minH,
                        "flow breakdown: state is not mean-convex");
  const GridPtr work = st.surface.grid;
  const int L_work = work->L;
  GridPtr fg = SphereGrid::create(work->n, work->mode, dealias_degree(L_work));
  const HarmonicCoeffs a = regrid(analysis(st.surface.r), fg);
  double r_max = 0.0;
  for (double r : st.surface.r.v) r_max = std::max(r_max, r);

  const RkOutcome rk = rk4_step(a, st.t, dt, L_work, nullptr);
  if (rk.tail > c.tail_tol)
    throw StepRejected(st.t, dt, rk.tail,
                       "step rejected: spectral tail beyond band limit; retry with smaller dt");
  const HarmonicCoeffs a_new = truncated(rk.a_new, L_work);
  check_radius(a_new, r_max, st.t, dt, rk.tail);
  GraphSurface s_new(work, synthesis_values(regrid(a_new, work)));
  return make_state(st.t + dt, s_new);
}

FlowTrace run(const GraphSurface& initial, double t_final, const FlowControls& c) {
  if (!(t_final > 0.0)) throw std::invalid_argument("run: t_final must be positive");
  if (!(c.cadence > 0.0) || !(c.dt_max > 0.0) || !(c.c_stab > 0.0))
    throw std::invalid_argument("run: cadence, dt_max and c_stab must be positive");

  FlowTrace tr;
  tr.n = initial.n;
  tr.work_grid = initial.grid;
  tr.flow_grid = SphereGrid::create(initial.n, initial.grid->mode,
                                    dealias_degree(initial.grid->L));
  tr.controls = c;
  const int L_work = initial.grid->L;
  const double h = M_PI / (L_work + 1);

  HarmonicCoeffs a = regrid(analysis(initial.r), tr.flow_grid);

  // Rolling three-sample window of evolution reports for the residual fill.
  std::deque<GeometryReport> window;
  std::deque<GraphSurface> surfaces;

  auto record = [&](double t) {
    GraphSurface s(tr.flow_grid, synthesis_values(a));
    GeometryReport rep = sample_report(s, true);
    if (tr.samples.empty()) tr.area0 = rep.area;
    FlowSample smp = make_sample(t, tr.area0, rep);
    smp.coeffs = regrid(a, tr.work_grid).a;
    tr.samples.push_back(std::move(smp));
    window.push_back(std::move(rep));
    surfaces.push_back(std::move(s));
    if (window.size() == 3) {
      const int k = static_cast<int>(tr.samples.size()) - 2;
      FlowSample& mid = tr.samples[k];
      const FlowSample& lo = tr.samples[k - 1];
      const FlowSample& hi = tr.samples[k + 1];
      if (tr.n == 3) {
        const double fd = fd3(lo.t, mid.t, hi.t, lo.mtilde, mid.mtilde, hi.mtilde);
        mid.mono_residual = std::abs(fd - mid.drift_rhs) / std::max(mid.drift_rhs, 1e-12);
      }
      double rs = 0.0;
      const double hev = field_residual(lo, mid, hi, window[0].H, window[1].H, window[2].H,
                                        window[1].advH, window[1].rhsH, &rs);
      mid.hev_residual = hev / std::max(rs, 1e-12);
      const double arv =
          field_residual(lo, mid, hi, window[0].Aring2, window[1].Aring2, window[2].Aring2,
                         window[1].advAring2, window[1].rhsAring2, &rs);
      mid.aring_residual = arv / std::max(rs, 1e-12);
      window.pop_front();
      surfaces.pop_front();
    }
  };

  double t = 0.0;
  record(0.0);
  if (!(tr.samples.front().minH > 0.0))
    throw FlowBreakdown(0.0, 0.0, 0.0, tr.samples.front().minH,
                        "flow breakdown: initial surface is not mean-convex");

  int isample = 1;
  while (t < t_final - kTimeEps) {
    const double t_next = std::min(isample * c.cadence, t_final);
    while (t < t_next - kTimeEps) {
      SpeedEval k1 = eval_speed(a, t);
      double dt = std::min({c.c_stab * h * h * k1.heur, c.dt_max, t_next - t});
      int rejects = 0;
      for (;;) {
        const RkOutcome rk = rk4_step(a, t, dt, L_work, &k1);
        try {
          if (rk.tail > c.tail_tol)
            throw StepRejected(t, dt, rk.tail,
                               "step rejected: spectral tail beyond band limit; "
                               "retry with smaller dt");
          HarmonicCoeffs a_new = truncated(rk.a_new, L_work);
          double r_max = 0.0;
          for (double r : synthesis_values(a).v) r_max = std::max(r_max, r);
          check_radius(a_new, r_max, t, dt, rk.tail);
          a = std::move(a_new);
          t += dt;
          break;
        } catch (const StepRejected&) {
          if (++rejects > c.max_rejects) throw;
          dt *= 0.5;
        }
      }
    }
    t = t_next;
    record(t);
    ++isample;
  }
  return tr;
}

double monotonicity_residual(const FlowTrace& tr, int k) {
  require_interior(tr, k, "monotonicity_residual");
  if (tr.n != 3)
    throw std::invalid_argument("monotonicity_residual: modified-mass drift identity is n = 3");
  const FlowSample& lo = tr.samples[k - 1];
  const FlowSample& mid = tr.samples[k];
  const FlowSample& hi = tr.samples[k + 1];
  const double fd = fd3(lo.t, mid.t, hi.t, lo.mtilde, mid.mtilde, hi.mtilde);
  return std::abs(fd - mid.drift_rhs);
}

double monotonicity_residual_rel(const FlowTrace& tr, int k) {
  return monotonicity_residual(tr, k) / std::max(tr.samples[k].drift_rhs, 1e-12);
}

namespace {

double evol_residual(const FlowTrace& tr, int k, bool aring, bool relative) {
  require_interior(tr, k, aring ? "aring_evolution_residual" : "h_evolution_residual");
  GeometryOptions opt;
  opt.with_grad_a = false;
  opt.with_evolution = true;
  const GeometryReport rm = geometry_report(tr.surface_at(k - 1), opt);
  const GeometryReport r0 = geometry_report(tr.surface_at(k), opt);
  const GeometryReport rp = geometry_report(tr.surface_at(k + 1), opt);
  double rs = 0.0;
  const double sup = aring
      ? field_residual(tr.samples[k - 1], tr.samples[k], tr.samples[k + 1],
                       rm.Aring2, r0.Aring2, rp.Aring2, r0.advAring2, r0.rhsAring2, &rs)
      : field_residual(tr.samples[k - 1], tr.samples[k], tr.samples[k + 1],
                       rm.H, r0.H, rp.H, r0.advH, r0.rhsH, &rs);
  return relative ? sup / std::max(rs, 1e-12) : sup;
}

}  // namespace

double h_evolution_residual(const FlowTrace& tr, int k) { return evol_residual(tr, k, false, false); }
double h_evolution_residual_rel(const FlowTrace& tr, int k) { return evol_residual(tr, k, false, true); }
double aring_evolution_residual(const FlowTrace& tr, int k) { return evol_residual(tr, k, true, false); }
double aring_evolution_residual_rel(const FlowTrace& tr, int k) { return evol_residual(tr, k, true, true); }

double aring_integral_consistency(const FlowTrace& tr, int k) {
  require_interior(tr, k, "aring_integral_consistency");
  if (tr.n != 3)
    throw std::invalid_argument("aring_integral_consistency: stated for n = 3");
  const FlowSample& lo = tr.samples[k - 1];
  const FlowSample& mid = tr.samples[k];
  const FlowSample& hi = tr.samples[k + 1];
  const double fd = fd3(lo.t, mid.t, hi.t, lo.int_aring2, mid.int_aring2, hi.int_aring2);
  const double rhs = -(mid.int_aring2 + mid.int_gradh2_over_h2);
  return std::abs(fd - rhs) / std::max(std::abs(rhs), 1e-12);
}

PinchFit pinching_diagnostics(const FlowTrace& tr) {
  const auto& s = tr.samples;
  const int m = static_cast<int>(s.size());
  if (m < 5) throw InsufficientData("pinching_diagnostics: need at least 5 samples");
  const double span = s.back().t - s.front().t;
  if (span < 2.0)
    throw InsufficientData("pinching_diagnostics: need a t-span of at least 2");
  const double t_from = s.back().t - std::max(2.0, 0.5 * span);

  PinchFit fit;
  fit.t_span = span;
  auto lsq = [&](auto get, double* slope, double* C) {
    double st = 0, sy = 0, stt = 0, sty = 0;
    int cnt = 0;
    for (const FlowSample& x : s) {
      const double y = get(x);
      if (x.t < t_from - kTimeEps || !(y > 0.0)) continue;
      const double ly = std::log(y);
      st += x.t;
      sy += ly;
      stt += x.t * x.t;
      sty += x.t * ly;
      ++cnt;
    }
    if (cnt < 3) throw InsufficientData("pinching_diagnostics: too few positive samples in the fit window");
    const double det = cnt * stt - st * st;
    *slope = (cnt * sty - st * sy) / det;
    *C = std::exp((sy - *slope * st) / cnt);
    fit.nsamples = cnt;
  };
  lsq([](const FlowSample& x) { return x.pinch1; }, &fit.slope1, &fit.C1);
  lsq([](const FlowSample& x) { return x.pinch2; }, &fit.slope2, &fit.C2);
  return fit;
}

ProfileResult extract_profile(const FlowTrace& tr, double tol) {
  const auto& s = tr.samples;
  if (s.size() < 2)
    throw InsufficientData("extract_profile: need at least two snapshots");
  const double cshift = 1.0 / (tr.n - 1);
  auto profile = [&](int k) {
    HarmonicCoeffs c(tr.work_grid);
    c.a = s[k].coeffs;
    SphereField f = synthesis_values(c);
    for (double& x : f.v) x -= cshift * s[k].t;
    return f;
  };
  auto gap = [&](int k) {  // sup |f_k - f_{k-1}|
    const SphereField fa = profile(k - 1), fb = profile(k);
    double g = 0.0;
    for (size_t i = 0; i < fa.v.size(); ++i) g = std::max(g, std::abs(fb.v[i] - fa.v[i]));
    return g;
  };
  const int last = static_cast<int>(s.size()) - 1;
  ProfileResult out{profile(last), gap(last), true};
  for (int k = std::max(2, last - 3); k <= last; ++k)
    if (gap(k) > gap(k - 1) + 1e-12) out.cauchy_monotone = false;
  if (out.cauchy_gap > tol)
    throw NotConverged(out.cauchy_gap,
                       "extract_profile: successive profiles still differ; flow not settled");
  return out;
}

}  // namespace imcf
