#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "imcf/errors.hpp"
#include "imcf/flow.hpp"
#include "imcf/geometry.hpp"
#include "imcf/surface.hpp"
#include "test_util.hpp"

using namespace imcf;
using namespace testutil;

namespace {

GraphSurface p2_surface(const GridPtr& g, double s, double eps) {
  SphereField r(g);
  for (int k = 0; k < g->nlat; ++k)
    for (int j = 0; j < g->nlon; ++j) {
      const double x = g->ct[k];
      r.v[g->node(k, j)] = s + eps * 0.5 * (3.0 * x * x - 1.0);
    }
  return GraphSurface(g, r);
}

GraphSurface tilted_sphere(const GridPtr& g, double r0, double d, double a1, double a2,
                           double a3) {
  SphereField r(g);
  for (int k = 0; k < g->nlat; ++k)
    for (int j = 0; j < g->nlon; ++j) {
      const double cg = a1 * g->st[k] * std::cos(g->lam[j]) +
                        a2 * g->st[k] * std::sin(g->lam[j]) + a3 * g->ct[k];
      r.v[g->node(k, j)] = translated_sphere_radius(r0, d, cg);
    }
  return GraphSurface(g, r);
}

double worst_interior(const FlowTrace& tr, double FlowSample::*col) {
  double w = 0.0;
  for (size_t k = 1; k + 1 < tr.samples.size(); ++k)
    w = std::max(w, tr.samples[k].*col);
  return w;
}

}  // namespace

TEST_CASE("geodesic sphere follows the radial ODE and the area law") {
  const GridPtr g = SphereGrid::create(3, GridMode::Full2D, 8);
  FlowTrace tr = run(GraphSurface::sphere(g, 1.0), 1.0);

  double worst_r = 0.0, worst_area = 0.0, worst_mt = 0.0;
  for (size_t k = 0; k < tr.samples.size(); ++k) {
    const FlowSample& s = tr.samples[k];
    const double rref = geodesic_radius_at(3, 1.0, s.t);
    GraphSurface snap = tr.surface_at(static_cast<int>(k));
    for (double rv : snap.r.v) worst_r = std::max(worst_r, std::abs(rv - rref) / rref);
    worst_area = std::max(worst_area,
                          std::abs(s.area / tr.samples[0].area - std::exp(s.t)) / std::exp(s.t));
    worst_mt = std::max(worst_mt, std::abs(s.mtilde));
    if (k > 0) {
      CHECK(s.t > tr.samples[k - 1].t);
      CHECK(s.area > tr.samples[k - 1].area);
    }
    CHECK(s.drift_rhs >= 0.0);
  }
  CHECK(worst_r < 1e-8);
  CHECK(worst_area < 1e-6);
  CHECK(worst_mt < 1e-8);

  // Monotonicity identity: both sides vanish on a geodesic sphere.
  for (size_t k = 1; k + 1 < tr.samples.size(); ++k)
    CHECK(monotonicity_residual(tr, static_cast<int>(k)) < 1e-9);
}

TEST_CASE("geodesic sphere ODE in n = 4 polar mode") {
  const GridPtr g = SphereGrid::create(4, GridMode::Polar, 8);
  FlowTrace tr = run(GraphSurface::sphere(g, 1.0), 1.0);
  double worst_r = 0.0, worst_q = 0.0;
  for (size_t k = 0; k < tr.samples.size(); ++k) {
    const double rref = geodesic_radius_at(4, 1.0, tr.samples[k].t);
    GraphSurface snap = tr.surface_at(static_cast<int>(k));
    for (double rv : snap.r.v) worst_r = std::max(worst_r, std::abs(rv - rref) / rref);
    worst_q = std::max(worst_q, std::abs(tr.samples[k].Q));
  }
  CHECK(worst_r < 1e-8);
  CHECK(worst_q < 1e-12);
  CHECK(aring_evolution_residual(tr, static_cast<int>(tr.samples.size() / 2)) < 1e-9);
}

TEST_CASE("off-center geodesic sphere keeps its center and closed form") {
  const GridPtr g = SphereGrid::create(3, GridMode::Full2D, 24);
  const double r0 = 1.2, d = 0.4;
  const double a1 = std::sin(0.7) * std::cos(0.3), a2 = std::sin(0.7) * std::sin(0.3),
               a3 = std::cos(0.7);
  FlowTrace tr = run(tilted_sphere(g, r0, d, a1, a2, a3), 1.0);

  const GridPtr& fg = tr.flow_grid;
  GraphSurface last = tr.surface_at(static_cast<int>(tr.samples.size()) - 1);
  const double rt = geodesic_radius_at(3, r0, tr.samples.back().t);
  double worst = 0.0;
  for (int k = 0; k < fg->nlat; ++k)
    for (int j = 0; j < fg->nlon; ++j) {
      const double cg = a1 * fg->st[k] * std::cos(fg->lam[j]) +
                        a2 * fg->st[k] * std::sin(fg->lam[j]) + a3 * fg->ct[k];
      const double ref = translated_sphere_radius(rt, d, cg);
      worst = std::max(worst, std::abs(last.r.v[fg->node(k, j)] - ref));
    }
  CHECK(worst < 1e-9);
  CHECK(std::abs(tr.samples.back().mtilde) < 1e-12);
}

TEST_CASE("non-round flow: monotonicity, residual columns, pinching fits") {
  const GridPtr g = SphereGrid::create(3, GridMode::Full2D, 16);
  FlowTrace tr = run(p2_surface(g, 3.0, 0.15), 3.0);

  for (size_t k = 1; k < tr.samples.size(); ++k)
    CHECK(tr.samples[k].mtilde >= tr.samples[k - 1].mtilde - 1e-12);
  CHECK(tr.samples.back().mH >= tr.samples.front().mH - 1e-10);

  CHECK(worst_interior(tr, &FlowSample::mono_residual) < 5e-3);
  CHECK(worst_interior(tr, &FlowSample::hev_residual) < 5e-3);
  CHECK(worst_interior(tr, &FlowSample::aring_residual) < 2e-2);

  const int mid = static_cast<int>(tr.samples.size()) / 2;
  CHECK(rel_gap(monotonicity_residual_rel(tr, mid), tr.samples[mid].mono_residual) < 1e-10);
  CHECK(rel_gap(h_evolution_residual_rel(tr, mid), tr.samples[mid].hev_residual) < 1e-10);
  CHECK(rel_gap(aring_evolution_residual_rel(tr, mid), tr.samples[mid].aring_residual) < 1e-10);
  CHECK(aring_integral_consistency(tr, mid) < 5e-3);

  PinchFit pf = pinching_diagnostics(tr);
  CHECK(pf.slope1 > -1.2);
  CHECK(pf.slope1 < -0.8);
  CHECK(pf.slope2 > -3.3);
  CHECK(pf.slope2 < -2.7);
}

TEST_CASE("pinching columns of a geodesic flow decay at the exact rate") {
  // sup|H^2 - 4| = 4/sinh^2 r(t) = e^{-t} * 4/sinh^2 r0, so the fitted line
  // has slope -1 and prefactor area0 * 4/sinh^2(r0) = 16 pi exactly.
  const GridPtr g = SphereGrid::create(3, GridMode::Full2D, 8);
  FlowTrace tr = run(GraphSurface::sphere(g, 1.0), 3.0);
  PinchFit pf = pinching_diagnostics(tr);
  CHECK(std::abs(pf.slope1 + 1.0) < 1e-6);
  CHECK(rel_gap(pf.C1, 16.0 * M_PI) < 1e-6);
}

TEST_CASE("residual monitors shrink when the sampling cadence halves") {
  const GridPtr g = SphereGrid::create(3, GridMode::Full2D, 16);
  FlowControls coarse;
  FlowControls fine;
  fine.cadence = coarse.cadence / 2.0;
  FlowTrace trc = run(p2_surface(g, 3.0, 0.15), 1.0, coarse);
  FlowTrace trf = run(p2_surface(g, 3.0, 0.15), 1.0, fine);

  // Centered differences are second order in the cadence; a factor 2 of
  // headroom on the expected 4x keeps the check robust to the spatial floor.
  CHECK(worst_interior(trf, &FlowSample::mono_residual) <
        0.6 * worst_interior(trc, &FlowSample::mono_residual));
  CHECK(worst_interior(trf, &FlowSample::hev_residual) <
        0.6 * worst_interior(trc, &FlowSample::hev_residual));
  CHECK(worst_interior(trf, &FlowSample::aring_residual) <
        0.6 * worst_interior(trc, &FlowSample::aring_residual));
}

TEST_CASE("axisymmetric initial data stays longitude-independent") {
  const GridPtr g = SphereGrid::create(3, GridMode::Full2D, 16);
  FlowTrace tr = run(p2_surface(g, 3.0, 0.15), 1.0);
  const std::vector<double>& a = tr.samples.back().coeffs;
  double zonal = 0.0, nonzonal = 0.0;
  for (int l = 0; l <= g->L; ++l)
    for (int m = -l; m <= l; ++m) {
      const double x = std::abs(a[SphereGrid::coef_index(l, m)]);
      if (m == 0)
        zonal = std::max(zonal, x);
      else
        nonzonal = std::max(nonzonal, x);
    }
  CHECK(nonzonal < 1e-10 * zonal);
}

TEST_CASE("flow commutes with rotations of the initial data") {
  const GridPtr g = SphereGrid::create(3, GridMode::Full2D, 16);
  auto p2_about = [&](double a1, double a2, double a3) {
    SphereField r(g);
    for (int k = 0; k < g->nlat; ++k)
      for (int j = 0; j < g->nlon; ++j) {
        const double cg = a1 * g->st[k] * std::cos(g->lam[j]) +
                          a2 * g->st[k] * std::sin(g->lam[j]) + a3 * g->ct[k];
        r.v[g->node(k, j)] = 3.0 + 0.15 * 0.5 * (3.0 * cg * cg - 1.0);
      }
    return GraphSurface(g, r);
  };
  FlowTrace zon = run(p2_about(0.0, 0.0, 1.0), 0.5);
  FlowTrace tilt = run(p2_about(std::sin(1.1) * std::cos(0.6), std::sin(1.1) * std::sin(0.6),
                                std::cos(1.1)),
                       0.5);
  CHECK(rel_gap(tilt.samples.back().area, zon.samples.back().area) < 1e-10);
  CHECK(rel_gap(tilt.samples.back().mtilde, zon.samples.back().mtilde) < 1e-8);
}

TEST_CASE("a spectral tail beyond the band limit rejects the step") {
  const GridPtr g = SphereGrid::create(3, GridMode::Full2D, 16);
  FlowControls c;
  c.tail_tol = 1e-300;  // any nonlinear tail trips the detector
  c.max_rejects = 2;
  try {
    run(p2_surface(g, 3.0, 0.15), 0.5, c);
    FAIL("expected StepRejected");
  } catch (const StepRejected& e) {
    CHECK(e.tail_fraction > 0.0);
    CHECK(e.dt > 0.0);
  }
}

TEST_CASE("losing mean convexity raises FlowBreakdown") {
  const GridPtr g = SphereGrid::create(3, GridMode::Full2D, 24);
  SphereField r(g);
  for (int k = 0; k < g->nlat; ++k)
    for (int j = 0; j < g->nlon; ++j) r.v[g->node(k, j)] = 2.0 + 1.4 * g->ct[k];
  GraphSurface bad(g, r);
  CHECK_THROWS_AS(run(bad, 1.0), FlowBreakdown);
  FlowState st = make_state(0.0, bad);
  CHECK(st.report.minH < 0.0);
  CHECK_THROWS_AS(step(st, 1e-4), FlowBreakdown);
}

TEST_CASE("profile extraction: geodesic value and convergence guard") {
  const GridPtr g = SphereGrid::create(3, GridMode::Full2D, 8);
  FlowTrace tr = run(GraphSurface::sphere(g, 1.0), 4.0);
  ProfileResult pr = extract_profile(tr);
  const double fref = geodesic_radius_at(3, 1.0, 4.0) - 2.0;  // -> ln(2 sinh 1)
  double worst = 0.0;
  for (double fv : pr.f.v) worst = std::max(worst, std::abs(fv - fref));
  CHECK(worst < 1e-9);
  CHECK(pr.cauchy_gap < 1e-3);
  CHECK(pr.cauchy_monotone);
  CHECK(std::abs(fref - std::log(2.0 * std::sinh(1.0))) < 2e-2);

  CHECK_THROWS_AS(extract_profile(tr, 1e-6), NotConverged);
}

TEST_CASE("stability bound and de-aliased degree") {
  // For a sphere the parabolic heuristic is c_stab h^2 H sinh^2(r) (v = 1),
  // capped at dt_max.  r = 3 saturates the cap; r = 0.1 exercises the bound.
  const GridPtr g = SphereGrid::create(3, GridMode::Full2D, 8);
  FlowControls c;
  const double h = M_PI / (g->L + 1);
  FlowState big = make_state(0.0, GraphSurface::sphere(g, 3.0));
  CHECK(stable_dt(big, c) == c.dt_max);
  FlowState small = make_state(0.0, GraphSurface::sphere(g, 0.1));
  const double ref =
      c.c_stab * h * h * 2.0 / std::tanh(0.1) * std::pow(std::sinh(0.1), 2);
  CHECK(ref < c.dt_max);
  CHECK(rel_gap(stable_dt(small, c), ref) < 1e-12);

  CHECK(dealias_degree(24) == 36);
  CHECK(dealias_degree(32) == 48);
  for (int L : {8, 16, 32, 64}) CHECK(dealias_degree(L) * 2 >= 3 * L);
}

TEST_CASE("run validates its controls") {
  const GridPtr g = SphereGrid::create(3, GridMode::Full2D, 8);
  GraphSurface s = GraphSurface::sphere(g, 1.0);
  CHECK_THROWS_AS(run(s, 0.0), std::invalid_argument);
  FlowControls c;
  c.cadence = 0.0;
  CHECK_THROWS_AS(run(s, 1.0, c), std::invalid_argument);
}
