#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "imcf/calculus.hpp"
#include "imcf/geometry.hpp"
#include "imcf/roundness.hpp"
#include "imcf/surface.hpp"
#include "imcf/transforms.hpp"
#include "test_util.hpp"

using namespace imcf;
using namespace testutil;

namespace {

// Off-center geodesic sphere sampled on a grid; direction (a1,a2,a3) is the
// unit vector toward the center, d the center distance.
GraphSurface translated_sphere(const GridPtr& g, double r0, double d, double a1, double a2,
                               double a3) {
  SphereField r(g);
  for (int k = 0; k < g->nlat; ++k)
    for (int j = 0; j < g->nlon; ++j) {
      double cg;
      if (g->mode == GridMode::Polar) {
        cg = g->ct[k];
      } else {
        const double x1 = g->st[k] * std::cos(g->lam[j]);
        const double x2 = g->st[k] * std::sin(g->lam[j]);
        cg = a1 * x1 + a2 * x2 + a3 * g->ct[k];
      }
      r.v[g->node(k, j)] = translated_sphere_radius(r0, d, cg);
    }
  return GraphSurface(g, r);
}

GraphSurface zonal_surface(const GridPtr& g, const std::function<double(double)>& fn) {
  return GraphSurface(g, zonal_field(g, fn));
}

}  // namespace

TEST_CASE("phi_from_r closed form and derivative identity") {
  const GridPtr g = SphereGrid::create(3, GridMode::Full2D, 8);

  // phi(ln 3) = ln tanh(ln(3)/2) = -ln 2.
  SphereField r1 = zonal_field(g, [](double) { return std::log(3.0); });
  SphereField p1 = phi_from_r(r1);
  CHECK(sup_abs(p1.v) == doctest::Approx(std::log(2.0)).epsilon(1e-13));

  // Large radius: |phi| < 5e-9 at r = 20.
  SphereField r2 = zonal_field(g, [](double) { return 20.0; });
  CHECK(sup_abs(phi_from_r(r2).v) < 5e-9);
  CHECK(phi_from_r(r2).v[0] < 0.0);

  // D_i phi = D_i r / sinh(r).  phi is a nonlinear image of r, so its
  // harmonic spectrum is infinite and the spectral gradient carries the
  // composition's truncation tail; a generous band limit pushes that tail
  // to roundoff for low-degree r.
  const GridPtr gr = SphereGrid::create(3, GridMode::Full2D, 32);
  HarmonicCoeffs c = random_coeffs(gr, 6, 2024u, 3.0);
  SphereField r = synthesis_values(c);
  for (double& x : r.v) x = 2.0 + 0.3 * x;
  SphereField phi = phi_from_r(r);
  SphereTensor1 dphi = grad_sigma(phi);
  SphereTensor1 dr = grad_sigma(r);
  double worst = 0.0, scale = 0.0;
  for (int i = 0; i < r.size(); ++i) {
    worst = std::max({worst, std::abs(dphi.ct_[i] - dr.ct_[i] / std::sinh(r.v[i])),
                      std::abs(dphi.cl_[i] - dr.cl_[i] / std::sinh(r.v[i]))});
    scale = std::max({scale, std::abs(dphi.ct_[i]), std::abs(dphi.cl_[i])});
  }
  CHECK(worst < 1e-8 * scale);

  // Nonpositive radius is a domain error.
  SphereField bad = zonal_field(g, [](double th) { return th < 1.0 ? -0.1 : 1.0; });
  CHECK_THROWS_AS(phi_from_r(bad), std::domain_error);
  CHECK_THROWS_AS(GraphSurface(g, bad), std::domain_error);
}

TEST_CASE("induced metric: sphere closed form, inverse, v identity") {
  const double r0 = 1.0;
  const GridPtr g = SphereGrid::create(3, GridMode::Full2D, 12);
  InducedMetric m = induced_metric(GraphSurface::sphere(g, r0));
  const double s2 = std::sinh(r0) * std::sinh(r0);
  double wg = 0.0, wv = 0.0, wd = 0.0;
  for (int k = 0; k < g->nlat; ++k)
    for (int j = 0; j < g->nlon; ++j) {
      const int i = g->node(k, j);
      const double st = g->st[k];
      wg = std::max({wg, std::abs(m.g_tt[i] - s2), std::abs(m.g_tl[i]),
                     std::abs(m.g_ll[i] - s2 * st * st)});
      wv = std::max(wv, std::abs(m.v.v[i] - 1.0));
      wd = std::max(wd, std::abs(m.dens.v[i] - s2));
    }
  CHECK(wg < 1e-12);
  CHECK(wv < 1e-14);
  CHECK(wd < 1e-12);
  CHECK(rel_gap(m.area, 4.0 * M_PI * s2) < 1e-13);

  // Random surface: g * g^{-1} = identity, v^2 = 1 + |D r|^2 / sinh^2 r.
  const GridPtr gr = SphereGrid::create(3, GridMode::Full2D, 16);
  SphereField r = synthesis_values(random_coeffs(gr, 10, 55u, 2.5));
  for (double& x : r.v) x = 2.0 + 0.25 * x;
  GraphSurface s(gr, r);
  InducedMetric mr = induced_metric(s);
  SphereTensor1 dr = grad_sigma(r);
  double wid = 0.0, wv2 = 0.0;
  for (int i = 0; i < r.size(); ++i) {
    const double i00 = mr.g_tt[i] * mr.gi_tt[i] + mr.g_tl[i] * mr.gi_tl[i];
    const double i01 = mr.g_tt[i] * mr.gi_tl[i] + mr.g_tl[i] * mr.gi_ll[i];
    const double i11 = mr.g_tl[i] * mr.gi_tl[i] + mr.g_ll[i] * mr.gi_ll[i];
    wid = std::max({wid, std::abs(i00 - 1.0), std::abs(i01), std::abs(i11 - 1.0)});
    const double sh = std::sinh(r.v[i]);
    const double v2ref = 1.0 + dr.norm2_sigma(i) / (sh * sh);
    wv2 = std::max(wv2, std::abs(mr.v.v[i] * mr.v.v[i] - v2ref) / v2ref);
  }
  CHECK(wid < 1e-10);
  CHECK(wv2 < 1e-8);
}

TEST_CASE("shape operator: umbilic values and B-factorization") {
  // Geodesic sphere: h^i_j = coth(r0) delta, both modes.
  {
    const GridPtr g = SphereGrid::create(3, GridMode::Full2D, 10);
    MixedShape h = shape_operator(GraphSurface::sphere(g, 1.0));
    const double c = 1.0 / std::tanh(1.0);
    double w = 0.0;
    for (size_t i = 0; i < h.tt.size(); ++i)
      w = std::max({w, std::abs(h.tt[i] - c), std::abs(h.ll[i] - c), std::abs(h.tl[i]),
                    std::abs(h.lt[i])});
    CHECK(w < 1e-10);
  }
  {
    const GridPtr g = SphereGrid::create(5, GridMode::Polar, 16);
    MixedShape h = shape_operator(GraphSurface::sphere(g, 0.8));
    const double c = 1.0 / std::tanh(0.8);
    double w = 0.0;
    for (size_t i = 0; i < h.rad.size(); ++i)
      w = std::max({w, std::abs(h.rad[i] - c), std::abs(h.tan[i] - c)});
    CHECK(w < 1e-10);
  }

  // Hess(phi) = (Hess(r) - coth(r) dr x dr) / sinh(r) for random r.  As in
  // the gradient identity, phi's composition tail must be resolvable, and
  // the Hessian amplifies it by l^2, so keep r low-degree on a wide grid.
  const GridPtr g = SphereGrid::create(3, GridMode::Full2D, 32);
  SphereField r = synthesis_values(random_coeffs(g, 6, 321u, 3.0));
  for (double& x : r.v) x = 2.0 + 0.3 * x;
  SphereTensor2 hp = hess_sigma(phi_from_r(r));
  SphereTensor2 hr = hess_sigma(r);
  SphereTensor1 dr = grad_sigma(r);
  double worst = 0.0, scale = 0.0;
  for (int i = 0; i < r.size(); ++i) {
    const double sh = std::sinh(r.v[i]), ch = std::cosh(r.v[i]);
    const double ett = (hr.tt[i] - ch / sh * dr.ct_[i] * dr.ct_[i]) / sh;
    const double etl = (hr.tl[i] - ch / sh * dr.ct_[i] * dr.cl_[i]) / sh;
    const double ell = (hr.ll[i] - ch / sh * dr.cl_[i] * dr.cl_[i]) / sh;
    worst = std::max({worst, std::abs(hp.tt[i] - ett), std::abs(hp.tl[i] - etl),
                      std::abs(hp.ll[i] - ell)});
    scale = std::max({scale, std::abs(hp.tt[i]), std::abs(hp.ll[i])});
  }
  CHECK(worst < 1e-8 * scale);
}

TEST_CASE("geometry report of geodesic spheres matches closed forms") {
  struct Case { int n; GridMode mode; int L; double r0; };
  for (const Case c : {Case{3, GridMode::Full2D, 32, 1.0}, Case{4, GridMode::Polar, 48, 1.3},
                       Case{5, GridMode::Polar, 32, 0.9}}) {
    const GridPtr g = SphereGrid::create(c.n, c.mode, c.L);
    GeometryReport rep = geometry_report(GraphSurface::sphere(g, c.r0));
    const double Href = (c.n - 1) / std::tanh(c.r0);

    double wH = 0.0, wA = 0.0, wAring = 0.0;
    for (int i = 0; i < rep.H.size(); ++i) {
      wH = std::max(wH, std::abs(rep.H.v[i] - Href));
      wA = std::max(wA, std::abs(rep.A2.v[i] - Href * Href / (c.n - 1)));
      wAring = std::max(wAring, std::abs(rep.Aring2.v[i]));
    }
    CHECK(wH < 1e-8);
    CHECK(wA < 1e-8);
    CHECK(wAring < 1e-16);
    CHECK(rel_gap(rep.area, sphere_area(c.n, c.r0)) < 1e-12);
    CHECK(rep.mean_convex);
    // Extrema come through the pointwise curvature assembly, whose roundoff
    // is amplified by l^2 at the high end of the band.
    CHECK(rel_gap(rep.minH, Href) < 1e-9);
    CHECK(rel_gap(rep.maxH, Href) < 1e-9);
    CHECK(std::abs(rep.modified) < 1e-8);
    CHECK(sup_abs(rep.gradH2_g.v) < 1e-13);
    CHECK(sup_abs(rep.gradA2.v) < 1e-14);

    if (c.n == 3) {
      CHECK(std::abs(rep.hawking) < 1e-8);
      // Hawking integrand: H^2 - 4 = 4/sinh^2(r0), so the integral is 16 pi.
      CHECK(rel_gap(rep.int_h2m4, 16.0 * M_PI) < 1e-10);
      CHECK(rel_gap(rep.sup_h_gap, 4.0 / std::pow(std::sinh(c.r0), 2)) < 1e-9);
    }
    if (c.n == 5) {
      // Q exponent -(n-5)/(n-1) vanishes: Q = int |Aring|^2.
      CHECK(rep.q == rep.int_aring2);
    }

    // Evolution helpers on a static sphere: dH/dt along the flow would be
    // -1/(sinh r cosh r) for n = 3; rhsH carries exactly that value.
    if (c.n == 3) {
      const double ref = -1.0 / (std::sinh(c.r0) * std::cosh(c.r0));
      double w = 0.0;
      for (int i = 0; i < rep.rhsH.size(); ++i)
        w = std::max(w, std::abs(rep.rhsH.v[i] - ref));
      CHECK(w < 1e-7);  // carries a Laplacian: roundoff scaled by l^2
      CHECK(sup_abs(rep.advH.v) < 1e-12);
      CHECK(sup_abs(rep.rhsAring2.v) < 1e-14);
    }
  }
}

TEST_CASE("off-center geodesic spheres are recognized as umbilic") {
  // Full-2D, center tilted away from the pole: exercises every mixed term.
  {
    const GridPtr g = SphereGrid::create(3, GridMode::Full2D, 24);
    const double r0 = 1.2, d = 0.4;
    GraphSurface s = translated_sphere(g, r0, d, std::sin(0.7) * std::cos(0.3),
                                       std::sin(0.7) * std::sin(0.3), std::cos(0.7));
    GeometryReport rep = geometry_report(s);
    const double Href = 2.0 / std::tanh(r0);
    double wH = 0.0, wA = 0.0, wsh = 0.0;
    for (int i = 0; i < rep.H.size(); ++i) {
      wH = std::max(wH, std::abs(rep.H.v[i] - Href));
      wA = std::max(wA, std::abs(rep.Aring2.v[i]));
    }
    for (size_t i = 0; i < rep.shape.tt.size(); ++i)
      wsh = std::max({wsh, std::abs(rep.shape.tt[i] - Href / 2),
                      std::abs(rep.shape.ll[i] - Href / 2), std::abs(rep.shape.tl[i]),
                      std::abs(rep.shape.lt[i])});
    CHECK(wH < 1e-8);
    CHECK(wA < 1e-12);
    CHECK(wsh < 1e-8);
    CHECK(rel_gap(rep.area, sphere_area(3, r0)) < 1e-12);
    CHECK(std::abs(rep.hawking) < 1e-10);
    CHECK(std::abs(rep.modified) < 1e-12);
    CHECK(rep.sup_grad_a2 < 1e-12);
    CHECK(gauss_identity_check(s) < 1e-10);
  }
  // Polar mode in n = 4 (translation along the symmetry axis).
  {
    const GridPtr g = SphereGrid::create(4, GridMode::Polar, 96);
    const double r0 = 1.0, d = 0.3;
    GraphSurface s = translated_sphere(g, r0, d, 0.0, 0.0, 1.0);
    GeometryReport rep = geometry_report(s);
    const double Href = 3.0 / std::tanh(r0);
    double wH = 0.0, wA = 0.0;
    for (int i = 0; i < rep.H.size(); ++i) {
      wH = std::max(wH, std::abs(rep.H.v[i] - Href));
      wA = std::max(wA, std::abs(rep.Aring2.v[i]));
    }
    CHECK(wH < 1e-6);
    CHECK(wA < 1e-12);
    CHECK(rel_gap(rep.area, sphere_area(4, r0)) < 1e-12);
    CHECK(rep.q < 1e-14);
  }
}

TEST_CASE("pointwise invariants and the two |Aring|^2 routes") {
  // Random mean-convex surfaces in both modes.
  {
    const GridPtr g = SphereGrid::create(3, GridMode::Full2D, 20);
    SphereField r = synthesis_values(random_coeffs(g, 10, 808u, 2.5));
    for (double& x : r.v) x = 2.5 + 0.3 * x;
    GeometryReport rep = geometry_report(GraphSurface(g, r));
    CHECK(rep.aring_crosscheck < 1e-8);
    double wneg = 0.0, wsplit = 0.0;
    for (int i = 0; i < rep.Aring2.size(); ++i) {
      wneg = std::min(wneg, rep.Aring2.v[i]);
      wsplit = std::max(wsplit, std::abs(rep.A2.v[i] - rep.H.v[i] * rep.H.v[i] / 2.0 -
                                         rep.Aring2.v[i]));
    }
    CHECK(wneg > -1e-10);
    CHECK(wsplit < 1e-8);
    // Sign consistency of the two masses.
    CHECK(((rep.modified <= 0.0) == (rep.hawking <= 0.0)));
    // m~ is the definition -area * int |Aring|^2.
    CHECK(rel_gap(rep.modified, -rep.area * rep.int_aring2) < 1e-13);
  }
  {
    const GridPtr g = SphereGrid::create(5, GridMode::Polar, 40);
    SphereField r = synthesis_values(random_coeffs(g, 12, 909u, 2.5));
    for (double& x : r.v) x = 2.5 + 0.3 * x;
    GeometryReport rep = geometry_report(GraphSurface(g, r));
    CHECK(rep.aring_crosscheck < 1e-8);
    CHECK(rep.q == rep.int_aring2);
  }
}

TEST_CASE("mean-concave surfaces are reported, not rejected") {
  const GridPtr g = SphereGrid::create(3, GridMode::Full2D, 24);
  GraphSurface s = zonal_surface(g, [](double th) { return 2.0 + 1.4 * std::cos(th); });
  GeometryReport rep = geometry_report(s);
  CHECK_FALSE(rep.mean_convex);
  CHECK(rep.minH < 0.0);
  CHECK(rep.area > 0.0);
}

TEST_CASE("report scalars are rotation invariant") {
  const GridPtr g = SphereGrid::create(3, GridMode::Full2D, 32);
  auto p2_about = [&](double a1, double a2, double a3) {
    SphereField r(g);
    for (int k = 0; k < g->nlat; ++k)
      for (int j = 0; j < g->nlon; ++j) {
        const double cg = a1 * g->st[k] * std::cos(g->lam[j]) +
                          a2 * g->st[k] * std::sin(g->lam[j]) + a3 * g->ct[k];
        r.v[g->node(k, j)] = 3.0 + 0.15 * 0.5 * (3.0 * cg * cg - 1.0);
      }
    return geometry_report(GraphSurface(g, r));
  };
  GeometryReport zon = p2_about(0.0, 0.0, 1.0);
  GeometryReport tilt = p2_about(std::sin(1.1) * std::cos(0.6), std::sin(1.1) * std::sin(0.6),
                                 std::cos(1.1));
  CHECK(rel_gap(tilt.area, zon.area) < 1e-12);
  CHECK(rel_gap(tilt.modified, zon.modified) < 1e-10);
  CHECK(rel_gap(tilt.int_aring2, zon.int_aring2) < 1e-10);
  CHECK(rel_gap(tilt.int_h2m4, zon.int_h2m4) < 1e-10);
  // sup-type scalars are grid maxima; the tilted grid samples the extremum up
  // to an O(h^2) angular offset, so only a loose match is meaningful.
  CHECK(rel_gap(tilt.sup_h_gap, zon.sup_h_gap) < 2e-2);
}

TEST_CASE("polar and full-2D modes agree on axisymmetric surfaces") {
  auto fn = [](double th) {
    const double x = std::cos(th);
    return 2.0 + 0.3 * 0.5 * (5.0 * x * x * x - 3.0 * x);
  };
  GeometryReport rf =
      geometry_report(zonal_surface(SphereGrid::create(3, GridMode::Full2D, 32), fn));
  GeometryReport rp =
      geometry_report(zonal_surface(SphereGrid::create(3, GridMode::Polar, 64), fn));
  CHECK(rel_gap(rp.area, rf.area) < 1e-12);
  CHECK(rel_gap(rp.modified, rf.modified) < 1e-10);
  CHECK(rel_gap(rp.hawking, rf.hawking) < 1e-9);
  CHECK(rel_gap(rp.int_aring2, rf.int_aring2) < 1e-10);
  CHECK(rel_gap(rp.int_h2m4, rf.int_h2m4) < 1e-10);
  CHECK(rel_gap(rp.int_gradh2_over_h2, rf.int_gradh2_over_h2) < 1e-9);
  // Grid-sampled extrema: see the rotation test for why these stay loose.
  CHECK(rel_gap(rp.minH, rf.minH) < 2e-2);
  CHECK(rel_gap(rp.maxH, rf.maxH) < 2e-2);
}

TEST_CASE("intrinsic-extrinsic curvature identity") {
  // Exact cases sit at roundoff.
  const GridPtr g32 = SphereGrid::create(3, GridMode::Full2D, 32);
  CHECK(gauss_identity_check(GraphSurface::sphere(g32, 1.0)) < 1e-10);
  CHECK(gauss_identity_check(zonal_surface(
            g32, [](double th) { return 3.0 + 0.2 * std::cos(th); })) < 1e-8);

  // Both sides of the identity are assembled from the same discrete jet, so
  // the residual is algebraic and sits at roundoff even for a surface whose
  // harmonic spectrum the grid cannot resolve.
  auto analytic = [](double th, double la) {
    return 2.0 + 0.3 * std::exp(std::cos(th)) * (1.0 + 0.2 * std::sin(th) * std::cos(la)) / 2.0;
  };
  for (int L : {10, 20}) {
    const GridPtr g = SphereGrid::create(3, GridMode::Full2D, L);
    CHECK(gauss_identity_check(GraphSurface(g, angular_field(g, analytic))) < 1e-10);
  }
}

TEST_CASE("modified mass approaches the limit functional value") {
  // r = s + fbar with e^{-fbar} = 1 + 0.1 P2 at s = 6: within 2% of -L(fbar).
  const GridPtr g = SphereGrid::create(3, GridMode::Full2D, 32);
  SphereField f(g);
  for (int k = 0; k < g->nlat; ++k)
    for (int j = 0; j < g->nlon; ++j) {
      const double x = g->ct[k];
      f.v[g->node(k, j)] = -std::log(1.0 + 0.1 * 0.5 * (3.0 * x * x - 1.0));
    }
  SphereField r6 = f;
  for (double& x : r6.v) x += 6.0;
  GeometryReport rep = geometry_report(GraphSurface(g, r6));
  const double L = limit_functional(f);
  CHECK(L > 0.0);
  CHECK(std::abs(rep.modified + L) / L < 0.02);
}
