#pragma once

#include "imcf/surface.hpp"

namespace imcf {

// Induced metric data of a radial graph.  Full2D stores the covariant
// components in the (theta, lambda) frame.  Polar mode stores g_tt (the
// theta-theta component) and, in g_ll, the coefficient multiplying the unit
// round metric of the S^{n-2} fiber, i.e. sinh^2(r) sin^2(theta).
struct InducedMetric {
  GridPtr grid;
  SphereField v;     // graph gradient factor sqrt(1 + |D phi|^2_sigma)
  SphereField dens;  // area density relative to d mu_sigma: sinh^{n-1}(r) v
  double area = 0.0;
  std::vector<double> g_tt, g_tl, g_ll;
  std::vector<double> gi_tt, gi_tl, gi_ll;  // inverse components
};

// Mixed shape operator h^i_j.  Full2D stores the four frame components;
// polar mode stores the two principal curvatures (radial-in-angle and the
// common tangential one).
struct MixedShape {
  GridPtr grid;
  std::vector<double> tt, tl, lt, ll;  // Full2D
  std::vector<double> rad, tan;        // Polar
};

struct GeometryOptions {
  bool with_grad_a = true;     // |grad A|^2 (third derivatives of r)
  bool with_evolution = true;  // curvature-evolution helper fields
};

// Everything the flow, the monitors, and the mass functionals need, computed
// in one pass over the nodes.
struct GeometryReport {
  int n = 3;

  SphereField v;
  SphereField H;         // mean curvature (trace of the shape operator)
  SphereField Hgap;      // H - (n-1), computed without forming H first, so it
                         // stays accurate when the surface is nearly round
  SphereField A2;        // |A|^2
  SphereField Aring2;    // |A - (H/(n-1)) g|^2
  SphereField gradH2_g;  // |grad H|^2 in the induced metric
  SphereField gradA2;    // |grad A|^2 in the induced metric  (with_grad_a)
  SphereField dens;      // area density relative to d mu_sigma
  MixedShape shape;

  // Evolution-monitor helpers (with_evolution).  rhsH and rhsAring2 are the
  // pointwise right-hand sides of the curvature evolution identities along
  // the flow with normal speed 1/H; advH and advAring2 are the transport
  // corrections c^i d_i(.) that relate time derivatives at fixed graph angle
  // to derivatives following the flow.
  SphereField rhsH, rhsAring2, advH, advAring2;

  double area = 0.0;
  double hawking = 0.0;   // m_H, n = 3 only (NaN otherwise)
  double modified = 0.0;  // m_tilde = -|Sigma| int |Aring|^2
  double q = 0.0;         // |Sigma|^{-(n-5)/(n-1)} int |Aring|^2
  double minH = 0.0, maxH = 0.0;
  bool mean_convex = false;

  double int_aring2 = 0.0;          // int |Aring|^2 dmu
  double int_h2m4 = 0.0;            // int (H^2 - 4) dmu, n = 3 (NaN otherwise)
  double int_gradh2_over_h2 = 0.0;  // int |grad H|^2/H^2 dmu
  double drift_rhs = 0.0;           // |Sigma| * int |grad H|^2/H^2 dmu
  double sup_h_gap = 0.0;     // n=3: sup|H^2-4|; n>=4: sup(|H-(n-1)|^2+|Aring|^2)
  double sup_grad_a2 = 0.0;   // sup |grad A|^2 (with_grad_a)
  double aring_crosscheck = 0.0;  // sup gap of the two |Aring|^2 routes / sup|A|^2
};

GeometryReport geometry_report(const GraphSurface& s, const GeometryOptions& opt = {});

InducedMetric induced_metric(const GraphSurface& s);
MixedShape shape_operator(const GraphSurface& s);

// n = 3 integral identity residual |(1 - (1/16pi) int (H^2-4)) + (1/8pi) int |Aring|^2|.
double gauss_identity_check(const GraphSurface& s);

}  // namespace imcf
