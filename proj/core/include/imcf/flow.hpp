#pragma once

#include <vector>

#include "imcf/geometry.hpp"
#include "imcf/surface.hpp"
#include "imcf/transforms.hpp"

namespace imcf {

// Controls for the adaptive time stepper.  Defaults are sized for desk-scale
// runs (t up to ~12, band limits up to ~64 in full-2D mode).
struct FlowControls {
  double cadence = 0.1;      // trace sampling interval in flow time
  double dt_max = 0.02;      // hard cap on the step size
  double c_stab = 0.5;       // safety factor in the parabolic stability bound
  double tail_tol = 1e-6;    // spectral tail fraction that triggers rejection
  int max_rejects = 8;       // dt halvings before giving up on a step
};

// One trace row.  Scalar diagnostics are evaluated on the de-aliased stepping
// grid; `coeffs` is the truncated state, enough to reconstruct the surface.
// The *_residual columns compare finite differences of neighboring samples
// against the evolution identities, so they stay NaN at the endpoints (and
// mono_residual / mH are NaN whenever n != 3).
struct FlowSample {
  double t = 0.0;
  double area = 0.0;
  double mH = 0.0;       // Hawking mass (n = 3)
  double mtilde = 0.0;   // modified mass  -|Sigma| int |Aring|^2
  double Q = 0.0;        // |Sigma|^{-(n-5)/(n-1)} int |Aring|^2
  double minH = 0.0;
  double maxH = 0.0;
  double mono_residual = 0.0;
  double hev_residual = 0.0;
  double aring_residual = 0.0;
  double pinch1 = 0.0;   // n=3: |Sigma_0| sup|H^2-4|;  n>=4: |Sigma_0|^{4/(n-1)} sup(|H-(n-1)|^2+|Aring|^2)
  double pinch2 = 0.0;   // n=3: |Sigma_0|^3 sup|grad A|^2;  n>=4: |Sigma_0|^{6/(n-1)} sup|grad A|^2
  double int_aring2 = 0.0;
  double int_gradh2_over_h2 = 0.0;
  double drift_rhs = 0.0;  // |Sigma| int |grad H|^2/H^2, the modified-mass drift
  std::vector<double> coeffs;
};

struct FlowTrace {
  int n = 3;
  GridPtr work_grid;   // grid the state coefficients live on
  GridPtr flow_grid;   // finer evaluation grid used while stepping
  double area0 = 0.0;  // initial area, the fixed weight in the pinching columns
  FlowControls controls;
  std::vector<FlowSample> samples;

  GraphSurface surface_at(int k) const;  // snapshot k on the flow grid
};

// A surface together with its time stamp and freshly computed geometry.
struct FlowState {
  double t = 0.0;
  GraphSurface surface;
  GeometryReport report;
};

FlowState make_state(double t, const GraphSurface& s);

// Band limit of the de-aliased evaluation grid for a working band limit L.
int dealias_degree(int L);

// Largest dt the stability heuristic allows for this state:
// c_stab * h_min^2 * min(H sinh^2 r / v), h_min = pi/(L+1).
double stable_dt(const FlowState& st, const FlowControls& c);

// One RK4 step of dr/dt = v/H in coefficient space.  Throws FlowBreakdown if
// H <= 0 at any stage node, StepRejected if the updated radius grows a
// spectral tail beyond c.tail_tol or leaves the valid range.
FlowState step(const FlowState& st, double dt, const FlowControls& c = {});

// Adaptive run sampled every c.cadence, residual columns filled in for
// interior samples.  Errors from step propagate.
FlowTrace run(const GraphSurface& initial, double t_final, const FlowControls& c = {});

// Residual monitors.  All recompute geometry from the stored snapshots; the
// time derivative is a centered second-order difference, so k must have
// neighbors on both sides.  The _rel variants normalize by the size of the
// identity's right-hand side (floored at 1e-12).
double monotonicity_residual(const FlowTrace& tr, int k);      // n = 3 only
double monotonicity_residual_rel(const FlowTrace& tr, int k);
double h_evolution_residual(const FlowTrace& tr, int k);
double h_evolution_residual_rel(const FlowTrace& tr, int k);
double aring_evolution_residual(const FlowTrace& tr, int k);
double aring_evolution_residual_rel(const FlowTrace& tr, int k);

// n = 3 bulk consistency: relative mismatch between the finite-difference
// d/dt of int |Aring|^2 dmu and -(int |Aring|^2 + int |grad H|^2/H^2).
double aring_integral_consistency(const FlowTrace& tr, int k);

// Least-squares exponential fits ln y = ln C + slope * t of the two pinching
// columns over the trailing window [t_end - max(2, span/2), t_end].
struct PinchFit {
  double slope1 = 0.0, C1 = 0.0;
  double slope2 = 0.0, C2 = 0.0;
  int nsamples = 0;
  double t_span = 0.0;
};
PinchFit pinching_diagnostics(const FlowTrace& tr);  // throws InsufficientData

// Asymptotic profile f = r(., t_end) - t_end/(n-1) on the work grid, with the
// sup-norm gap to the previous snapshot as the convergence diagnostic.
// Throws NotConverged when the gap exceeds tol.  cauchy_monotone reports
// whether the gap decreased across the last five snapshots.
struct ProfileResult {
  SphereField f;
  double cauchy_gap = 0.0;
  bool cauchy_monotone = true;
};
ProfileResult extract_profile(const FlowTrace& tr, double tol = 1e-3);

}  // namespace imcf
