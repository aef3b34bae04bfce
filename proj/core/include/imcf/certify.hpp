#pragma once

#include <string>
#include <vector>

#include "imcf/flow.hpp"
#include "imcf/roundness.hpp"
#include "imcf/surface.hpp"

namespace imcf {

// Building block of the seed profile: e^{-fbar} = constant + sum of terms.
// kind is one of
//   "p2"  Legendre P_2(cos theta)         (both modes)
//   "pl"  Legendre P_l(cos theta)         (both modes, l = degree field)
//   "x1"  sin(theta) cos(lambda)          (full-2D only)
//   "x2"  sin(theta) sin(lambda)          (full-2D only)
//   "xn"  cos(theta)                      (both modes)
struct FbarTerm {
  std::string kind = "p2";
  int degree = 2;
  double amp = 0.0;
};

struct FbarSpec {
  double constant = 1.0;
  std::vector<FbarTerm> terms;
};

// Grid, flow and threshold choices for one certification run.
struct CertifySetup {
  int n = 3;
  GridMode mode = GridMode::Full2D;
  int L = 32;                   // band limit of the working grid
  FlowControls flow;
  RoundnessThresholds roundness;
  double probe_t = 3.0;         // probe-flow length used by certify_s0
  double c0_floor = 1e-8;       // c0 below this counts as "no mass gap"
  double tail_frac = 0.1;       // tail estimate must be below tail_frac * c0/4
  double slope_band = 0.3;      // fitted decay exponents may deviate this much
  double profile_tol = 1e-3;    // Cauchy tolerance for profile extraction
};

GridPtr make_grid(const CertifySetup& s);

// e^{-fbar} and fbar on a grid.  Throws std::domain_error when the spec makes
// e^{-fbar} non-positive somewhere or uses a longitude-dependent term on a
// polar grid.
SphereField fbar_w_field(const GridPtr& grid, const FbarSpec& spec);
SphereField fbar_field(const GridPtr& grid, const FbarSpec& spec);

// Surface r = s + fbar.
GraphSurface construct_initial(const GridPtr& grid, const FbarSpec& spec, double s);

// Limit-functional value of fbar on this grid (the certification constant).
double certification_c0(const GridPtr& grid, const FbarSpec& spec);

struct ConditionCheck {
  std::string name;
  bool passed = false;
  double value = 0.0;      // measured quantity
  double threshold = 0.0;  // what it was compared against
  std::string detail;
};

// Exponential fit y ~ C e^{slope t} of a drift series, plus the extrapolated
// remaining integral  tail_hat = C e^{slope T} / (-slope)  at the series end.
struct DriftFit {
  double slope = 0.0;
  double C = 0.0;
  double tail_hat = 0.0;
  double t_end = 0.0;
  int nsamples = 0;
};

struct CertificationReport {
  int n = 3;
  FbarSpec fbar;
  double s0 = 0.0;
  double c0 = 0.0;
  double t_final = 0.0;

  std::vector<ConditionCheck> conditions;
  DriftFit drift;    // fitted decay of the monotone quantity's drift
  PinchFit pinch;    // pinching-column fits (filled when the trace allows)
  bool has_pinch = false;

  double initial_value = 0.0;  // mtilde (n = 3) or Q (n >= 4) at s0
  double final_value = 0.0;    // same quantity at t_final
  double tail_bound = 0.0;     // 2 * tail_hat, the safety-factored tail
  double limit_estimate = 0.0; // final_value +/- tail_hat (sign per dimension)
  double certification_margin = 0.0;  // distance past the -c0/4 (or c0/4) line

  RoundnessReport roundness;
  bool has_roundness = false;
  double ball_gap = 0.0;       // n = 3: sup |(u-2)e^{t/2} + 4 e^{-f}|
  double revalidation_gap = 0.0;

  bool certified = false;
  std::string failure;   // first failed condition, empty when certified
  std::string method = "empirical certification: measured drift decay with "
                       "exponential tail extrapolation (x2 prefactor margin)";
  std::string summary;

  FlowTrace trace;       // raw samples retained for re-validation
  bool has_trace = false;
};

// Pre-flow certification of a candidate s0: condition (1) mean-convexity and
// condition (2) the initial mass/Q gap from the geometry report, condition
// (3) empirically from a short probe flow (drift-decay fit + extrapolated
// total drift < c0/4).
CertificationReport certify_s0(const FbarSpec& spec, double s0, const CertifySetup& setup);

// Full pipeline: conditions, flow to t_final, tail-extrapolated limit,
// profile extraction, roundness verdict, trace re-validation.  With
// force = true the flow runs even if a pre-condition failed (the report then
// documents why the result is not a counterexample).
CertificationReport run_and_certify(const FbarSpec& spec, double s0, double t_final,
                                    const CertifySetup& setup, bool force = false);

// n >= 4 variant: Q replaces mtilde, inequalities flip, pinching-decay fits
// become condition (4).  Requires polar mode.
CertificationReport highdim_construct_and_certify(int n, const FbarSpec& spec, double s0,
                                                  double t_final, CertifySetup setup,
                                                  bool force = false);

}  // namespace imcf
