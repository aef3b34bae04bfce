#pragma once

#include <string>

#include "imcf/calculus.hpp"
#include "imcf/flow.hpp"

namespace imcf {

// The discrete dichotomy needs a band: below rho_round the profile is called
// round, above rho_nonround non-round, in between indeterminate (callers may
// escalate resolution and retry).
struct RoundnessThresholds {
  double rho_round = 1e-4;
  double rho_nonround = 1e-2;
};

enum class Verdict { Round, NonRound, Indeterminate };
const char* verdict_name(Verdict v);

struct RoundnessReport {
  int n = 3;
  SphereField f;          // profile defining the conformal factor e^{2f}
  SphereField w;          // e^{-f}
  FirstModes proj;        // projection of w onto span{1, X^i}
  double rho_proj = 0.0;  // ||w - Pw|| / ||w||
  double limit_value = 0.0;  // n = 3: L(f); n >= 4: Q_infinity(f)
  SphereField K;          // Gauss curvature of e^{2f} sigma (n = 3 only)
  double k_variation = 0.0;  // (max K - min K)/|mean K|, NaN for n != 3
  Verdict verdict = Verdict::Indeterminate;
};

// L(f) = int e^{2f} dmu_sigma * int |trace-free Hess e^{-f}|^2 dmu_sigma on
// S^2; the limit of -mtilde along the flow of r = s + f as s -> infinity.
double limit_functional(const SphereField& f);

// General-n limit of the Q-functional:
// (int e^{(n-1)f})^{-(n-5)/(n-1)} * int e^{(n-3)f} |trace-free Hess e^{-f}|^2.
// Agrees with limit_functional when n = 3.
double limit_functional_n(const SphereField& f, int n);

// (rho_proj, K variation).  The curvature channel is only defined on S^2;
// the second component is NaN otherwise.
struct RoundnessResidual {
  double rho_proj = 0.0;
  double k_variation = 0.0;
};
RoundnessResidual roundness_residual(const SphereField& f);

// Conformal factor e^{2f} of the area-normalized limit metric, with the
// additive constant of f fixed so that int e^{2f} = |S^2| (n = 3) or
// int e^{(n-1)f} = |S^{n-1}| (n >= 4).  Propagates NotConverged.
SphereField rescaled_limit_metric(const FlowTrace& tr);

// Disk-of-radius-2 model of hyperbolic 3-space: rho = 2 - 4/(e^r + 1).
double ball_model_radius(double r);
double ball_model_radius_inv(double rho);

// (u - 2) e^{t/2} at the final snapshot, where u is the ball-model radius of
// the flowed surface; converges to -4 e^{-f}.  gap is the sup-norm distance
// to that limit; gap_monotone tracks the last five snapshots.
struct BallModelLimit {
  SphereField field;
  double gap = 0.0;
  bool gap_monotone = true;
};
BallModelLimit ball_model_limit(const FlowTrace& tr);

RoundnessReport roundness_report(const SphereField& f, const RoundnessThresholds& th = {});

}  // namespace imcf
