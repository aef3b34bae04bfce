#pragma once

#include <stdexcept>
#include <string>

namespace imcf {

// Bad user input (config file, CLI flags, malformed field files).
// The CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical breakdown of the flow itself: the mean curvature stopped being
// positive somewhere, so the speed 1/H is no longer defined.  Carries the
// offending node so a run can be diagnosed.  CLI exit code 3.
struct FlowBreakdown : std::runtime_error {
  double t;
  double theta;
  double lambda;
  double H;
  FlowBreakdown(double t_, double theta_, double lambda_, double H_,
                const std::string& msg)
      : std::runtime_error(msg), t(t_), theta(theta_), lambda(lambda_), H(H_) {}
};

// A time step could not be completed within the de-aliasing budget even after
// repeated halving.  Usually means the working band limit is too small for
// the surface being flowed.  CLI exit code 3.
struct StepRejected : std::runtime_error {
  double t;
  double dt;
  double tail_fraction;
  StepRejected(double t_, double dt_, double tail_, const std::string& msg)
      : std::runtime_error(msg), t(t_), dt(dt_), tail_fraction(tail_) {}
};

// Asymptotic profile extraction requested before the flow settled.
struct NotConverged : std::runtime_error {
  double cauchy_gap;
  NotConverged(double gap, const std::string& msg)
      : std::runtime_error(msg), cauchy_gap(gap) {}
};

// A diagnostic was asked of a trace that is too short to support it
// (for example a decay fit over fewer than five samples).  CLI exit code 2.
struct InsufficientData : std::runtime_error {
  explicit InsufficientData(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace imcf
