#pragma once

#include <string>
#include <vector>

#include "imcf/certify.hpp"
#include "imcf/flow.hpp"
#include "imcf/roundness.hpp"
#include "imcf/surface.hpp"

namespace imcf {

// Initial surface description.  preset selects which fields matter:
//   "sphere"        r = r0
//   "p2"            r = s + eps * P_2(cos theta)
//   "fbar"          r = s + fbar   (fbar from the e^{-fbar} spec)
//   "coefficients"  r from an explicit harmonic coefficient list
struct InitialSpec {
  std::string preset = "sphere";
  double r0 = 1.0;
  double s = 3.0;
  double eps = 0.15;
  FbarSpec fbar;  // defaults to e^{-fbar} = 1 + 0.1 P_2
  std::vector<double> coeffs;
};

struct VerifyOptions {
  bool refine = false;       // rerun at doubled resolution and report ratios
  double max_residual = 0.05;
};

struct RunConfig {
  std::string command = "report";  // report | flow | certify | verify | ball-model
  int n = 3;
  GridMode mode = GridMode::Full2D;
  int L = 0;  // 0 = per-mode default (32 full-2D, 170 polar)
  InitialSpec initial;

  double t_final = 2.0;  // flow / verify / ball-model horizon
  FlowControls flow;

  // certify settings
  double s0 = 8.0;
  double certify_t_final = 0.0;  // 0 = per-dimension default (10 for n=3, 12 above)
  double probe_t = 3.0;
  double c0_floor = 1e-8;
  double tail_frac = 0.1;
  double slope_band = 0.3;
  double profile_tol = 1e-3;
  bool force = false;

  RoundnessThresholds thresholds;
  VerifyOptions verify;

  std::string output_dir = "out";
};

RunConfig default_config();

// Parse + validate a JSON config document.  Unknown keys and out-of-range
// values raise ConfigError with a "field.path: message" text.
RunConfig parse_config_json(const std::string& text);

// Resolved config (defaults applied) as JSON, for --print-config.
std::string config_to_json(const RunConfig& cfg);

// Throws ConfigError on any cross-field inconsistency.  Called by
// parse_config_json; call again after applying command-line overrides.
void validate_config(const RunConfig& cfg);

int resolved_band_limit(const RunConfig& cfg);
double resolved_certify_t_final(const RunConfig& cfg);
GridPtr config_grid(const RunConfig& cfg);
GraphSurface build_initial(const RunConfig& cfg, const GridPtr& grid);
CertifySetup config_setup(const RunConfig& cfg);

}  // namespace imcf
