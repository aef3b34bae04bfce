#pragma once

#include <string>

#include "imcf/certify.hpp"
#include "imcf/flow.hpp"
#include "imcf/geometry.hpp"
#include "imcf/roundness.hpp"
#include "imcf/transforms.hpp"

namespace imcf {

// Shortest exact decimal for a double (%.17g), so files round-trip and
// reruns are byte-identical.
std::string fmt17(double x);

// Node values as text: one JSON header line (n, L, mode, layout), then one
// comma-separated row per latitude, row-major latitude-then-longitude.
std::string field_to_text(const SphereField& f);
SphereField field_from_text(const std::string& text);

// Harmonic coefficients as a JSON document with entries ordered by (l, m).
std::string coeffs_to_json(const HarmonicCoeffs& c);

// Flow trace as CSV with the fixed column set.  The residual columns are
// relative (normalized by the size of each identity's right-hand side).
std::string trace_to_csv(const FlowTrace& tr);

std::string geometry_report_to_json(const GeometryReport& rep);
std::string roundness_report_to_json(const RoundnessReport& rep);
std::string certification_report_to_json(const CertificationReport& rep);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace imcf
