#pragma once

#include "imcf/sphere_grid.hpp"

namespace imcf {

// Coefficients of a scalar field in the grid's orthonormal basis.  Full2D
// layout is idx = l^2 + l + m with m in [-l, l] (m > 0 cos, m < 0 sin);
// Polar layout is just idx = l.
struct HarmonicCoeffs {
  GridPtr grid;
  std::vector<double> a;

  HarmonicCoeffs() = default;
  explicit HarmonicCoeffs(GridPtr g) : grid(std::move(g)), a(grid->ncoef(), 0.0) {}
};

// Partial theta/lambda derivatives of a field at the grid nodes, filled up to
// the requested order.  Polar grids only populate the pure-theta entries.
struct FieldJet {
  SphereField u;
  SphereField ut, ul;                    // order 1
  SphereField utt, utl, ull;             // order 2
  SphereField uttt, uttl, utll, ulll;    // order 3
};

// Forward transform.  Exact (to roundoff) for fields band-limited to the
// grid's degree L, by Gauss quadrature in colatitude and the trapezoid rule
// in longitude.
HarmonicCoeffs analysis(const SphereField& f);

// Inverse transform with derivatives up to `order` (0..3).
FieldJet synthesis(const HarmonicCoeffs& c, int order);
SphereField synthesis_values(const HarmonicCoeffs& c);

// Point evaluation away from the nodes (basis recurrences evaluated on the
// fly).  lambda is ignored for polar grids.
double evaluate(const HarmonicCoeffs& c, double theta, double lambda);

// Energy fraction sum_{l > Lsplit} a^2 / sum a^2 (0 if the field is null).
double tail_fraction(const HarmonicCoeffs& c, int Lsplit);

// Copy with all degrees above Lmax zeroed.
HarmonicCoeffs truncated(const HarmonicCoeffs& c, int Lmax);

// Re-index coefficients onto another grid of the same dimension and mode
// (degrees present in both are copied, the rest are zero).
HarmonicCoeffs regrid(const HarmonicCoeffs& c, const GridPtr& dst);

}  // namespace imcf
