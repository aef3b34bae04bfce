#pragma once

#include "imcf/sphere_grid.hpp"
#include "imcf/transforms.hpp"

namespace imcf {

// Star-shaped radial graph r = r_tilde(theta) over S^{n-1} in hyperbolic
// space with metric dr^2 + sinh^2(r) sigma.  r_tilde must be positive and
// band-limited on its grid.
struct GraphSurface {
  int n = 3;
  GridPtr grid;
  SphereField r;

  GraphSurface() = default;
  GraphSurface(GridPtr g, SphereField rr);

  static GraphSurface sphere(const GridPtr& grid, double r0);
  static GraphSurface from_coeffs(const GridPtr& grid, const HarmonicCoeffs& c);
};

// phi = -int_r^inf dx/sinh x = ln tanh(r/2).  Strictly negative; satisfies
// D_i phi = D_i r / sinh r.  Throws std::domain_error if r <= 0 anywhere.
SphereField phi_from_r(const SphereField& r);

}  // namespace imcf
