#pragma once

#include "imcf/sphere_grid.hpp"
#include "imcf/transforms.hpp"

namespace imcf {

// Round-metric integral sum_i f_i w_i; exact for band-limited integrands.
double integrate_sphere(const SphereField& f);
double inner_sphere(const SphereField& a, const SphereField& b);

// Covariant derivative operators of the round metric sigma.  These go through
// analysis + synthesis, so the input should be resolved on its grid.
SphereTensor1 grad_sigma(const SphereField& u);
SphereTensor2 hess_sigma(const SphereField& u);
SphereField laplace_sigma(const SphereField& u);
// Hess u - (Lap u / (n-1)) sigma, the trace-free part.
SphereTensor2 traceless_hess_sigma(const SphereField& u);

// Same operators from an already-synthesized jet (no extra transforms).
SphereTensor1 grad_sigma(const FieldJet& jet);
SphereTensor2 hess_sigma(const FieldJet& jet);
SphereField laplace_sigma(const FieldJet& jet);

// Orthogonal projection of u onto span{1, X^1, ..., X^n} (the constants plus
// the restrictions of the ambient coordinates, i.e. the first Laplace
// eigenfunctions).  ai is indexed by coordinate; polar grids can only see
// X^n = cos(theta), the other entries stay 0.
struct FirstModes {
  double a0 = 0.0;
  std::vector<double> ai;  // size n
};
struct FirstEigenspaceProjection {
  FirstModes modes;
  SphereField projection;  // a0 + sum ai X^i sampled on the grid
  SphereField residual;    // u - projection
};
FirstEigenspaceProjection project_first_eigenspace(const SphereField& u);

// Field a0 + sum ai X^i on the grid.
SphereField first_modes_field(const GridPtr& grid, const FirstModes& fm);

// Relative L^2 distance of u from span{1, X^i}:
//   || u - P u || / || u ||   (0 for the zero field).
double first_eigenspace_residual(const SphereField& u);

}  // namespace imcf
