#include "imcf/surface.hpp"

#include <cmath>
#include <stdexcept>

namespace imcf {

GraphSurface::GraphSurface(GridPtr g, SphereField rr) : n(g->n), grid(std::move(g)), r(std::move(rr)) {
  for (double x : r.v)
    if (!(x > 0.0) || !std::isfinite(x))
      throw std::domain_error("GraphSurface: radial function must be positive and finite");
}

GraphSurface GraphSurface::sphere(const GridPtr& grid, double r0) {
  if (!(r0 > 0.0)) throw std::domain_error("GraphSurface::sphere: radius must be > 0");
  SphereField r(grid);
  std::fill(r.v.begin(), r.v.end(), r0);
  return GraphSurface(grid, std::move(r));
}

GraphSurface GraphSurface::from_coeffs(const GridPtr& grid, const HarmonicCoeffs& c) {
  return GraphSurface(grid, synthesis_values(c));
}

SphereField phi_from_r(const SphereField& r) {
  SphereField phi(r.grid);
  for (int i = 0; i < r.size(); ++i) {
    if (!(r.v[i] > 0.0))
      throw std::domain_error("phi_from_r: r must be positive everywhere");
    // ln tanh(r/2) = -2 atanh(e^{-r}), which keeps full relative accuracy
    // for large r where tanh(r/2) rounds to 1
    phi.v[i] = -2.0 * std::atanh(std::exp(-r.v[i]));
  }
  return phi;
}

}  // namespace imcf
