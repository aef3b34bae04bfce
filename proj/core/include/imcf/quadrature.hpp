#pragma once

#include <vector>

namespace imcf {

struct QuadratureRule {
  std::vector<double> x;  // nodes in (-1, 1), ascending
  std::vector<double> w;  // positive weights
};

// Gauss rule for the weight (1-x^2)^(lambda-1/2) on [-1,1], i.e. the
// Gegenbauer weight with parameter lambda.  lambda = 1/2 gives plain
// Gauss-Legendre.  Nodes/weights come from the symmetric tridiagonal
// eigenproblem of the monic three-term recurrence (Golub-Welsch); exact for
// polynomial integrands of degree <= 2*npts - 1.
QuadratureRule gauss_gegenbauer(int npts, double lambda);

inline QuadratureRule gauss_legendre(int npts) {
  return gauss_gegenbauer(npts, 0.5);
}

// Surface measure |S^d| of the unit d-sphere.
double sphere_area(int d);

}  // namespace imcf
