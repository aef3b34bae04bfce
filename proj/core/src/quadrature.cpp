#include "imcf/quadrature.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace imcf {

// Monic Gegenbauer recurrence p_{k+1} = x p_k - beta_k p_{k-1} (alpha_k = 0 by
// symmetry of the weight).  beta_k = k (k + 2 lambda - 1) / (4 (k + lambda)(k + lambda - 1))
// and mu0 = integral of the weight = sqrt(pi) Gamma(lambda + 1/2) / Gamma(lambda + 1).
QuadratureRule gauss_gegenbauer(int npts, double lambda) {
  if (npts < 1) throw std::invalid_argument("gauss_gegenbauer: npts < 1");
  if (lambda <= 0.0) throw std::invalid_argument("gauss_gegenbauer: lambda <= 0");

  const double mu0 =
      std::sqrt(M_PI) * std::exp(std::lgamma(lambda + 0.5) - std::lgamma(lambda + 1.0));

  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(npts, npts);
  for (int k = 1; k < npts; ++k) {
    const double beta =
        k * (k + 2.0 * lambda - 1.0) / (4.0 * (k + lambda) * (k + lambda - 1.0));
    const double off = std::sqrt(beta);
    J(k, k - 1) = off;
    J(k - 1, k) = off;
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("gauss_gegenbauer: eigensolve failed");

  QuadratureRule rule;
  rule.x.resize(npts);
  rule.w.resize(npts);
  for (int i = 0; i < npts; ++i) {
    rule.x[i] = es.eigenvalues()(i);  // ascending
    const double v0 = es.eigenvectors()(0, i);
    rule.w[i] = mu0 * v0 * v0;
  }
  return rule;
}

double sphere_area(int d) {
  // |S^d| = 2 pi^{(d+1)/2} / Gamma((d+1)/2)
  return 2.0 * std::pow(M_PI, 0.5 * (d + 1)) / std::tgamma(0.5 * (d + 1));
}

}  // namespace imcf
