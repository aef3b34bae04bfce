#include "imcf/calculus.hpp"

#include <cmath>

#include "imcf/quadrature.hpp"

namespace imcf {

double integrate_sphere(const SphereField& f) {
  double s = 0.0;
  for (int i = 0; i < f.size(); ++i) s += f.v[i] * f.grid->node_w[i];
  return s;
}

double inner_sphere(const SphereField& a, const SphereField& b) {
  double s = 0.0;
  for (int i = 0; i < a.size(); ++i) s += a.v[i] * b.v[i] * a.grid->node_w[i];
  return s;
}

SphereTensor1 grad_sigma(const FieldJet& jet) {
  const GridPtr& g = jet.u.grid;
  SphereTensor1 t(g);
  t.ct_ = jet.ut.v;
  if (g->mode == GridMode::Full2D) t.cl_ = jet.ul.v;
  return t;
}

// Covariant Hessian in the (theta, lambda) frame.  The only nonzero
// Christoffel symbols of sigma are
//   Gamma^theta_{lam lam} = -sin cos,  Gamma^lam_{theta lam} = cot.
SphereTensor2 hess_sigma(const FieldJet& jet) {
  const GridPtr& gp = jet.u.grid;
  const SphereGrid& g = *gp;
  SphereTensor2 t(gp);
  if (g.mode == GridMode::Full2D) {
    for (int k = 0; k < g.nlat; ++k) {
      const double s = g.st[k], c = g.ct[k];
      for (int j = 0; j < g.nlon; ++j) {
        const int i = g.node(k, j);
        t.tt[i] = jet.utt.v[i];
        t.tl[i] = jet.utl.v[i] - (c / s) * jet.ul.v[i];
        t.ll[i] = jet.ull.v[i] + s * c * jet.ut.v[i];
      }
    }
  } else {
    // Zonal on S^{n-1}: radial component u_tt; each of the n-2 tangential
    // directions carries the mixed component cot(theta) u_theta.
    for (int k = 0; k < g.nlat; ++k) {
      t.tt[k] = jet.utt.v[k];
      t.tan[k] = (g.ct[k] / g.st[k]) * jet.ut.v[k];
    }
  }
  return t;
}

SphereField laplace_sigma(const FieldJet& jet) {
  const SphereGrid& g = *jet.u.grid;
  SphereField out(jet.u.grid);
  if (g.mode == GridMode::Full2D) {
    for (int k = 0; k < g.nlat; ++k) {
      const double s = g.st[k], c = g.ct[k];
      for (int j = 0; j < g.nlon; ++j) {
        const int i = g.node(k, j);
        out.v[i] = jet.utt.v[i] + (c / s) * jet.ut.v[i] + jet.ull.v[i] / (s * s);
      }
    }
  } else {
    for (int k = 0; k < g.nlat; ++k)
      out.v[k] = jet.utt.v[k] + (g.n - 2) * (g.ct[k] / g.st[k]) * jet.ut.v[k];
  }
  return out;
}

SphereTensor1 grad_sigma(const SphereField& u) { return grad_sigma(synthesis(analysis(u), 1)); }
SphereTensor2 hess_sigma(const SphereField& u) { return hess_sigma(synthesis(analysis(u), 2)); }
SphereField laplace_sigma(const SphereField& u) { return laplace_sigma(synthesis(analysis(u), 2)); }

SphereTensor2 traceless_hess_sigma(const SphereField& u) {
  const SphereGrid& g = *u.grid;
  FieldJet jet = synthesis(analysis(u), 2);
  SphereTensor2 t = hess_sigma(jet);
  SphereField lap = laplace_sigma(jet);
  const double inv = 1.0 / (g.n - 1);
  if (g.mode == GridMode::Full2D) {
    for (int k = 0; k < g.nlat; ++k) {
      const double s2 = g.st[k] * g.st[k];
      for (int j = 0; j < g.nlon; ++j) {
        const int i = g.node(k, j);
        t.tt[i] -= lap.v[i] * inv;
        t.ll[i] -= lap.v[i] * inv * s2;  // sigma_{lam lam} = sin^2
      }
    }
  } else {
    for (int k = 0; k < g.nlat; ++k) {
      t.tt[k] -= lap.v[k] * inv;
      t.tan[k] -= lap.v[k] * inv;
    }
  }
  return t;
}

FirstEigenspaceProjection project_first_eigenspace(const SphereField& u) {
  const SphereGrid& g = *u.grid;
  HarmonicCoeffs c = analysis(u);
  const double omega = sphere_area(g.n - 1);
  FirstModes fm;
  fm.ai.assign(g.n, 0.0);
  if (g.mode == GridMode::Polar) {
    fm.a0 = c.a[0] / std::sqrt(omega);
    fm.ai[g.n - 1] = c.a[1] * std::sqrt(g.n / omega);
  } else {
    fm.a0 = c.a[SphereGrid::coef_index(0, 0)] / std::sqrt(omega);
    const double u1 = std::sqrt(g.n / omega);
    fm.ai[0] = c.a[SphereGrid::coef_index(1, 1)] * u1;   // X^1 = sin cos(lam)
    fm.ai[1] = c.a[SphereGrid::coef_index(1, -1)] * u1;  // X^2 = sin sin(lam)
    fm.ai[2] = c.a[SphereGrid::coef_index(1, 0)] * u1;   // X^3 = cos
  }
  FirstEigenspaceProjection out;
  out.projection = first_modes_field(u.grid, fm);
  out.residual = SphereField(u.grid);
  for (size_t i = 0; i < u.v.size(); ++i) out.residual.v[i] = u.v[i] - out.projection.v[i];
  out.modes = std::move(fm);
  return out;
}

SphereField first_modes_field(const GridPtr& grid, const FirstModes& fm) {
  const SphereGrid& g = *grid;
  SphereField out(grid);
  if (g.mode == GridMode::Polar) {
    for (int k = 0; k < g.nlat; ++k) out.v[k] = fm.a0 + fm.ai[g.n - 1] * g.ct[k];
    return out;
  }
  for (int k = 0; k < g.nlat; ++k)
    for (int j = 0; j < g.nlon; ++j) {
      const double x1 = g.st[k] * std::cos(g.lam[j]);
      const double x2 = g.st[k] * std::sin(g.lam[j]);
      out.v[g.node(k, j)] = fm.a0 + fm.ai[0] * x1 + fm.ai[1] * x2 + fm.ai[2] * g.ct[k];
    }
  return out;
}

double first_eigenspace_residual(const SphereField& u) {
  HarmonicCoeffs c = analysis(u);
  const SphereGrid& g = *u.grid;
  double tot = 0.0, high = 0.0;
  if (g.mode == GridMode::Polar) {
    for (int l = 0; l <= g.L; ++l) {
      tot += c.a[l] * c.a[l];
      if (l >= 2) high += c.a[l] * c.a[l];
    }
  } else {
    for (int l = 0; l <= g.L; ++l)
      for (int m = -l; m <= l; ++m) {
        const double e = c.a[SphereGrid::coef_index(l, m)] * c.a[SphereGrid::coef_index(l, m)];
        tot += e;
        if (l >= 2) high += e;
      }
  }
  return tot > 0.0 ? std::sqrt(high / tot) : 0.0;
}

}  // namespace imcf
