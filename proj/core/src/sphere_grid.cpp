#include "imcf/sphere_grid.hpp"

#include <cmath>
#include <stdexcept>

#include "imcf/quadrature.hpp"

namespace imcf {

namespace {

// Derivative propagation helpers.  Each basis value is carried as the 4-vector
// (f, f', f'', f''') of theta-derivatives at a fixed node.

struct D4 {
  double d[4] = {0, 0, 0, 0};
};

// f = sin(theta) * g
D4 sin_prod(const D4& g, double s, double c) {
  D4 f;
  f.d[0] = s * g.d[0];
  f.d[1] = c * g.d[0] + s * g.d[1];
  f.d[2] = -s * g.d[0] + 2 * c * g.d[1] + s * g.d[2];
  f.d[3] = -c * g.d[0] - 3 * s * g.d[1] + 3 * c * g.d[2] + s * g.d[3];
  return f;
}

// f = cos(theta) * g
D4 cos_prod(const D4& g, double s, double c) {
  D4 f;
  f.d[0] = c * g.d[0];
  f.d[1] = -s * g.d[0] + c * g.d[1];
  f.d[2] = -c * g.d[0] - 2 * s * g.d[1] + c * g.d[2];
  f.d[3] = s * g.d[0] - 3 * c * g.d[1] - 3 * s * g.d[2] + c * g.d[3];
  return f;
}

D4 axpy(double a, const D4& x, double b, const D4& y) {
  D4 r;
  for (int i = 0; i < 4; ++i) r.d[i] = a * x.d[i] + b * y.d[i];
  return r;
}

}  // namespace

std::shared_ptr<const SphereGrid> SphereGrid::create(int n, GridMode mode, int L) {
  if (n < 3) throw std::invalid_argument("SphereGrid: ambient dimension n must be >= 3");
  if (mode == GridMode::Full2D && n != 3)
    throw std::invalid_argument("SphereGrid: Full2D grids are only defined for n = 3");
  if (L < 2) throw std::invalid_argument("SphereGrid: band limit must be >= 2");

  auto g = std::make_shared<SphereGrid>();
  g->n = n;
  g->mode = mode;
  g->L = L;
  g->nlat = L + 1;
  g->nlon = (mode == GridMode::Full2D) ? 2 * L + 1 : 1;

  // Colatitude nodes from the Gauss rule for weight (1-x^2)^{(n-3)/2};
  // for n = 3 that is plain Gauss-Legendre.  Stored with theta ascending.
  const double lambda_w = 0.5 * (n - 2);
  QuadratureRule rule = gauss_gegenbauer(g->nlat, lambda_w);
  g->theta.resize(g->nlat);
  g->x.resize(g->nlat);
  g->st.resize(g->nlat);
  g->ct.resize(g->nlat);
  g->wlat.resize(g->nlat);
  for (int k = 0; k < g->nlat; ++k) {
    const int src = g->nlat - 1 - k;  // rule is ascending in x = cos(theta)
    g->x[k] = rule.x[src];
    g->wlat[k] = rule.w[src];
    g->theta[k] = std::acos(g->x[k]);
    g->st[k] = std::sin(g->theta[k]);
    g->ct[k] = g->x[k];
  }

  g->node_w.resize(g->nnodes());
  if (mode == GridMode::Full2D) {
    g->lam.resize(g->nlon);
    const double dl = 2.0 * M_PI / g->nlon;
    for (int j = 0; j < g->nlon; ++j) g->lam[j] = dl * j;
    for (int k = 0; k < g->nlat; ++k)
      for (int j = 0; j < g->nlon; ++j) g->node_w[g->node(k, j)] = g->wlat[k] * dl;

    // Longitude tables.
    g->cosml.resize((L + 1) * g->nlon);
    g->sinml.resize((L + 1) * g->nlon);
    for (int m = 0; m <= L; ++m)
      for (int j = 0; j < g->nlon; ++j) {
        g->cosml[m * g->nlon + j] = std::cos(m * g->lam[j]);
        g->sinml[m * g->nlon + j] = std::sin(m * g->lam[j]);
      }

    // Normalized associated Legendre tables Q_{lm} with theta-derivatives,
    // built by forward recurrence in l at fixed m:
    //   Q_mm     = sqrt((2m+1)/(2m)) sin(theta) Q_{m-1,m-1}
    //   Q_{m+1,m} = sqrt(2m+3) cos(theta) Q_mm
    //   Q_lm     = a_lm cos(theta) Q_{l-1,m} - b_lm Q_{l-2,m}
    const int ntri = (L + 1) * (L + 2) / 2;
    for (auto& t : g->Qd) t.resize(static_cast<size_t>(ntri) * g->nlat);

    for (int k = 0; k < g->nlat; ++k) {
      const double s = g->st[k], c = g->ct[k];
      D4 sect;
      sect.d[0] = 1.0 / std::sqrt(2.0);  // Q_00
      for (int m = 0; m <= L; ++m) {
        if (m > 0) sect = axpy(std::sqrt((2.0 * m + 1.0) / (2.0 * m)), sin_prod(sect, s, c), 0.0, sect);
        auto store = [&](int l, int mm, const D4& val) {
          const size_t at = static_cast<size_t>(g->tri(l, mm)) * g->nlat + k;
          for (int d = 0; d < 4; ++d) g->Qd[d][at] = val.d[d];
        };
        store(m, m, sect);
        if (m == L) break;
        D4 prev2 = sect;
        D4 prev1 = axpy(std::sqrt(2.0 * m + 3.0), cos_prod(sect, s, c), 0.0, sect);
        store(m + 1, m, prev1);
        for (int l = m + 2; l <= L; ++l) {
          const double a = std::sqrt((4.0 * l * l - 1.0) / (static_cast<double>(l) * l - static_cast<double>(m) * m));
          const double b = std::sqrt((2.0 * l + 1.0) * ((l - 1.0) * (l - 1.0) - static_cast<double>(m) * m) /
                                     ((2.0 * l - 3.0) * (static_cast<double>(l) * l - static_cast<double>(m) * m)));
          D4 cur = axpy(a, cos_prod(prev1, s, c), -b, prev2);
          store(l, m, cur);
          prev2 = prev1;
          prev1 = cur;
        }
      }
    }
  } else {
    const double omega_fiber = sphere_area(n - 2);  // |S^{n-2}|
    for (int k = 0; k < g->nlat; ++k) g->node_w[k] = g->wlat[k] * omega_fiber;

    // Zonal tables: Gegenbauer C_l^lambda(cos theta) built by the three-term
    // recurrence, then scaled so that int_{S^{n-1}} G_l G_m = delta_lm.
    const double lam = 0.5 * (n - 2);
    for (auto& t : g->Gd) t.resize(static_cast<size_t>(L + 1) * g->nlat);
    std::vector<double> scale(L + 1);
    for (int l = 0; l <= L; ++l) {
      // ||C_l||^2 under (1-x^2)^{lam-1/2} dx, in log space for large l.
      const double logh = std::log(M_PI) + (1.0 - 2.0 * lam) * std::log(2.0) +
                          std::lgamma(l + 2.0 * lam) - std::lgamma(l + 1.0) -
                          std::log(l + lam) - 2.0 * std::lgamma(lam);
      scale[l] = 1.0 / std::sqrt(omega_fiber * std::exp(logh));
    }
    for (int k = 0; k < g->nlat; ++k) {
      const double s = g->st[k], c = g->ct[k];
      D4 prev2;  // C_0 = 1
      prev2.d[0] = 1.0;
      D4 prev1 = axpy(2.0 * lam, cos_prod(prev2, s, c), 0.0, prev2);  // C_1
      auto store = [&](int l, const D4& val) {
        const size_t at = static_cast<size_t>(l) * g->nlat + k;
        for (int d = 0; d < 4; ++d) g->Gd[d][at] = scale[l] * val.d[d];
      };
      store(0, prev2);
      if (L >= 1) store(1, prev1);
      for (int l = 2; l <= L; ++l) {
        D4 cur = axpy(2.0 * (l + lam - 1.0) / l, cos_prod(prev1, s, c),
                      -(l + 2.0 * lam - 2.0) / l, prev2);
        store(l, cur);
        prev2 = prev1;
        prev1 = cur;
      }
    }
  }
  return g;
}

double SphereTensor1::norm2_sigma(int i) const {
  if (grid->mode == GridMode::Full2D) {
    const double s = grid->st[i / grid->nlon];
    return ct_[i] * ct_[i] + cl_[i] * cl_[i] / (s * s);
  }
  return ct_[i] * ct_[i];
}

double SphereTensor2::trace_sigma(int i) const {
  if (grid->mode == GridMode::Full2D) {
    const double s = grid->st[i / grid->nlon];
    return tt[i] + ll[i] / (s * s);
  }
  return tt[i] + (grid->n - 2) * tan[i];
}

double SphereTensor2::norm2_sigma(int i) const {
  if (grid->mode == GridMode::Full2D) {
    const double s2 = grid->st[i / grid->nlon] * grid->st[i / grid->nlon];
    const double mtt = tt[i];
    const double mtl = tl[i];
    const double mll = ll[i] / s2;
    return mtt * mtt + 2.0 * mtl * mtl / s2 + mll * mll;
  }
  return tt[i] * tt[i] + (grid->n - 2) * tan[i] * tan[i];
}

}  // namespace imcf
