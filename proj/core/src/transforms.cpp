#include "imcf/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "imcf/quadrature.hpp"

namespace imcf {

namespace {

// Longitude normalization of the real basis: Y_l0 = Q_l0 / sqrt(2 pi),
// Y_lm^{cos,sin} = Q_lm {cos,sin}(m lam) / sqrt(pi).
inline double lon_norm(int m) {
  return m == 0 ? 1.0 / std::sqrt(2.0 * M_PI) : 1.0 / std::sqrt(M_PI);
}

}  // namespace

HarmonicCoeffs analysis(const SphereField& f) {
  const SphereGrid& g = *f.grid;
  HarmonicCoeffs c(f.grid);

  if (g.mode == GridMode::Polar) {
    for (int l = 0; l <= g.L; ++l) {
      const double* G = &g.Gd[0][static_cast<size_t>(l) * g.nlat];
      double s = 0.0;
      for (int k = 0; k < g.nlat; ++k) s += f.v[k] * G[k] * g.node_w[k];
      c.a[l] = s;
    }
    return c;
  }

  const double dl = 2.0 * M_PI / g.nlon;
  std::vector<double> Fc(g.nlat), Fs(g.nlat);
  for (int m = 0; m <= g.L; ++m) {
    const double* cm = &g.cosml[static_cast<size_t>(m) * g.nlon];
    const double* sm = &g.sinml[static_cast<size_t>(m) * g.nlon];
    for (int k = 0; k < g.nlat; ++k) {
      double ac = 0.0, as = 0.0;
      const double* row = &f.v[static_cast<size_t>(k) * g.nlon];
      for (int j = 0; j < g.nlon; ++j) {
        ac += row[j] * cm[j];
        as += row[j] * sm[j];
      }
      Fc[k] = ac * dl;
      Fs[k] = as * dl;
    }
    const double nm = lon_norm(m);
    for (int l = m; l <= g.L; ++l) {
      const double* Q = &g.Qd[0][static_cast<size_t>(g.tri(l, m)) * g.nlat];
      double sc = 0.0, ss = 0.0;
      for (int k = 0; k < g.nlat; ++k) {
        sc += Fc[k] * Q[k] * g.wlat[k];
        ss += Fs[k] * Q[k] * g.wlat[k];
      }
      c.a[SphereGrid::coef_index(l, m)] = sc * nm;
      if (m > 0) c.a[SphereGrid::coef_index(l, -m)] = ss * nm;
    }
  }
  return c;
}

FieldJet synthesis(const HarmonicCoeffs& c, int order) {
  const SphereGrid& g = *c.grid;
  if (order < 0 || order > 3) throw std::invalid_argument("synthesis: order must be 0..3");

  FieldJet jet;
  jet.u = SphereField(c.grid);
  if (order >= 1) jet.ut = SphereField(c.grid);
  if (order >= 2) jet.utt = SphereField(c.grid);
  if (order >= 3) jet.uttt = SphereField(c.grid);

  if (g.mode == GridMode::Polar) {
    for (int k = 0; k < g.nlat; ++k) {
      double acc[4] = {0, 0, 0, 0};
      for (int l = 0; l <= g.L; ++l) {
        const double al = c.a[l];
        if (al == 0.0) continue;
        const size_t at = static_cast<size_t>(l) * g.nlat + k;
        for (int d = 0; d <= order; ++d) acc[d] += al * g.Gd[d][at];
      }
      jet.u.v[k] = acc[0];
      if (order >= 1) jet.ut.v[k] = acc[1];
      if (order >= 2) jet.utt.v[k] = acc[2];
      if (order >= 3) jet.uttt.v[k] = acc[3];
    }
    return jet;
  }

  if (order >= 1) jet.ul = SphereField(c.grid);
  if (order >= 2) {
    jet.utl = SphereField(c.grid);
    jet.ull = SphereField(c.grid);
  }
  if (order >= 3) {
    jet.uttl = SphereField(c.grid);
    jet.utll = SphereField(c.grid);
    jet.ulll = SphereField(c.grid);
  }

  // Per colatitude and order m, accumulate Gc[d] = sum_l a^cos_{lm} Q^{(d)}_{lm}
  // and likewise Gs[d]; longitude factors are then applied per node.
  const int nm = g.L + 1;
  std::vector<double> Gc(static_cast<size_t>(4) * nm), Gs(static_cast<size_t>(4) * nm);
  for (int k = 0; k < g.nlat; ++k) {
    std::fill(Gc.begin(), Gc.end(), 0.0);
    std::fill(Gs.begin(), Gs.end(), 0.0);
    for (int m = 0; m <= g.L; ++m) {
      const double norm = lon_norm(m);
      for (int l = m; l <= g.L; ++l) {
        const double ac = c.a[SphereGrid::coef_index(l, m)] * norm;
        const double as = m > 0 ? c.a[SphereGrid::coef_index(l, -m)] * norm : 0.0;
        if (ac == 0.0 && as == 0.0) continue;
        const size_t at = static_cast<size_t>(g.tri(l, m)) * g.nlat + k;
        for (int d = 0; d <= order; ++d) {
          Gc[static_cast<size_t>(d) * nm + m] += ac * g.Qd[d][at];
          Gs[static_cast<size_t>(d) * nm + m] += as * g.Qd[d][at];
        }
      }
    }
    for (int j = 0; j < g.nlon; ++j) {
      const int node = g.node(k, j);
      double u = 0, ut = 0, utt = 0, uttt = 0;
      double ul = 0, utl = 0, ull = 0, uttl = 0, utll = 0, ulll = 0;
      for (int m = 0; m <= g.L; ++m) {
        const double cm = g.cosml[static_cast<size_t>(m) * g.nlon + j];
        const double sm = g.sinml[static_cast<size_t>(m) * g.nlon + j];
        const double gc0 = Gc[m], gs0 = Gs[m];
        u += gc0 * cm + gs0 * sm;
        if (order >= 1) {
          const double gc1 = Gc[static_cast<size_t>(1) * nm + m];
          const double gs1 = Gs[static_cast<size_t>(1) * nm + m];
          ut += gc1 * cm + gs1 * sm;
          ul += m * (-gc0 * sm + gs0 * cm);
          if (order >= 2) {
            const double gc2 = Gc[static_cast<size_t>(2) * nm + m];
            const double gs2 = Gs[static_cast<size_t>(2) * nm + m];
            utt += gc2 * cm + gs2 * sm;
            utl += m * (-gc1 * sm + gs1 * cm);
            ull += -static_cast<double>(m) * m * (gc0 * cm + gs0 * sm);
            if (order >= 3) {
              const double gc3 = Gc[static_cast<size_t>(3) * nm + m];
              const double gs3 = Gs[static_cast<size_t>(3) * nm + m];
              uttt += gc3 * cm + gs3 * sm;
              uttl += m * (-gc2 * sm + gs2 * cm);
              utll += -static_cast<double>(m) * m * (gc1 * cm + gs1 * sm);
              ulll += static_cast<double>(m) * m * m * (gc0 * sm - gs0 * cm);
            }
          }
        }
      }
      jet.u.v[node] = u;
      if (order >= 1) {
        jet.ut.v[node] = ut;
        jet.ul.v[node] = ul;
      }
      if (order >= 2) {
        jet.utt.v[node] = utt;
        jet.utl.v[node] = utl;
        jet.ull.v[node] = ull;
      }
      if (order >= 3) {
        jet.uttt.v[node] = uttt;
        jet.uttl.v[node] = uttl;
        jet.utll.v[node] = utll;
        jet.ulll.v[node] = ulll;
      }
    }
  }
  return jet;
}

SphereField synthesis_values(const HarmonicCoeffs& c) { return synthesis(c, 0).u; }

namespace {

// Q_{lm}(theta) for all l at fixed m, by the same recurrences the tables use.
void alp_fixed_m(int L, int m, double theta, std::vector<double>& out) {
  const double s = std::sin(theta), ct = std::cos(theta);
  double sect = 1.0 / std::sqrt(2.0);
  for (int mm = 1; mm <= m; ++mm) sect *= std::sqrt((2.0 * mm + 1.0) / (2.0 * mm)) * s;
  out.assign(L + 1 - m, 0.0);
  out[0] = sect;
  if (m == L) return;
  out[1] = std::sqrt(2.0 * m + 3.0) * ct * sect;
  for (int l = m + 2; l <= L; ++l) {
    const double a = std::sqrt((4.0 * l * l - 1.0) / (static_cast<double>(l) * l - static_cast<double>(m) * m));
    const double b = std::sqrt((2.0 * l + 1.0) * ((l - 1.0) * (l - 1.0) - static_cast<double>(m) * m) /
                               ((2.0 * l - 3.0) * (static_cast<double>(l) * l - static_cast<double>(m) * m)));
    out[l - m] = a * ct * out[l - m - 1] - b * out[l - m - 2];
  }
}

}  // namespace

double evaluate(const HarmonicCoeffs& c, double theta, double lambda) {
  const SphereGrid& g = *c.grid;
  if (g.mode == GridMode::Polar) {
    const double lam = 0.5 * (g.n - 2);
    const double omega_fiber = sphere_area(g.n - 2);
    const double ct = std::cos(theta);
    double prev2 = 1.0, prev1 = 2.0 * lam * ct, sum = 0.0;
    for (int l = 0; l <= g.L; ++l) {
      double cl;
      if (l == 0) cl = prev2;
      else if (l == 1) cl = prev1;
      else {
        cl = (2.0 * (l + lam - 1.0) * ct * prev1 - (l + 2.0 * lam - 2.0) * prev2) / l;
        prev2 = prev1;
        prev1 = cl;
      }
      const double logh = std::log(M_PI) + (1.0 - 2.0 * lam) * std::log(2.0) +
                          std::lgamma(l + 2.0 * lam) - std::lgamma(l + 1.0) -
                          std::log(l + lam) - 2.0 * std::lgamma(lam);
      sum += c.a[l] * cl / std::sqrt(omega_fiber * std::exp(logh));
    }
    return sum;
  }
  double sum = 0.0;
  std::vector<double> col;
  for (int m = 0; m <= g.L; ++m) {
    alp_fixed_m(g.L, m, theta, col);
    const double nm = lon_norm(m);
    const double cm = std::cos(m * lambda), sm = std::sin(m * lambda);
    for (int l = m; l <= g.L; ++l) {
      sum += c.a[SphereGrid::coef_index(l, m)] * nm * col[l - m] * cm;
      if (m > 0) sum += c.a[SphereGrid::coef_index(l, -m)] * nm * col[l - m] * sm;
    }
  }
  return sum;
}

double tail_fraction(const HarmonicCoeffs& c, int Lsplit) {
  const SphereGrid& g = *c.grid;
  double tot = 0.0, tail = 0.0;
  if (g.mode == GridMode::Polar) {
    for (int l = 0; l <= g.L; ++l) {
      const double e = c.a[l] * c.a[l];
      tot += e;
      if (l > Lsplit) tail += e;
    }
  } else {
    for (int l = 0; l <= g.L; ++l)
      for (int m = -l; m <= l; ++m) {
        const double e = c.a[SphereGrid::coef_index(l, m)] * c.a[SphereGrid::coef_index(l, m)];
        tot += e;
        if (l > Lsplit) tail += e;
      }
  }
  return tot > 0.0 ? tail / tot : 0.0;
}

HarmonicCoeffs truncated(const HarmonicCoeffs& c, int Lmax) {
  const SphereGrid& g = *c.grid;
  HarmonicCoeffs out = c;
  if (g.mode == GridMode::Polar) {
    for (int l = Lmax + 1; l <= g.L; ++l) out.a[l] = 0.0;
  } else {
    for (int l = Lmax + 1; l <= g.L; ++l)
      for (int m = -l; m <= l; ++m) out.a[SphereGrid::coef_index(l, m)] = 0.0;
  }
  return out;
}

HarmonicCoeffs regrid(const HarmonicCoeffs& c, const GridPtr& dst) {
  const SphereGrid& gs = *c.grid;
  const SphereGrid& gd = *dst;
  if (gs.n != gd.n || gs.mode != gd.mode)
    throw std::invalid_argument("regrid: dimension/mode mismatch");
  HarmonicCoeffs out(dst);
  const int Lc = std::min(gs.L, gd.L);
  if (gs.mode == GridMode::Polar) {
    for (int l = 0; l <= Lc; ++l) out.a[l] = c.a[l];
  } else {
    for (int l = 0; l <= Lc; ++l)
      for (int m = -l; m <= l; ++m)
        out.a[SphereGrid::coef_index(l, m)] = c.a[SphereGrid::coef_index(l, m)];
  }
  return out;
}

}  // namespace imcf
