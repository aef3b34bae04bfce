#include "imcf/geometry.hpp"

#include <cmath>
#include <limits>

#include "imcf/calculus.hpp"
#include "imcf/quadrature.hpp"

namespace imcf {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Derivatives of phi(r) = ln tanh(r/2):
//   phi' = 1/sinh, phi'' = -cosh/sinh^2, phi''' = (cosh^2+1)/sinh^3.
struct PhiChain {
  double F1, F2, F3;
  explicit PhiChain(double S, double C)
      : F1(1.0 / S), F2(-C / (S * S)), F3((C * C + 1.0) / (S * S * S)) {}
};

// ----------------------------------------------------------------------
// Full 2-D route (n = 3).  Works in the (theta, lambda) frame; everything
// below is per node, with covariant components assembled from the partial
// derivatives of r and the round-metric Christoffel symbols.
// ----------------------------------------------------------------------

void build_full2d(const GraphSurface& srf, const GeometryOptions& opt, GeometryReport& rep) {
  const GridPtr& gp = srf.grid;
  const SphereGrid& g = *gp;
  const int nn = g.nnodes();
  const int order = opt.with_grad_a ? 3 : 2;
  const FieldJet jet = synthesis(analysis(srf.r), order);

  rep.v = SphereField(gp);
  rep.H = SphereField(gp);
  rep.Hgap = SphereField(gp);
  rep.A2 = SphereField(gp);
  rep.Aring2 = SphereField(gp);
  rep.dens = SphereField(gp);
  rep.shape.grid = gp;
  rep.shape.tt.assign(nn, 0.0);
  rep.shape.tl.assign(nn, 0.0);
  rep.shape.lt.assign(nn, 0.0);
  rep.shape.ll.assign(nn, 0.0);
  if (opt.with_grad_a) rep.gradA2 = SphereField(gp);

  // Stashes for the H-derivative phase.
  std::vector<double> gi[3];  // inverse metric: tt, tl, ll
  std::vector<double> Gam[2][3];  // Christoffels of g: Gam[a][ki], ki in {tt,tl,ll}
  std::vector<double> m0[4];  // traceless mixed shape: tt, tl, lt, ll
  for (auto& x : gi) x.assign(nn, 0.0);
  for (auto& x : m0) x.assign(nn, 0.0);
  for (auto& row : Gam)
    for (auto& x : row) x.assign(nn, 0.0);

  double sup_cross = 0.0, sup_a2 = 0.0;

  for (int k = 0; k < g.nlat; ++k) {
    const double s_ = g.st[k], c_ = g.ct[k];
    const double s2 = s_ * s_;
    for (int j = 0; j < g.nlon; ++j) {
      const int i = g.node(k, j);
      const double r = jet.u.v[i];
      const double rt = jet.ut.v[i], rl = jet.ul.v[i];
      const double rtt = jet.utt.v[i], rtl = jet.utl.v[i], rll = jet.ull.v[i];
      const double S = std::sinh(r), C = std::cosh(r);
      const double S2 = S * S;
      const PhiChain F(S, C);

      const double pt = F.F1 * rt, pl = F.F1 * rl;
      const double ptt = F.F2 * rt * rt + F.F1 * rtt;
      const double ptl = F.F2 * rt * rl + F.F1 * rtl;
      const double pll = F.F2 * rl * rl + F.F1 * rll;

      // covariant Hessian of phi
      const double Pc_tt = ptt;
      const double Pc_tl = ptl - (c_ / s_) * pl;
      const double Pc_ll = pll + s_ * c_ * pt;

      const double dp2 = pt * pt + pl * pl / s2;
      const double v2 = 1.0 + dp2;
      const double v = std::sqrt(v2);

      // induced metric g = sinh^2 r (sigma + dphi x dphi) and its inverse
      const double M_tt = 1.0 + pt * pt, M_tl = pt * pl, M_ll = s2 + pl * pl;
      const double gtt = S2 * M_tt, gtl = S2 * M_tl, gll = S2 * M_ll;
      const double det = gtt * gll - gtl * gtl;
      const double gi_tt = gll / det, gi_tl = -gtl / det, gi_ll = gtt / det;

      // The mixed shape operator splits off its round part exactly:
      //   h^i_j = (cosh(r) delta^i_j - W^i_j) / (sinh(r) v),  W = M^{-1} Pc.
      // All curvature deviations live in W (Pc scale, exponentially small at
      // large radius), so |Aring|^2 and H - 2 never suffer the catastrophic
      // cancellation that forming |A|^2 - H^2/2 out of O(1) entries would.
      const double Wtt = S2 * (gi_tt * Pc_tt + gi_tl * Pc_tl);
      const double Wtl = S2 * (gi_tt * Pc_tl + gi_tl * Pc_ll);
      const double Wlt = S2 * (gi_tl * Pc_tt + gi_ll * Pc_tl);
      const double Wll = S2 * (gi_tl * Pc_tl + gi_ll * Pc_ll);
      const double trW = Wtt + Wll;
      const double trW2 = Wtt * Wtt + 2.0 * Wtl * Wlt + Wll * Wll;
      const double Aring2 = (trW2 - 0.5 * trW * trW) / (v2 * S2);

      // cosh(r) - v sinh(r) = e^{-r} - sinh(r)|dphi|^2/(1+v), every term small
      const double CmSv = std::exp(-r) - S * dp2 / (1.0 + v);
      const double Hgap = (2.0 * CmSv - trW) / (S * v);
      const double H = 2.0 + Hgap;
      const double A2 = 0.5 * H * H + Aring2;

      const double htt = (C - Wtt) / (S * v);
      const double htl = -Wtl / (S * v);
      const double hlt = -Wlt / (S * v);
      const double hll = (C - Wll) / (S * v);

      // direct route through the O(1) mixed entries, kept as a cross-check
      // of the index bookkeeping (it agrees to roundoff at the |A|^2 scale)
      const double Hn = htt + hll;
      const double A2n = htt * htt + 2.0 * htl * hlt + hll * hll;
      sup_cross = std::max(sup_cross, std::abs((A2n - 0.5 * Hn * Hn) - Aring2));
      sup_a2 = std::max(sup_a2, std::abs(A2));

      // covariant second fundamental form (for |grad A|^2 below)
      const double h_tt = (S / v) * (C * M_tt - Pc_tt);
      const double h_tl = (S / v) * (C * M_tl - Pc_tl);
      const double h_ll = (S / v) * (C * M_ll - Pc_ll);

      rep.v.v[i] = v;
      rep.H.v[i] = H;
      rep.Hgap.v[i] = Hgap;
      rep.A2.v[i] = A2;
      rep.Aring2.v[i] = Aring2;
      rep.dens.v[i] = S2 * v;
      rep.shape.tt[i] = htt;
      rep.shape.tl[i] = htl;
      rep.shape.lt[i] = hlt;
      rep.shape.ll[i] = hll;
      m0[0][i] = -(Wtt - 0.5 * trW) / (S * v);
      m0[1][i] = -Wtl / (S * v);
      m0[2][i] = -Wlt / (S * v);
      m0[3][i] = -(Wll - 0.5 * trW) / (S * v);

      // first derivatives of the metric, for Christoffels of g
      const double SC2 = 2.0 * S * C;
      const double dg[2][3] = {
          {SC2 * rt * M_tt + S2 * 2.0 * pt * ptt,
           SC2 * rt * M_tl + S2 * (ptt * pl + pt * ptl),
           SC2 * rt * M_ll + S2 * (2.0 * s_ * c_ + 2.0 * pl * ptl)},
          {SC2 * rl * M_tt + S2 * 2.0 * pt * ptl,
           SC2 * rl * M_tl + S2 * (ptl * pl + pt * pll),
           SC2 * rl * M_ll + S2 * 2.0 * pl * pll}};

      const double gin[2][2] = {{gi_tt, gi_tl}, {gi_tl, gi_ll}};
      auto dcomp = [&](int kk, int a, int b) {  // d_kk g_ab
        return dg[kk][a + b];                   // (0,0)->0, (0,1)/(1,0)->1, (1,1)->2
      };
      double Gloc[2][2][2];  // Gamma^a_{ki}
      for (int a = 0; a < 2; ++a)
        for (int kk = 0; kk < 2; ++kk)
          for (int ii = kk; ii < 2; ++ii) {
            double sum = 0.0;
            for (int m = 0; m < 2; ++m)
              sum += gin[a][m] * (dcomp(kk, m, ii) + dcomp(ii, m, kk) - dcomp(m, kk, ii));
            Gloc[a][kk][ii] = 0.5 * sum;
            Gloc[a][ii][kk] = Gloc[a][kk][ii];
          }
      for (int a = 0; a < 2; ++a) {
        Gam[a][0][i] = Gloc[a][0][0];
        Gam[a][1][i] = Gloc[a][0][1];
        Gam[a][2][i] = Gloc[a][1][1];
      }
      gi[0][i] = gi_tt;
      gi[1][i] = gi_tl;
      gi[2][i] = gi_ll;

      if (opt.with_grad_a) {
        const double rttt = jet.uttt.v[i], rttl = jet.uttl.v[i];
        const double rtll = jet.utll.v[i], rlll = jet.ulll.v[i];
        const double pttt = F.F3 * rt * rt * rt + 3.0 * F.F2 * rt * rtt + F.F1 * rttt;
        const double pttl = F.F3 * rt * rt * rl + F.F2 * (rtt * rl + 2.0 * rtl * rt) + F.F1 * rttl;
        const double ptll = F.F3 * rt * rl * rl + F.F2 * (2.0 * rtl * rl + rll * rt) + F.F1 * rtll;
        const double plll = F.F3 * rl * rl * rl + 3.0 * F.F2 * rll * rl + F.F1 * rlll;

        // partial derivatives of the covariant Hessian components of phi
        const double dPc[2][3] = {
            {pttt,
             pttl + pl / s2 - (c_ / s_) * ptl,
             ptll + (c_ * c_ - s2) * pt + s_ * c_ * ptt},
            {pttl,
             ptll - (c_ / s_) * pll,
             plll + s_ * c_ * ptl}};
        // ... and of M_ij = sigma_ij + phi_i phi_j
        const double dM[2][3] = {
            {2.0 * pt * ptt, ptt * pl + pt * ptl, 2.0 * s_ * c_ + 2.0 * pl * ptl},
            {2.0 * pt * ptl, ptl * pl + pt * pll, 2.0 * pl * pll}};

        const double vt = (pt * ptt + pl * ptl / s2 - c_ * pl * pl / (s2 * s_)) / v;
        const double vl = (pt * ptl + pl * pll / s2) / v;
        const double dv[2] = {vt, vl};
        const double dr[2] = {rt, rl};

        const double Mcov[3] = {M_tt, M_tl, M_ll};
        const double Pcov[3] = {Pc_tt, Pc_tl, Pc_ll};
        const double hcov[2][2] = {{h_tt, h_tl}, {h_tl, h_ll}};

        // nabla_k h_ij = d_k h_ij - Gamma^a_{ki} h_aj - Gamma^a_{kj} h_ia
        double nh[2][2][2];
        for (int kk = 0; kk < 2; ++kk) {
          const double lead = C * dr[kk] / v - S * dv[kk] / v2;
          for (int a = 0; a < 2; ++a)
            for (int b = a; b < 2; ++b) {
              const int ab = a + b;
              const double dh = lead * (C * Mcov[ab] - Pcov[ab]) +
                                (S / v) * (S * dr[kk] * Mcov[ab] + C * dM[kk][ab] - dPc[kk][ab]);
              double val = dh;
              for (int m = 0; m < 2; ++m)
                val -= Gloc[m][kk][a] * hcov[m][b] + Gloc[m][kk][b] * hcov[a][m];
              nh[kk][a][b] = val;
              nh[kk][b][a] = val;
            }
        }
        double acc = 0.0;
        for (int kk = 0; kk < 2; ++kk)
          for (int a = 0; a < 2; ++a)
            for (int ii = 0; ii < 2; ++ii)
              for (int b = 0; b < 2; ++b)
                for (int jj = 0; jj < 2; ++jj)
                  for (int cdx = 0; cdx < 2; ++cdx)
                    acc += gin[kk][a] * gin[ii][b] * gin[jj][cdx] *
                           nh[kk][ii][jj] * nh[a][b][cdx];
        rep.gradA2.v[i] = acc;
      }
    }
  }

  rep.aring_crosscheck = sup_cross / std::max(sup_a2, 1e-300);

  // H-derivative phase: |grad H|^2_g always; evolution right-hand sides and
  // the graph-transport corrections on request.  The gap H - 2 is re-expanded
  // spectrally instead of H itself so the large constant part cannot leak
  // table roundoff into the derivatives (a smooth scalar may be re-expanded;
  // tensor components are not scalars and never are).
  rep.gradH2_g = SphereField(gp);
  const FieldJet Hjet = synthesis(analysis(rep.Hgap), 2);
  FieldJet Ajet;
  if (opt.with_evolution) {
    Ajet = synthesis(analysis(rep.Aring2), 1);
    rep.rhsH = SphereField(gp);
    rep.rhsAring2 = SphereField(gp);
    rep.advH = SphereField(gp);
    rep.advAring2 = SphereField(gp);
  }
  for (int k = 0; k < g.nlat; ++k) {
    const double s2 = g.st[k] * g.st[k];
    for (int j = 0; j < g.nlon; ++j) {
      const int i = g.node(k, j);
      const double Ht = Hjet.ut.v[i], Hl = Hjet.ul.v[i];
      const double gi_tt = gi[0][i], gi_tl = gi[1][i], gi_ll = gi[2][i];
      rep.gradH2_g.v[i] = gi_tt * Ht * Ht + 2.0 * gi_tl * Ht * Hl + gi_ll * Hl * Hl;
      if (!opt.with_evolution) continue;

      const double H = rep.H.v[i];
      const double Hgap = rep.Hgap.v[i];
      const double hgtt = Hjet.utt.v[i] - (Gam[0][0][i] * Ht + Gam[1][0][i] * Hl);
      const double hgtl = Hjet.utl.v[i] - (Gam[0][1][i] * Ht + Gam[1][1][i] * Hl);
      const double hgll = Hjet.ull.v[i] - (Gam[0][2][i] * Ht + Gam[1][2][i] * Hl);
      const double lapH = gi_tt * hgtt + 2.0 * gi_tl * hgtl + gi_ll * hgll;
      const double H2 = H * H;
      // (n-1) - |A|^2 = -(2 Hgap + Hgap^2/2 + |Aring|^2), kept in gap form
      rep.rhsH.v[i] = lapH / H2 - 2.0 * rep.gradH2_g.v[i] / (H2 * H) -
                      (2.0 * Hgap + 0.5 * Hgap * Hgap + rep.Aring2.v[i]) / H;

      const double T_tt = hgtt / H2 - 2.0 * Ht * Ht / (H2 * H);
      const double T_tl = hgtl / H2 - 2.0 * Ht * Hl / (H2 * H);
      const double T_ll = hgll / H2 - 2.0 * Hl * Hl / (H2 * H);
      const double mtt = m0[0][i];
      const double mtl = m0[1][i];
      const double mlt = m0[2][i];
      const double mll = m0[3][i];
      const double mup_tt = mtt * gi_tt + mtl * gi_tl;
      const double mup_tl = mtt * gi_tl + mtl * gi_ll;
      const double mup_lt = mlt * gi_tt + mll * gi_tl;
      const double mup_ll = mlt * gi_tl + mll * gi_ll;
      // the cubic trace term vanishes identically for 2x2 traceless tensors
      rep.rhsAring2.v[i] = 2.0 * (T_tt * mup_tt + T_tl * (mup_tl + mup_lt) + T_ll * mup_ll) -
                           2.0 * rep.Aring2.v[i];

      const double r = jet.u.v[i];
      const double S2 = std::sinh(r) * std::sinh(r);
      const double v = rep.v.v[i];
      const double cth = jet.ut.v[i] / (H * v * S2);
      const double clam = jet.ul.v[i] / (s2 * H * v * S2);
      rep.advH.v[i] = cth * Ht + clam * Hl;
      rep.advAring2.v[i] = cth * Ajet.ut.v[i] + clam * Ajet.ul.v[i];
    }
  }
}

// ----------------------------------------------------------------------
// Polar-symmetric route (any n >= 3).  The metric is g = A dtheta^2 + B ghat
// with A = sinh^2 r (1 + phi'^2), B = sinh^2 r sin^2 theta, and the second
// fundamental form has two principal components.
// ----------------------------------------------------------------------

void build_polar(const GraphSurface& srf, const GeometryOptions& opt, GeometryReport& rep) {
  const GridPtr& gp = srf.grid;
  const SphereGrid& g = *gp;
  const int n = g.n;
  const int nn = g.nnodes();
  const int order = opt.with_grad_a ? 3 : 2;
  const FieldJet jet = synthesis(analysis(srf.r), order);

  rep.v = SphereField(gp);
  rep.H = SphereField(gp);
  rep.Hgap = SphereField(gp);
  rep.A2 = SphereField(gp);
  rep.Aring2 = SphereField(gp);
  rep.dens = SphereField(gp);
  rep.shape.grid = gp;
  rep.shape.rad.assign(nn, 0.0);
  rep.shape.tan.assign(nn, 0.0);
  if (opt.with_grad_a) rep.gradA2 = SphereField(gp);

  std::vector<double> Acoef(nn), Bcoef(nn), dA(nn), dB(nn);
  std::vector<double> pdev(nn), qdev(nn);  // principal deviations from H/(n-1)
  double sup_cross = 0.0, sup_a2 = 0.0;

  for (int k = 0; k < g.nlat; ++k) {
    const double s_ = g.st[k], c_ = g.ct[k];
    const double r = jet.u.v[k];
    const double rt = jet.ut.v[k], rtt = jet.utt.v[k];
    const double S = std::sinh(r), C = std::cosh(r);
    const double S2 = S * S;
    const PhiChain F(S, C);

    const double pt = F.F1 * rt;
    const double ptt = F.F2 * rt * rt + F.F1 * rtt;
    const double Pc_rad = ptt;              // covariant theta-theta Hessian of phi
    const double Pc_tan = (c_ / s_) * pt;   // mixed tangential component

    const double v2 = 1.0 + pt * pt;
    const double v = std::sqrt(v2);

    // Same cancellation-free split as the full-2D route: the two principal
    // curvatures share the round part cosh/(v sinh), so their deviations from
    // H/(n-1) depend only on the difference of the Hessian components.
    const double D_ = (Pc_tan - Pc_rad / v2) / (v * S);  // h_rad - h_tan
    const double p = (n - 2) * D_ / (n - 1);
    const double q_ = -D_ / (n - 1);
    const double Aring2 = (static_cast<double>(n - 2) / (n - 1)) * D_ * D_;

    const double CmSv = std::exp(-r) - S * pt * pt / (1.0 + v);
    const double Hgap =
        ((n - 1) * CmSv - Pc_rad / v2 - (n - 2) * Pc_tan) / (S * v);
    const double H = (n - 1) + Hgap;
    const double A2 = H * H / (n - 1) + Aring2;

    const double h_rad = H / (n - 1) + p;
    const double h_tan = H / (n - 1) + q_;

    rep.v.v[k] = v;
    rep.H.v[k] = H;
    rep.Hgap.v[k] = Hgap;
    rep.A2.v[k] = A2;
    rep.Aring2.v[k] = Aring2;
    rep.dens.v[k] = std::pow(S, n - 1) * v;
    rep.shape.rad[k] = h_rad;
    rep.shape.tan[k] = h_tan;
    pdev[k] = p;
    qdev[k] = q_;

    {
      // direct route through the O(1) principal curvatures, as a cross-check
      const double hr = C / (v * S) - Pc_rad / (v * S * v2);
      const double ht = C / (v * S) - Pc_tan / (v * S);
      const double Hn = hr + (n - 2) * ht;
      const double A2n = hr * hr + (n - 2) * ht * ht;
      sup_cross = std::max(sup_cross, std::abs((A2n - Hn * Hn / (n - 1)) - Aring2));
    }
    sup_a2 = std::max(sup_a2, std::abs(A2));

    const double A_ = S2 * v2, B_ = S2 * s_ * s_;
    const double dA_ = 2.0 * S * C * rt * v2 + 2.0 * S2 * pt * ptt;
    const double dB_ = 2.0 * S * C * rt * s_ * s_ + 2.0 * S2 * s_ * c_;
    Acoef[k] = A_;
    Bcoef[k] = B_;
    dA[k] = dA_;
    dB[k] = dB_;

    if (opt.with_grad_a) {
      const double rttt = jet.uttt.v[k];
      const double pttt = F.F3 * rt * rt * rt + 3.0 * F.F2 * rt * rtt + F.F1 * rttt;
      const double vt = pt * ptt / v;
      // covariant components P = h_tt, S_cov = per-unit-fiber coefficient
      const double P_ = (S / v) * (C * v2 - ptt);
      const double Scov = (S / v) * (C * s_ * s_ - s_ * c_ * pt);
      const double lead = C * rt / v - S * vt / v2;
      const double dP = lead * (C * v2 - ptt) +
                        (S / v) * (S * rt * v2 + 2.0 * C * pt * ptt - pttt);
      const double dScov = lead * (C * s_ * s_ - s_ * c_ * pt) +
                           (S / v) * (S * rt * s_ * s_ + 2.0 * C * s_ * c_ -
                                      (c_ * c_ - s_ * s_) * pt - s_ * c_ * ptt);
      const double t1 = dP - dA_ * P_ / A_;
      const double t2 = dScov - dB_ * Scov / B_;
      const double t3 = P_ / A_ - Scov / B_;
      rep.gradA2.v[k] = t1 * t1 / (A_ * A_ * A_) +
                        (n - 2) * (t2 * t2 + 0.5 * dB_ * dB_ * t3 * t3) / (A_ * B_ * B_);
    }
  }

  rep.aring_crosscheck = sup_cross / std::max(sup_a2, 1e-300);

  rep.gradH2_g = SphereField(gp);
  const FieldJet Hjet = synthesis(analysis(rep.Hgap), 2);
  FieldJet Ajet;
  if (opt.with_evolution) {
    Ajet = synthesis(analysis(rep.Aring2), 1);
    rep.rhsH = SphereField(gp);
    rep.rhsAring2 = SphereField(gp);
    rep.advH = SphereField(gp);
    rep.advAring2 = SphereField(gp);
  }
  for (int k = 0; k < g.nlat; ++k) {
    const double Ht = Hjet.ut.v[k];
    const double A_ = Acoef[k], B_ = Bcoef[k];
    rep.gradH2_g.v[k] = Ht * Ht / A_;
    if (!opt.with_evolution) continue;

    const double H = rep.H.v[k];
    const double Hgap = rep.Hgap.v[k];
    const double H2 = H * H;
    const double hess_rad = Hjet.utt.v[k] - 0.5 * dA[k] * Ht / A_;
    const double lapH = hess_rad / A_ + (n - 2) * dB[k] * Ht / (2.0 * A_ * B_);
    // (n-1) - |A|^2 = -(2 Hgap + Hgap^2/(n-1) + |Aring|^2), kept in gap form
    rep.rhsH.v[k] = lapH / H2 - 2.0 * rep.gradH2_g.v[k] / (H2 * H) -
                    (2.0 * Hgap + Hgap * Hgap / (n - 1) + rep.Aring2.v[k]) / H;

    const double T_rad = hess_rad / H2 - 2.0 * Ht * Ht / (H2 * H);
    const double T_tan = (dB[k] * Ht / (2.0 * A_)) / H2;  // coefficient of ghat
    const double p = pdev[k];
    const double q_ = qdev[k];
    const double div_term = 2.0 * (T_rad * p / A_ + (n - 2) * T_tan * q_ / B_);
    const double cubic = p * p * p + (n - 2) * q_ * q_ * q_;
    rep.rhsAring2.v[k] = div_term - (4.0 / (n - 1)) * rep.Aring2.v[k] - 2.0 * cubic / H;

    const double r = jet.u.v[k];
    const double S2 = std::sinh(r) * std::sinh(r);
    const double cth = jet.ut.v[k] / (H * rep.v.v[k] * S2);
    rep.advH.v[k] = cth * Ht;
    rep.advAring2.v[k] = cth * Ajet.ut.v[k];
  }
}

}  // namespace

GeometryReport geometry_report(const GraphSurface& s, const GeometryOptions& opt) {
  GeometryReport rep;
  rep.n = s.n;
  if (s.grid->mode == GridMode::Full2D)
    build_full2d(s, opt, rep);
  else
    build_polar(s, opt, rep);

  const SphereGrid& g = *s.grid;
  const int n = s.n;
  double area = 0.0, int_ar = 0.0, int_h2m4 = 0.0, int_gh = 0.0;
  double minH = std::numeric_limits<double>::infinity();
  double maxH = -std::numeric_limits<double>::infinity();
  double sup_gap = 0.0, sup_ga = 0.0;
  for (int i = 0; i < g.nnodes(); ++i) {
    const double dmu = rep.dens.v[i] * g.node_w[i];
    const double H = rep.H.v[i];
    const double Hgap = rep.Hgap.v[i];
    area += dmu;
    int_ar += rep.Aring2.v[i] * dmu;
    int_gh += rep.gradH2_g.v[i] / (H * H) * dmu;
    minH = std::min(minH, H);
    maxH = std::max(maxH, H);
    if (n == 3) {
      // H^2 - 4 = Hgap (H + 2): exact in the gap, no cancellation at large r
      const double h2m4 = Hgap * (H + 2.0);
      int_h2m4 += h2m4 * dmu;
      sup_gap = std::max(sup_gap, std::abs(h2m4));
    } else {
      sup_gap = std::max(sup_gap, Hgap * Hgap + rep.Aring2.v[i]);
    }
    if (!rep.gradA2.v.empty()) sup_ga = std::max(sup_ga, rep.gradA2.v[i]);
  }
  rep.area = area;
  rep.int_aring2 = int_ar;
  rep.int_h2m4 = (n == 3) ? int_h2m4 : kNaN;
  rep.int_gradh2_over_h2 = int_gh;
  rep.drift_rhs = area * int_gh;
  rep.minH = minH;
  rep.maxH = maxH;
  rep.mean_convex = minH > 0.0;
  rep.sup_h_gap = sup_gap;
  rep.sup_grad_a2 = rep.gradA2.v.empty() ? kNaN : sup_ga;
  rep.modified = -area * int_ar;
  rep.q = std::pow(area, -static_cast<double>(n - 5) / (n - 1)) * int_ar;
  rep.hawking = (n == 3)
                    ? std::sqrt(area / (16.0 * M_PI)) * (1.0 - int_h2m4 / (16.0 * M_PI))
                    : kNaN;
  return rep;
}

InducedMetric induced_metric(const GraphSurface& srf) {
  const GridPtr& gp = srf.grid;
  const SphereGrid& g = *gp;
  const int nn = g.nnodes();
  InducedMetric im;
  im.grid = gp;
  im.v = SphereField(gp);
  im.dens = SphereField(gp);
  im.g_tt.assign(nn, 0.0);
  im.g_ll.assign(nn, 0.0);
  im.gi_tt.assign(nn, 0.0);
  im.gi_ll.assign(nn, 0.0);
  const bool full = g.mode == GridMode::Full2D;
  if (full) {
    im.g_tl.assign(nn, 0.0);
    im.gi_tl.assign(nn, 0.0);
  }
  const FieldJet jet = synthesis(analysis(srf.r), 1);
  for (int k = 0; k < g.nlat; ++k) {
    const double s_ = g.st[k];
    const double s2 = s_ * s_;
    for (int j = 0; j < g.nlon; ++j) {
      const int i = g.node(k, j);
      const double r = jet.u.v[i];
      const double S = std::sinh(r);
      const double S2 = S * S;
      const double pt = jet.ut.v[i] / S;
      const double pl = full ? jet.ul.v[i] / S : 0.0;
      const double v2 = 1.0 + pt * pt + (full ? pl * pl / s2 : 0.0);
      im.v.v[i] = std::sqrt(v2);
      im.dens.v[i] = std::pow(S, g.n - 1) * im.v.v[i];
      if (full) {
        const double gtt = S2 * (1.0 + pt * pt);
        const double gtl = S2 * pt * pl;
        const double gll = S2 * (s2 + pl * pl);
        const double det = gtt * gll - gtl * gtl;
        im.g_tt[i] = gtt;
        im.g_tl[i] = gtl;
        im.g_ll[i] = gll;
        im.gi_tt[i] = gll / det;
        im.gi_tl[i] = -gtl / det;
        im.gi_ll[i] = gtt / det;
      } else {
        im.g_tt[i] = S2 * v2;
        im.g_ll[i] = S2 * s2;  // per-unit-fiber coefficient
        im.gi_tt[i] = 1.0 / (S2 * v2);
        im.gi_ll[i] = 1.0 / (S2 * s2);
      }
    }
  }
  double area = 0.0;
  for (int i = 0; i < nn; ++i) area += im.dens.v[i] * g.node_w[i];
  im.area = area;
  return im;
}

MixedShape shape_operator(const GraphSurface& s) {
  GeometryOptions opt;
  opt.with_grad_a = false;
  opt.with_evolution = false;
  return geometry_report(s, opt).shape;
}

double gauss_identity_check(const GraphSurface& s) {
  if (s.n != 3) throw std::invalid_argument("gauss_identity_check: defined for n = 3");
  GeometryOptions opt;
  opt.with_grad_a = false;
  opt.with_evolution = false;
  GeometryReport rep = geometry_report(s, opt);
  const double lhs = 1.0 - rep.int_h2m4 / (16.0 * M_PI);
  const double rhs = -rep.int_aring2 / (8.0 * M_PI);
  return std::abs(lhs - rhs);
}

}  // namespace imcf
