#pragma once

#include <memory>
#include <vector>

namespace imcf {

// Which symmetry class the discretization lives in.
//
// Full2D     : scalar fields on S^2 (ambient dimension n = 3 only), sampled on
//              a Gauss-Legendre x uniform-longitude product grid.  Basis is the
//              real orthonormal spherical harmonics up to degree L.
// Polar      : rotationally symmetric fields on S^{n-1} (any n >= 3), sampled
//              on Gauss-Gegenbauer colatitude nodes (weight sin^{n-2}).  Basis
//              is the orthonormal zonal harmonics G_l(theta), eigenfunctions of
//              the sphere Laplacian with eigenvalue -l(l+n-2).
enum class GridMode { Full2D, Polar };

// Collocation grid plus precomputed basis tables.  Immutable once built; the
// field types hold a shared_ptr to it.  Tables carry colatitude derivatives of
// the basis functions up to third order, which is what the covariant-derivative
// machinery for |grad A|^2 needs.
struct SphereGrid {
  int n = 3;                    // ambient dimension; the sphere is S^{n-1}
  GridMode mode = GridMode::Full2D;
  int L = 0;                    // highest basis degree in the tables
  int nlat = 0;                 // = L + 1 Gauss nodes, poles excluded
  int nlon = 1;                 // = 2L + 1 uniform longitudes (1 in Polar mode)

  std::vector<double> theta;    // colatitude nodes, ascending in theta
  std::vector<double> x;        // cos(theta), matching Gauss rule ordering
  std::vector<double> st, ct;   // sin/cos of theta at nodes
  std::vector<double> wlat;     // Gauss weights in x
  std::vector<double> lam;      // longitude nodes (Full2D), lam_j = 2 pi j / nlon
  std::vector<double> node_w;   // round-sphere measure weight per node, size nnodes

  // Full2D basis: normalized associated Legendre functions Q_{lm}(theta) with
  // int_0^pi Q_{lm} Q_{l'm} sin = delta, packed triangularly per (l,m), m >= 0.
  // Qd[d] holds the d-th theta-derivative; layout [tri(l,m) * nlat + k].
  std::vector<double> Qd[4];
  // Longitude tables cos(m lam_j), sin(m lam_j), layout [m * nlon + j].
  std::vector<double> cosml, sinml;

  // Polar basis: orthonormal zonal harmonics G_l(theta) on S^{n-1};
  // Gd[d][l * nlat + k] is the d-th theta-derivative.
  std::vector<double> Gd[4];

  int nnodes() const { return nlat * nlon; }
  int node(int k, int j) const { return k * nlon + j; }

  // Number of basis coefficients: (L+1)^2 in Full2D, L+1 in Polar.
  int ncoef() const {
    return mode == GridMode::Full2D ? (L + 1) * (L + 1) : (L + 1);
  }

  // Full2D coefficient index for degree l, order m in [-l, l]; m > 0 is the
  // cos(m lam) component, m < 0 the sin(|m| lam) component.
  static int coef_index(int l, int m) { return l * l + l + m; }

  // Triangular index into the Q tables, m in [0, l].
  int tri(int l, int m) const { return m * (L + 1) - m * (m - 1) / 2 + (l - m); }

  // Laplace eigenvalue of degree l on S^{n-1}.
  double eigenvalue(int l) const { return -static_cast<double>(l) * (l + n - 2); }

  // Build a grid with tables up to degree L.  Full2D requires n == 3.
  static std::shared_ptr<const SphereGrid> create(int n, GridMode mode, int L);
};

using GridPtr = std::shared_ptr<const SphereGrid>;

// Scalar field sampled at the grid nodes (row-major latitude-then-longitude).
struct SphereField {
  GridPtr grid;
  std::vector<double> v;

  SphereField() = default;
  explicit SphereField(GridPtr g) : grid(std::move(g)), v(grid->nnodes(), 0.0) {}
  double& operator[](int i) { return v[i]; }
  double operator[](int i) const { return v[i]; }
  int size() const { return static_cast<int>(v.size()); }
};

// Covariant 1-tensor on the sphere.  Polar mode only carries the theta
// component (the longitudinal ones vanish by symmetry).
struct SphereTensor1 {
  GridPtr grid;
  std::vector<double> ct_;  // theta component
  std::vector<double> cl_;  // lambda component (Full2D only)

  SphereTensor1() = default;
  explicit SphereTensor1(GridPtr g)
      : grid(std::move(g)),
        ct_(grid->nnodes(), 0.0),
        cl_(grid->mode == GridMode::Full2D ? grid->nnodes() : 0, 0.0) {}

  // |T|^2 with respect to the round metric at node i.
  double norm2_sigma(int i) const;
};

// Symmetric covariant 2-tensor.  Full2D stores the covariant components
// (tt, tl, ll) in the (theta, lambda) frame.  Polar mode stores the covariant
// theta-theta component in `tt` and the mixed (one index up) tangential
// eigenvalue, common to all n-2 longitudinal directions, in `tan`.
struct SphereTensor2 {
  GridPtr grid;
  std::vector<double> tt, tl, ll;  // Full2D covariant components
  std::vector<double> tan;         // Polar mixed tangential eigenvalue

  SphereTensor2() = default;
  explicit SphereTensor2(GridPtr g) : grid(std::move(g)) {
    const int nn = grid->nnodes();
    tt.assign(nn, 0.0);
    if (grid->mode == GridMode::Full2D) {
      tl.assign(nn, 0.0);
      ll.assign(nn, 0.0);
    } else {
      tan.assign(nn, 0.0);
    }
  }

  double trace_sigma(int i) const;   // sigma^{jk} T_jk
  double norm2_sigma(int i) const;   // T^j_k T^k_j (indices moved with sigma)
};

}  // namespace imcf
