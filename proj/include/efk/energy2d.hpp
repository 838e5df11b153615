#ifndef EFK_ENERGY2D_HPP
#define EFK_ENERGY2D_HPP

#include <optional>
#include <vector>

#include "efk/field2d.hpp"
#include "efk/hspace.hpp"

namespace efk {

// Discrete energy over the rectangle (or a t-slab of it):
//
//   E_h(u) = sum_ij w_ij [ a11/2 |Dt2 u|^2 + a22/2 |Dx2 u|^2 + W(u) ]
//          + sum_{t-edges} (b1/2) ht wx |du/dt|^2
//          + sum_{x-edges} (b2/2) hx wt |du/dx|^2
//          + sum_{cells}  (a12/2) ht hx |d2u/dtdx|^2
//
// First derivatives live on edge midpoints and the mixed derivative on cell
// centers, so the interior Euler-Lagrange operator of E_h is exactly
// a11 Dt4 + a12 Dt2Dx2 + a22 Dx4 - b1 Dt2 - b2 Dx2 + grad W with the 13-point
// biharmonic stencil (for a11=a22=1, a12=2) and the 5-point Laplacian.
double energy_2d(const Field2D& f);

// Energy restricted to the t-slab rows [i_lo, i_hi], with trapezoid-in-t half
// weights at the slab faces (E_{[t1,t2] x [-L,L]}).
double energy_slab(const Field2D& f, Index i_lo, Index i_hi);

// Exact derivative of the discrete energy; clamped rows/columns are zero.
std::vector<MatX> energy_gradient_2d(const Field2D& f);

// sup over interior nodes (2-node margin) of the discrete operator applied
// to the field, per the variant tag.
double residual_pde(const Field2D& f);

// Natural magnitude of the operator terms at the same nodes:
// max(1, sup(|fourth-order| + |second-order| + |grad W|)); residual
// tolerances are quoted relative to this.
double residual_scale(const Field2D& f);

// Cubic-in-t interpolation between e(-) (t <= -1) and e(+) (t >= 1).
Field2D build_V0(const Profile1D& e_minus, const Profile1D& e_plus, const Grid2D& grid,
                 OperatorVariant variant = OperatorVariant::kBiharmonic);

// The reduced action of the orbit t -> u(t, .):
//   J(u) = int_t [ a11/2 ||u_tt||^2 + b1/2 ||u_t||^2 + (a12/2) int |u_tx|^2
//                  + (J_1d(u(t,.)) - j_min) ] dt
// computed with plain central differences in t and trapezoid quadrature
// (independent of the energy discretization above). Requires a22 = 1 and
// b2 = beta so the slice action is the 1D action.
double action_functional_J(const Field2D& f, double j_min);
double action_functional_J_slab(const Field2D& f, double j_min, Index i_lo, Index i_hi);

struct SliceTrace {
  VecX t;
  VecX d_minus;
  VecX d_plus;
  VecX ut_norm;
  std::vector<TubeClass> tube;
  Index t_minus_exit = -1;   // last row of the initial all-minus-tube prefix
  Index t_plus_entry = -1;   // first row of the final all-plus-tube suffix
  bool single_crossing = true;
};

// Per-slice distances to the families, u_t L2 norms and tube classification.
SliceTrace layer_asymptotics(const Field2D& f, const HeteroclinicFamily& fm,
                             const HeteroclinicFamily& fp, double d_min);

// Max |u - a(+/-)| over the outer decile of the x range (both sides).
double uniform_well_convergence(const Field2D& f);

struct ProbeResult {
  double min_deficit = 0.0;   // min over trials of E(u+phi) - E(u) on supp phi
  double scale = 1.0;         // max(1, |local energy|) at the worst trial
  int worst_trial = -1;
  int trials = 0;
};

// Seeded compactly supported smooth bumps (product smoothstep profile,
// random center, radius <= min(T,L)/4, amplitude in [1e-3, 1e-1], random
// direction in R^m). Deterministic for a fixed seed.
ProbeResult minimality_probe(const Field2D& f, std::uint64_t seed, int n_trials);

// Worst ||u(t2)-u(t1)|| / (M sqrt|t2-t1|) over a slice subsample,
// M = sqrt(2 J0 / beta): the a-priori Hoelder bound of finite-action orbits.
double holder_bound_check(const Field2D& f, double j0, int n_slices = 50);

// Worst margin of the per-slice bound
// int |u_x|^2 <= 4 (W(U(t)) + j_min)/beta + 2 ||e0'||^2 (<= 0 means it holds).
double slab_bound_worst_margin(const Field2D& f, double j_min, const Profile1D& e0);

}  // namespace efk

#endif  // EFK_ENERGY2D_HPP
