#ifndef EFK_ACTION1D_HPP
#define EFK_ACTION1D_HPP

#include <optional>
#include <utility>

#include "efk/profile.hpp"

namespace efk {

// Discrete action
//
//   J_h(u) = sum_i w_i [ 1/2 |D2 u_i|^2 + W(u_i) ]
//          + sum_cells h (beta/2) |(u_{i+1} - u_i)/h|^2
//
// with trapezoid node weights w_i, central second differences D2 (even ghost
// reflection at the clamped ends), and the first-derivative term collocated
// on cell midpoints. With this pairing the interior Euler-Lagrange equations
// of J_h are exactly h * [ D4 u - beta D2 u + grad W(u) ] with the 5-point
// fourth difference and the compact 3-point second difference, i.e. the same
// stencils residual_ode measures.
double action_1d(const Profile1D& p);

// Exact derivative of the discrete action; clamped boundary rows are zero.
MatX action_gradient_1d(const Profile1D& p);

// Action restricted to [x_{i0}, x_{i1}] (trapezoid ends at the sub-interval
// faces; stencils reach outside it through the profile itself).
double action_over_range(const Profile1D& p, Index i0, Index i1);

// sup over interior nodes (2-node margin) of |D4 u - beta D2 u + grad W(u)|.
double residual_ode(const Profile1D& p);

// The cubic interpolation profile: a^- for x <= -1, a^+ for x >= 1,
// (a^+ + a^-)/2 + (a^+ - a^-)(3x - x^3)/4 in between.
Profile1D build_e0(PotentialPtr pot, const Grid1D& grid, double beta);

// Integer-shift translate of p, padding with well values.
Profile1D shift_profile(const Profile1D& p, Index shift);

struct ShiftScan {
  Index best_shift = 0;     // integer-node shift minimizing the L2 distance
  double t_refined = 0.0;   // 3-point parabolic refinement of shift*h
  double d_best = 0.0;      // distance at best integer shift
  double d_refined = 0.0;   // parabola minimum value (>= 0)
};

// Minimizes || p^s - q ||_{L2} over integer shifts s in [-n/2, n/2].
ShiftScan scan_translation(const Profile1D& p, const Profile1D& q);

// Canonical translate: the integer-node shift minimizing distance to the
// reference (default e_0), with sub-node parabolic refinement reported in T.
std::pair<Profile1D, double> normalize_translation(const Profile1D& p,
                                                   const Profile1D& reference);

// Linearized decay rate at the wells: smallest positive real part among the
// roots of mu^4 - beta mu^2 + lambda = 0, lambda = min eig of the well
// Hessian. Second member is true when the roots are complex (beta^2 < 4 lambda).
std::pair<double, bool> linearized_decay_rate(const Potential& pot, double beta);

// Least-squares fit of the tail decay over the window where the amplitude
// lies in [amp_lo, amp_hi] (a one-unit buffer next to the clamped ends is
// excluded). Oscillatory tails are fitted through the suffix energy integral
// instead of the raw log-amplitude. Returns the worse-side pair (smaller k,
// larger K). Throws InvalidParameter when both windows are empty.
DecayFit fit_decay_rate(const Profile1D& p, double amp_lo = 1e-8, double amp_hi = 1e-2);
std::optional<DecayFit> try_fit_decay_rate(const Profile1D& p, double amp_lo = 1e-8,
                                           double amp_hi = 1e-2);

// sqrt(beta c) (r/2)^2, the minimal action of any transition segment whose
// distance to a well runs from <= eps0 up to the ball radius r.
double transition_cost_bound(const Potential& pot, double beta);

// Companion measurement: the smallest action of a sub-interval of p over
// which |u - a^{+/-}| runs from <= eps0 to >= r. Empty when the profile has
// no such transition (the bound check then passes vacuously).
std::optional<double> min_transition_segment_action(const Profile1D& p, double eps0);

// Two-piece polynomial tail extension (quadratic blend + quartic cap) that
// matches value and slope at the junction and reaches the well two units out.
struct TailExtension {
  MatX values;             // sampled z on the segment grid (toward the well)
  VecX xs;                 // segment abscissae relative to the junction
  double segment_action = 0.0;
  double max_deviation = 0.0;   // sup |z - a|
  double max_slope = 0.0;       // sup |z'|
  double max_curvature = 0.0;   // sup |z''|
  double action_bound = 0.0;    // (4 + beta + mu_w) eps0^2
};

TailExtension build_tail_extension(const PointVec& v_end, const PointVec& v_prime_end,
                                   int side, const Potential& pot, double beta,
                                   double eps0, double spacing);

}  // namespace efk

#endif  // EFK_ACTION1D_HPP
