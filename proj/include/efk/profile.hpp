#ifndef EFK_PROFILE_HPP
#define EFK_PROFILE_HPP

#include <utility>

#include "efk/grid.hpp"
#include "efk/potentials.hpp"
#include "efk/types.hpp"

namespace efk {

// Sampled map x -> u(x) in R^m on a Grid1D, with heteroclinic boundary data
// u_0 = a^-, u_{n-1} = a^+ (clamped) and zero end slope enforced through
// even ghost reflection (u_{-1} = u_1, u_n = u_{n-2}) in all stencils.
struct Profile1D {
  Grid1D grid;
  MatX values;  // n x m, row i = u(x_i)
  PotentialPtr potential;
  double beta = 1.0;

  Index n() const { return values.rows(); }
  Index m() const { return values.cols(); }

  PointVec at(Index i) const { return values.row(i).transpose(); }

  void clamp_to_wells() {
    values.row(0) = potential->well_minus().transpose();
    values.row(values.rows() - 1) = potential->well_plus().transpose();
  }
};

Profile1D make_profile(const Grid1D& grid, PotentialPtr pot, double beta);

// Fitted tail decay data. `k` is the fitted rate, `K` the envelope constant
// so that |u - a| <= K exp(-k x) holds over the fitted window; `k_lin` is the
// linearized rate at the wells (real part when the roots are complex).
struct DecayFit {
  double k = 0.0;
  double K = 0.0;
  double k_lin = 0.0;
  bool oscillatory = false;  // beta^2 < 4 lambda_min: complex roots, spiral tails
  bool resolved = false;     // both tail windows were non-empty
};

struct MinimalHeteroclinic {
  Profile1D profile;
  double action = 0.0;
  double residual = 0.0;
  DecayFit decay;
  double canonical_shift = 0.0;
  bool converged = false;
  bool domain_warning = false;  // k_lin * L < 8 (tails not resolved, D-O4 heuristic)
  int iterations = 0;
};

}  // namespace efk

#endif  // EFK_PROFILE_HPP
