#ifndef EFK_MINIMIZE1D_HPP
#define EFK_MINIMIZE1D_HPP

#include <vector>

#include "efk/profile.hpp"

namespace efk {

struct SolverOptions {
  double grad_tol_rel = 1e-9;  // tol_g = grad_tol_rel * max(1, |g0|_inf), floored by
                               // the fourth-difference rounding floor of the grid
  double energy_tol = 1e-13;
  int max_iters = 20000;
  int memory = 10;
  bool use_preconditioner = true;
};

// Quasi-Newton descent of the discrete 1D action from a clamped initial
// profile. The result is canonically translated against e_0 and carries the
// ODE residual and the fitted decay rates. Throws SolverFailure (with the
// last iterate attached) when the tolerances are not met within max_iters.
MinimalHeteroclinic minimize_heteroclinic(PotentialPtr pot, double beta,
                                          const Profile1D& init, const SolverOptions& opts);

// Energy history of the last minimize call on this thread (monotonicity checks).
const std::vector<double>& last_minimize_energy_history();

}  // namespace efk

#endif  // EFK_MINIMIZE1D_HPP
