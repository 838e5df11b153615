#ifndef EFK_LBFGS_HPP
#define EFK_LBFGS_HPP

#include <functional>
#include <vector>

#include "efk/types.hpp"

namespace efk {

// f(x) and its gradient written into g; returns f.
using ValueGrad = std::function<double(const VecX&, VecX&)>;

// In-place application of the initial inverse Hessian H0 (must be SPD).
using Precond = std::function<void(VecX&)>;

struct LbfgsOptions {
  int memory = 10;
  double grad_tol = 1e-9;    // absolute infinity-norm tolerance
  double energy_tol = 1e-13; // relative decrease per accepted step
  int max_iters = 20000;
  double wolfe_c1 = 1e-4;
  double wolfe_c2 = 0.9;
  // Line-search stalls at the double-precision energy floor first drop the
  // curvature memory (restart); a stall with |g| below stall_tol still counts
  // as converged (the energy is then minimized to rounding).
  int max_restarts = 3;
  double stall_tol = 0.0;
};

struct LbfgsResult {
  VecX x;
  double f = 0.0;
  double grad_inf_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> energy_history;  // accepted iterates, monotone by Wolfe
};

// Limited-memory quasi-Newton with strong Wolfe line search. Deterministic:
// no randomness, evaluation order fixed. When h0 is supplied it replaces the
// usual scalar gamma scaling in the two-loop recursion.
LbfgsResult lbfgs_minimize(const ValueGrad& fg, VecX x0, const LbfgsOptions& opts,
                           const Precond* h0 = nullptr);

}  // namespace efk

#endif  // EFK_LBFGS_HPP
