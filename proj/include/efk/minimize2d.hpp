#ifndef EFK_MINIMIZE2D_HPP
#define EFK_MINIMIZE2D_HPP

#include "efk/energy2d.hpp"
#include "efk/minimize1d.hpp"

namespace efk {

struct DoubleLayerOptions {
  SolverOptions solver;
  // Solve on nested coarsenings first and prolong; cuts fine-grid iterations
  // an order of magnitude. Ignored when an explicit init field is supplied.
  bool continuation = true;
  Index min_coarse_nodes = 51;
};

struct DoubleLayerResult {
  Field2D field;
  double energy = 0.0;
  int iterations = 0;       // fine-grid iterations
  int total_iterations = 0; // including continuation levels
  bool converged = false;
};

// Quasi-Newton minimization of the discrete 2D energy with clamps
// u(-T,.) = e(-), u(T,.) = e(+), u(.,+-L) = a(+-) and even ghost reflection.
// Starts from build_V0 (or `init` when given). Throws SolverFailure with the
// last iterate attached when tolerances are not met.
DoubleLayerResult minimize_double_layer(PotentialPtr pot, double beta,
                                        const Profile1D& e_minus, const Profile1D& e_plus,
                                        const Grid2D& grid, OperatorVariant variant,
                                        const DoubleLayerOptions& opts,
                                        const Field2D* init = nullptr);

// Energy history of the last double-layer solve (fine level only).
const std::vector<double>& last_double_layer_energy_history();

// Bilinear prolongation from a (nt_c, nx_c) field to (2 nt_c - 1, 2 nx_c - 1).
Field2D prolong_field(const Field2D& coarse, const Grid2D& fine_grid);

// Restriction of a profile to every stride-th node.
Profile1D restrict_profile(const Profile1D& fine, Index stride);

}  // namespace efk

#endif  // EFK_MINIMIZE2D_HPP
