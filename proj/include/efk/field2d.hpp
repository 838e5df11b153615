#ifndef EFK_FIELD2D_HPP
#define EFK_FIELD2D_HPP

#include <string>
#include <vector>

#include "efk/grid.hpp"
#include "efk/potentials.hpp"
#include "efk/profile.hpp"

namespace efk {

// Which fourth-order operator the energy discretizes.
enum class OperatorVariant { kBiharmonic, kSplitQuartic, kGeneralized };

OperatorVariant variant_from_name(const std::string& name);
const char* variant_name(OperatorVariant v);

// Coefficients of a11 u_tttt + a12 u_ttxx + a22 u_xxxx - b1 u_tt - b2 u_xx.
// The biharmonic operator is (1, 2, 1, beta, beta); the split-quartic one
// drops the mixed term (a12 = 0).
struct OperatorCoeffs {
  double a11 = 1.0;
  double a12 = 2.0;
  double a22 = 1.0;
  double b1 = 1.0;
  double b2 = 1.0;

  static OperatorCoeffs for_variant(OperatorVariant v, double beta);
};

// Sampled map (t,x) -> u in R^m on a Grid2D. Component planes are nt x nx
// matrices (row index = t). Boundary clamps: rows 0 / nt-1 hold the two
// heteroclinic traces, columns 0 / nx-1 the wells; zero normal derivative is
// enforced through even ghost reflection in all stencils.
struct Field2D {
  Grid2D grid;
  std::vector<MatX> comps;
  PotentialPtr potential;
  double beta = 1.0;
  OperatorVariant variant = OperatorVariant::kBiharmonic;
  OperatorCoeffs coeffs;

  Index nt() const { return grid.nt; }
  Index nx() const { return grid.nx; }
  Index m() const { return static_cast<Index>(comps.size()); }

  PointVec at(Index i, Index j) const {
    PointVec u(m());
    for (Index c = 0; c < m(); ++c) u(c) = comps[c](i, j);
    return u;
  }

  // x-slice at row i as a clamped 1D profile on the x grid.
  Profile1D slice(Index i) const;
};

Field2D make_field(const Grid2D& grid, PotentialPtr pot, double beta,
                   OperatorVariant variant = OperatorVariant::kBiharmonic);

}  // namespace efk

#endif  // EFK_FIELD2D_HPP
