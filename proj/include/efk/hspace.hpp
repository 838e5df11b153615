#ifndef EFK_HSPACE_HPP
#define EFK_HSPACE_HPP

#include "efk/families.hpp"
#include "efk/profile.hpp"

namespace efk {

// Point of the affine space e0 + L^2: the profile u together with its offset
// h = u - e0 on the working grid.
struct HilbertPoint {
  Profile1D u;
  MatX offset;
};

HilbertPoint make_hilbert_point(const Profile1D& e0, const MatX& offset);
HilbertPoint hilbert_point_from_profile(const Profile1D& u, const Profile1D& e0);

// Effective potential: J(u) - J_min. May come out slightly negative (within
// discretization tolerance) for members of F themselves; callers clamp in
// checks. The +infinity branch of the continuum definition is unreachable for
// sampled profiles, whose stencil derivatives are always finite.
double effective_potential(const Profile1D& u, double j_min);

// sigma(h) = trapezoidal sum of |central-difference h_x|^2 (even ghosts).
double sigma(const Grid1D& grid, const MatX& offset);

// |W(u) - integral form of the quadratic expansion around e|. Both routes use
// the same quadrature, so the defect is exactly the pairing of u - e with the
// discrete action gradient at e; it vanishes at the discrete critical point.
double quadratic_expansion_check(const Profile1D& u, const MinimalHeteroclinic& e);

// min over members and translations of the L2 distance.
double dist_to_family(const Profile1D& u, const HeteroclinicFamily& f);

struct TubeSets {
  double d_min = 0.0;
  const HeteroclinicFamily* f_minus = nullptr;
  const HeteroclinicFamily* f_plus = nullptr;

  double radius() const { return 0.25 * d_min; }
};

enum class TubeClass { kMinusTube, kPlusTube, kBoth, kNeither };

const char* tube_class_name(TubeClass c);

// Classification through the certified inclusions: d(u, F-+) <= d_min/2 puts
// u in the matching tube; near-equal distances (within d_min/4) fall in both;
// anything else is not certifiably in either tube and reports kNeither.
TubeClass tube_membership(const Profile1D& u, const TubeSets& tubes);
TubeClass tube_membership(double d_minus, double d_plus, double d_min);

}  // namespace efk

#endif  // EFK_HSPACE_HPP
