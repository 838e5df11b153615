#ifndef EFK_FAMILIES_HPP
#define EFK_FAMILIES_HPP

#include <optional>
#include <vector>

#include "efk/action1d.hpp"
#include "efk/minimize1d.hpp"
#include "efk/profile.hpp"

namespace efk {

// Winding label of a heteroclinic of W_eps around the origin. Convention
// (documented in the certificate): kMinus labels orbits passing above the
// origin (u2 > 0 where |u1| is minimal), kPlus their reflections below.
enum class Winding { kMinus, kPlus };

inline const char* winding_name(Winding w) { return w == Winding::kMinus ? "-" : "+"; }

// Trapezoidal L2 distance; tails of a shifted profile contribute their well
// values (zero difference when both profiles share wells).
double l2_distance(const Profile1D& p, const Profile1D& q);

// (e1, e2) -> (e1, -e2). Preserves the discrete action bit-for-bit.
Profile1D reflect(const Profile1D& p);
MinimalHeteroclinic reflect(const MinimalHeteroclinic& e);

// Sign of u2 at the node minimizing |u1|, falling back to the sign of the
// integral of u2. Requires min |u| >= 1/4; throws InvalidParameter otherwise.
Winding winding_sign(const Profile1D& p);
std::optional<Winding> try_winding_sign(const Profile1D& p);

// The explicit five-piece comparison map: constants outside |x| > 1/eps + 2,
// cubic caps, circular arc of radius 1-eps through the lower half plane.
Profile1D arc_comparison_map(double eps, const Grid1D& grid, PotentialPtr pot, double beta);

struct ArcAudit {
  double j_arc = 0.0;    // discrete action of the arc map at the requested eps
  double kappa1 = 0.0;   // fitted from the first-derivative component of J
  double kappa2 = 0.0;   // fitted from the curvature component of J
  double max_violation = 0.0;  // max over the sweep of J_arc - fitted bound
  bool bound_holds = false;
  std::vector<double> sweep_eps;
  std::vector<double> sweep_j;
};

// Measures J of the arc map across eps in {0.05..0.4}, fits kappa1/kappa2 in
// the bound J <= 2 eps (2-eps)^2 + (1-eps)^2 (beta kappa1 eps + kappa2 eps^3)
// from the derivative components of the discrete action, and checks the bound.
// Requires the working grid to resolve the arc (h <= eps/50).
ArcAudit arc_action_audit(double eps, double beta);

// sqrt(2 beta) (sqrt(3) - 1) / 16.
double wizz_bound(double beta);

// Smallest action over sub-intervals where |u| runs from >= sqrt(3)/2 down to
// <= 1/2 (either direction). Empty when the profile never dips below 1/2.
std::optional<double> min_wizz_segment_action(const Profile1D& p);

struct HeteroclinicFamily {
  Winding label = Winding::kMinus;
  std::vector<MinimalHeteroclinic> members;
  double j_min_estimate = 0.0;
};

// min over cross-family member pairs of the translation-scanned L2 distance.
double family_distance(const HeteroclinicFamily& fm, const HeteroclinicFamily& fp);

// mu = sup over members of |e'|_inf * |e|_inf and the bound 1/sqrt(128 mu).
std::pair<double, double> mu_and_lower_bound(const HeteroclinicFamily& fm,
                                             const HeteroclinicFamily& fp);

struct SeparationCertificate {
  double eps = 0.0;
  double beta = 0.0;
  double j_min = 0.0;
  double d_min = 0.0;
  double mu = 0.0;
  double lower_bound = 0.0;   // 1/sqrt(128 mu)
  double wizz = 0.0;          // sqrt(2 beta)(sqrt(3)-1)/16
  double min_modulus = 0.0;   // min over members of min_x |e(x)|
  double arc_action = 0.0;    // J of the arc map on the working grid
  bool full_action_path = false;  // j_min < wizz certifies min|e| >= 1/2 directly
  bool segment_form_ok = false;   // member wizz segments all above the bound
  bool reflection_closure = false;
  double reflection_action_gap = 0.0;
};

struct FamilyConfig {
  Index n = 4001;
  double half_length = 0.0;  // 0 = auto: 1/eps + 6
  SolverOptions solver;
  int verify_samples = 128;
  bool concurrent = true;
};

struct FindFamiliesResult {
  HeteroclinicFamily f_minus;
  HeteroclinicFamily f_plus;
  SeparationCertificate certificate;
};

// Runs the upper-arc and lower-arc minimizations, classifies by winding,
// closes both families under reflection and assembles the certificate.
// Throws SeparationNotFound when either family stays empty.
FindFamiliesResult find_families(double eps, double beta, const FamilyConfig& cfg);

}  // namespace efk

#endif  // EFK_FAMILIES_HPP
