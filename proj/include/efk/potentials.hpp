#ifndef EFK_POTENTIALS_HPP
#define EFK_POTENTIALS_HPP

#include <memory>
#include <string>

#include "efk/types.hpp"

namespace efk {

// C^inf partition-of-unity smoothstep: 0 for s<=0, 1 for s>=1, monotone,
// with all derivatives vanishing at both ends.
double smoothstep(double s);
double smoothstep_d1(double s);
double smoothstep_d2(double s);

// Switch function phi of the W_eps construction: 0 below the inner knot,
// 1 above the outer knot, smoothstep in between.
struct MollifierSpec {
  double eps = 0.0;
  double inner_knot = 0.0;  // sqrt(1-eps)
  double outer_knot = 0.0;  // sqrt(1-eps/2)

  static MollifierSpec for_eps(double eps);
};

double mollifier_phi(double t, const MollifierSpec& spec);
double mollifier_phi_d1(double t, const MollifierSpec& spec);
double mollifier_phi_d2(double t, const MollifierSpec& spec);

// Which variable the phi knots are applied to when composing phi(|u|^2):
// kLiteral compares |u|^2 against the knots as printed (transition when
// |u|^2 crosses sqrt(1-eps)); kSquared places the transition where |u|^2
// crosses 1-eps instead. Both readings give a bistable potential.
enum class WepsArgMode { kLiteral, kSquared };

// A double-well potential record: wells, well-ball radius r, convexity c and
// upper constant mu_w measured over the well balls, plus analytic value,
// gradient and Hessian evaluators. Evaluators are pure and thread-safe.
class Potential {
 public:
  virtual ~Potential() = default;

  virtual double value(const PointVec& u) const = 0;
  virtual void gradient(const PointVec& u, PointVec& g) const = 0;
  virtual void hessian(const PointVec& u, PointMat& h) const = 0;

  PointVec gradient(const PointVec& u) const {
    PointVec g(dim_);
    gradient(u, g);
    return g;
  }
  PointMat hessian(const PointVec& u) const {
    PointMat h(dim_, dim_);
    hessian(u, h);
    return h;
  }

  int dim() const { return dim_; }
  const PointVec& well_minus() const { return well_minus_; }
  const PointVec& well_plus() const { return well_plus_; }
  double well_radius() const { return well_radius_; }
  double convexity() const { return convexity_; }
  double upper_constant() const { return upper_constant_; }
  const std::string& name() const { return name_; }

  // Smallest Hessian eigenvalue exactly at the wells (linearization input).
  double well_hessian_min_eig() const;

 protected:
  Potential(int dim, PointVec well_minus, PointVec well_plus, std::string name)
      : dim_(dim),
        well_minus_(std::move(well_minus)),
        well_plus_(std::move(well_plus)),
        name_(std::move(name)) {}

  // Measure convexity/upper constants over the well balls (dense sampling).
  void calibrate(double well_radius);

  int dim_;
  PointVec well_minus_;
  PointVec well_plus_;
  double well_radius_ = 0.2;
  double convexity_ = 0.0;
  double upper_constant_ = 0.0;
  std::string name_;
};

using PotentialPtr = std::shared_ptr<const Potential>;

// m=1, W(u) = (u^2-1)^2/4, wells +-1.
PotentialPtr allen_cahn(double well_radius = 0.2);

// m=2, F(u) = (|u|^2-1)^2/4. Zero set is the unit circle, not a double well;
// kept as a building block and flagged non-admissible by verify_double_well.
PotentialPtr ginzburg_landau(double well_radius = 0.2);

// m=2, W_eps(u1,u2) = F(u) + u2^2 phi(|u|^2), wells (+-1, 0). beta_hint is
// accepted for interface compatibility and not used by the construction.
PotentialPtr w_eps(double eps, double beta_hint = 1.0,
                   WepsArgMode mode = WepsArgMode::kLiteral,
                   double well_radius = 0.2);

PotentialPtr make_potential(const std::string& name, double eps, double beta_hint = 1.0,
                            WepsArgMode mode = WepsArgMode::kLiteral);

struct VerificationReport {
  bool admissible = false;
  bool zeros_in_wells = false;     // sampled near-zeros of W lie in the well balls
  bool hessian_convex = false;     // c > 0 and min eig over well balls >= c
  bool boundary_positive = false;  // min W on the sampling-box boundary > 0
  double min_outside_value = 0.0;  // min W over samples outside both well balls
  double min_ball_eigenvalue = 0.0;
  double min_boundary_value = 0.0;
  double zero_tolerance = 0.0;
  std::string details;
};

// Samples W on [-box_half_width, box_half_width]^m and checks the double-well
// structure: near-zeros only inside the well balls, uniform convexity on the
// balls, positivity on the box boundary (proxy for the liminf condition).
VerificationReport verify_double_well(const Potential& p, double box_half_width,
                                      int samples_per_dim);

// Max over components of |analytic - central difference| / (1 + |analytic|).
double check_gradient(const Potential& p, const PointVec& u, double h);

// Same test for the Hessian against central differences of the gradient.
double check_hessian(const Potential& p, const PointVec& u, double h);

}  // namespace efk

#endif  // EFK_POTENTIALS_HPP
