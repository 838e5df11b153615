#include "efk/hspace.hpp"

#include <cmath>

#include "efk/action1d.hpp"
#include "efk/errors.hpp"

namespace efk {

HilbertPoint make_hilbert_point(const Profile1D& e0, const MatX& offset) {
  if (offset.rows() != e0.n() || offset.cols() != e0.m()) {
    throw InvalidParameter("make_hilbert_point: offset shape mismatch");
  }
  HilbertPoint p;
  p.u = e0;
  p.u.values += offset;
  p.offset = offset;
  return p;
}

HilbertPoint hilbert_point_from_profile(const Profile1D& u, const Profile1D& e0) {
  if (!(u.grid == e0.grid)) {
    throw InvalidParameter("hilbert_point_from_profile: mismatched grids");
  }
  HilbertPoint p;
  p.u = u;
  p.offset = u.values - e0.values;
  return p;
}

double effective_potential(const Profile1D& u, double j_min) {
  return action_1d(u) - j_min;
}

double sigma(const Grid1D& grid, const MatX& offset) {
  if (offset.rows() != grid.n) throw InvalidParameter("sigma: shape mismatch");
  const Index n = grid.n;
  const double h = grid.spacing();
  double sum = 0.0;
  for (Index i = 0; i < n; ++i) {
    const double w = (i == 0 || i == n - 1) ? 0.5 * h : h;
    if (i == 0 || i == n - 1) {
      // Even ghost: central difference vanishes at the ends.
      continue;
    }
    sum += w * ((offset.row(i + 1) - offset.row(i - 1)) / (2.0 * h)).squaredNorm();
  }
  return sum;
}

double quadratic_expansion_check(const Profile1D& u, const MinimalHeteroclinic& e) {
  const Profile1D& ep = e.profile;
  if (!(u.grid == ep.grid) || u.m() != ep.m()) {
    throw InvalidParameter("quadratic_expansion_check: mismatched grids");
  }
  const Index n = u.n();
  const double h = u.grid.spacing();
  const double ih2 = 1.0 / (h * h);
  const PotentialPtr& pot = ep.potential;

  const double w_route = effective_potential(u, e.action);

  // Integral route with the same quadrature as action_1d: nodal trapezoid for
  // the curvature and potential terms, cell midpoints for the gradient term.
  double integral = 0.0;
  PointVec uu(u.m()), ee(u.m()), ge(u.m());
  for (Index i = 0; i < n; ++i) {
    const double w = (i == 0 || i == n - 1) ? 0.5 * h : h;
    Eigen::RowVectorXd d2u, d2e;
    if (i == 0) {
      d2u = 2.0 * ih2 * (u.values.row(1) - u.values.row(0));
      d2e = 2.0 * ih2 * (ep.values.row(1) - ep.values.row(0));
    } else if (i == n - 1) {
      d2u = 2.0 * ih2 * (u.values.row(n - 2) - u.values.row(n - 1));
      d2e = 2.0 * ih2 * (ep.values.row(n - 2) - ep.values.row(n - 1));
    } else {
      d2u = ih2 * (u.values.row(i - 1) - 2.0 * u.values.row(i) + u.values.row(i + 1));
      d2e = ih2 * (ep.values.row(i - 1) - 2.0 * ep.values.row(i) + ep.values.row(i + 1));
    }
    uu = u.values.row(i).transpose();
    ee = ep.values.row(i).transpose();
    pot->gradient(ee, ge);
    integral += w * (0.5 * (d2u - d2e).squaredNorm() + pot->value(uu) - pot->value(ee) -
                     ge.dot(uu - ee));
  }
  const double coef = 0.5 * ep.beta / h;
  for (Index c = 0; c + 1 < n; ++c) {
    const auto du = u.values.row(c + 1) - u.values.row(c);
    const auto de = ep.values.row(c + 1) - ep.values.row(c);
    integral += coef * (du - de).squaredNorm();
  }
  return std::abs(w_route - integral);
}

double dist_to_family(const Profile1D& u, const HeteroclinicFamily& f) {
  if (f.members.empty()) throw InvalidParameter("dist_to_family: empty family");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& e : f.members) {
    best = std::min(best, scan_translation(e.profile, u).d_refined);
  }
  return best;
}

const char* tube_class_name(TubeClass c) {
  switch (c) {
    case TubeClass::kMinusTube: return "minus";
    case TubeClass::kPlusTube: return "plus";
    case TubeClass::kBoth: return "both";
    case TubeClass::kNeither: return "neither";
  }
  return "?";
}

TubeClass tube_membership(double d_minus, double d_plus, double d_min) {
  const double half = 0.5 * d_min;
  const double quarter = 0.25 * d_min;
  const bool in_minus = d_minus <= half;
  const bool in_plus = d_plus <= half;
  if (in_minus && in_plus) return TubeClass::kBoth;
  if (in_minus) return TubeClass::kMinusTube;
  if (in_plus) return TubeClass::kPlusTube;
  if (std::abs(d_minus - d_plus) <= quarter) return TubeClass::kBoth;
  return TubeClass::kNeither;
}

TubeClass tube_membership(const Profile1D& u, const TubeSets& tubes) {
  if (!tubes.f_minus || !tubes.f_plus) {
    throw InvalidParameter("tube_membership: certificate families missing");
  }
  return tube_membership(dist_to_family(u, *tubes.f_minus),
                         dist_to_family(u, *tubes.f_plus), tubes.d_min);
}

}  // namespace efk
