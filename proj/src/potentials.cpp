#include "efk/potentials.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "efk/errors.hpp"

namespace efk {

namespace {

// B(s) = exp(-1/s) for s > 0, else 0. Smooth at 0 with all derivatives 0.
inline double bump(double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; }
inline double bump_d1(double s) { return s > 0.0 ? bump(s) / (s * s) : 0.0; }
inline double bump_d2(double s) {
  if (s <= 0.0) return 0.0;
  const double b = bump(s);
  return b * (1.0 - 2.0 * s) / (s * s * s * s);
}

}  // namespace

double smoothstep(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  const double a = bump(s);
  const double b = bump(1.0 - s);
  return a / (a + b);
}

double smoothstep_d1(double s) {
  if (s <= 0.0 || s >= 1.0) return 0.0;
  const double a = bump(s), b = bump(1.0 - s);
  const double ad = bump_d1(s), bd = -bump_d1(1.0 - s);
  const double den = a + b;
  return (ad * den - a * (ad + bd)) / (den * den);
}

double smoothstep_d2(double s) {
  if (s <= 0.0 || s >= 1.0) return 0.0;
  const double a = bump(s), b = bump(1.0 - s);
  const double ad = bump_d1(s), bd = -bump_d1(1.0 - s);
  const double add = bump_d2(s), bdd = bump_d2(1.0 - s);
  const double den = a + b;
  const double num = a;
  const double dden = ad + bd;
  const double ddden = add + bdd;
  // (num/den)'' with num' = ad, num'' = add.
  return (add * den * den - num * ddden * den - 2.0 * ad * dden * den +
          2.0 * num * dden * dden) /
         (den * den * den);
}

MollifierSpec MollifierSpec::for_eps(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) {
    throw InvalidParameter("MollifierSpec: eps must lie in (0,1)");
  }
  MollifierSpec spec;
  spec.eps = eps;
  spec.inner_knot = std::sqrt(1.0 - eps);
  spec.outer_knot = std::sqrt(1.0 - 0.5 * eps);
  return spec;
}

double mollifier_phi(double t, const MollifierSpec& spec) {
  return smoothstep((t - spec.inner_knot) / (spec.outer_knot - spec.inner_knot));
}

double mollifier_phi_d1(double t, const MollifierSpec& spec) {
  const double w = spec.outer_knot - spec.inner_knot;
  return smoothstep_d1((t - spec.inner_knot) / w) / w;
}

double mollifier_phi_d2(double t, const MollifierSpec& spec) {
  const double w = spec.outer_knot - spec.inner_knot;
  return smoothstep_d2((t - spec.inner_knot) / w) / (w * w);
}

double Potential::well_hessian_min_eig() const {
  PointMat h(dim_, dim_);
  hessian(well_plus_, h);
  if (dim_ == 1) return h(0, 0);
  Eigen::SelfAdjointEigenSolver<MatX> es{MatX(h)};
  return es.eigenvalues().minCoeff();
}

void Potential::calibrate(double well_radius) {
  well_radius_ = well_radius;
  double min_eig = std::numeric_limits<double>::infinity();
  double max_ratio = 0.0;
  PointMat h(dim_, dim_);

  auto scan_point = [&](const PointVec& well, const PointVec& d) {
    const PointVec u = well + d;
    hessian(u, h);
    if (dim_ == 1) {
      min_eig = std::min(min_eig, h(0, 0));
    } else {
      Eigen::SelfAdjointEigenSolver<MatX> es{MatX(h)};
      min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
    }
    const double d2 = d.squaredNorm();
    if (d2 > 0.0) max_ratio = std::max(max_ratio, 2.0 * value(u) / d2);
  };

  // ~1e4 samples per ball: a line for m=1, a polar grid for m=2.
  for (const PointVec* well : {&well_minus_, &well_plus_}) {
    if (dim_ == 1) {
      const int n = 10001;
      for (int i = 0; i < n; ++i) {
        PointVec d(1);
        d(0) = -well_radius + 2.0 * well_radius * i / (n - 1);
        scan_point(*well, d);
      }
    } else {
      const int nr = 100, na = 100;
      PointVec d(dim_);
      d.setZero();
      scan_point(*well, d);
      for (int ir = 1; ir <= nr; ++ir) {
        const double r = well_radius * ir / nr;
        for (int ia = 0; ia < na; ++ia) {
          const double th = 2.0 * M_PI * ia / na;
          d.setZero();
          d(0) = r * std::cos(th);
          d(1) = r * std::sin(th);
          scan_point(*well, d);
        }
      }
    }
  }
  convexity_ = min_eig;
  upper_constant_ = max_ratio;
}

namespace {

class AllenCahnPotential final : public Potential {
 public:
  explicit AllenCahnPotential(double well_radius)
      : Potential(1, make_well(-1.0), make_well(1.0), "allen_cahn") {
    calibrate(well_radius);
  }

  double value(const PointVec& u) const override {
    const double s = u(0) * u(0) - 1.0;
    return 0.25 * s * s;
  }
  void gradient(const PointVec& u, PointVec& g) const override {
    g.resize(1);
    g(0) = u(0) * u(0) * u(0) - u(0);
  }
  void hessian(const PointVec& u, PointMat& h) const override {
    h.resize(1, 1);
    h(0, 0) = 3.0 * u(0) * u(0) - 1.0;
  }

 private:
  static PointVec make_well(double v) {
    PointVec w(1);
    w(0) = v;
    return w;
  }
};

PointVec make_well2(double x, double y) {
  PointVec w(2);
  w << x, y;
  return w;
}

class GinzburgLandauPotential final : public Potential {
 public:
  explicit GinzburgLandauPotential(double well_radius)
      : Potential(2, make_well2(-1.0, 0.0), make_well2(1.0, 0.0), "ginzburg_landau") {
    calibrate(well_radius);
  }

  double value(const PointVec& u) const override {
    const double s = u.squaredNorm() - 1.0;
    return 0.25 * s * s;
  }
  void gradient(const PointVec& u, PointVec& g) const override {
    g = (u.squaredNorm() - 1.0) * u;
  }
  void hessian(const PointVec& u, PointMat& h) const override {
    const double s = u.squaredNorm() - 1.0;
    h.resize(2, 2);
    h.setIdentity();
    h *= s;
    h += 2.0 * u * u.transpose();
  }
};

class WepsPotential final : public Potential {
 public:
  WepsPotential(double eps, WepsArgMode mode, double well_radius)
      : Potential(2, make_well2(-1.0, 0.0), make_well2(1.0, 0.0), "w_eps"), mode_(mode) {
    if (mode == WepsArgMode::kLiteral) {
      spec_ = MollifierSpec::for_eps(eps);
    } else {
      // Knots placed so the transition happens where |u|^2 crosses 1-eps.
      spec_.eps = eps;
      spec_.inner_knot = 1.0 - eps;
      spec_.outer_knot = 1.0 - 0.5 * eps;
    }
    calibrate(well_radius);
  }

  double value(const PointVec& u) const override {
    const double q = u.squaredNorm();
    const double s = q - 1.0;
    return 0.25 * s * s + u(1) * u(1) * mollifier_phi(q, spec_);
  }

  void gradient(const PointVec& u, PointVec& g) const override {
    const double q = u.squaredNorm();
    const double phi = mollifier_phi(q, spec_);
    const double dphi = mollifier_phi_d1(q, spec_);
    const double u2sq = u(1) * u(1);
    g = (q - 1.0) * u + (2.0 * u2sq * dphi) * u;
    g(1) += 2.0 * u(1) * phi;
  }

  void hessian(const PointVec& u, PointMat& h) const override {
    const double q = u.squaredNorm();
    const double phi = mollifier_phi(q, spec_);
    const double dphi = mollifier_phi_d1(q, spec_);
    const double ddphi = mollifier_phi_d2(q, spec_);
    const double u2sq = u(1) * u(1);
    h.resize(2, 2);
    // F part.
    h.setIdentity();
    h *= (q - 1.0);
    h += 2.0 * u * u.transpose();
    // u2^2 phi(q) part.
    h += (4.0 * u2sq * ddphi) * u * u.transpose();
    h += (2.0 * u2sq * dphi) * PointMat::Identity(2, 2);
    PointVec e2 = make_well2(0.0, 1.0);
    h += 4.0 * u(1) * dphi * (e2 * u.transpose() + u * e2.transpose());
    h(1, 1) += 2.0 * phi;
  }

 private:
  MollifierSpec spec_;
  WepsArgMode mode_;
};

}  // namespace

PotentialPtr allen_cahn(double well_radius) {
  return std::make_shared<AllenCahnPotential>(well_radius);
}

PotentialPtr ginzburg_landau(double well_radius) {
  return std::make_shared<GinzburgLandauPotential>(well_radius);
}

PotentialPtr w_eps(double eps, double /*beta_hint*/, WepsArgMode mode, double well_radius) {
  if (!(eps > 0.0 && eps < 1.0)) {
    throw InvalidParameter("w_eps: eps must lie in (0,1)");
  }
  // The well ball must stay inside the phi == 1 plateau: across the
  // transition annulus the phi'' chain terms make the Hessian indefinite.
  const double plateau = mode == WepsArgMode::kLiteral
                             ? 1.0 - std::pow(1.0 - 0.5 * eps, 0.25)
                             : 1.0 - std::sqrt(1.0 - 0.5 * eps);
  const double r = std::min(well_radius, 0.9 * plateau);
  return std::make_shared<WepsPotential>(eps, mode, r);
}

PotentialPtr make_potential(const std::string& name, double eps, double beta_hint,
                            WepsArgMode mode) {
  if (name == "allen_cahn") return allen_cahn();
  if (name == "ginzburg_landau") return ginzburg_landau();
  if (name == "w_eps") return w_eps(eps, beta_hint, mode);
  throw ConfigError("unknown potential: " + name);
}

VerificationReport verify_double_well(const Potential& p, double box_half_width,
                                      int samples_per_dim) {
  if (samples_per_dim < 16) {
    throw InvalidParameter("verify_double_well: samples_per_dim must be >= 16");
  }
  VerificationReport rep;
  const int m = p.dim();
  const double a = box_half_width;
  const double r = p.well_radius();
  const double c = p.convexity();

  // Near-zero threshold: a quarter of the convexity lower bound at the ball
  // boundary when available, otherwise a small absolute floor.
  rep.zero_tolerance = c > 0.0 ? 0.25 * 0.5 * c * r * r : 1e-9;

  double min_outside = std::numeric_limits<double>::infinity();
  double min_boundary = std::numeric_limits<double>::infinity();
  bool zeros_ok = true;

  PointVec u(m);
  auto visit = [&](bool on_boundary) {
    const double w = p.value(u);
    const double dm = (u - p.well_minus()).norm();
    const double dp = (u - p.well_plus()).norm();
    const bool inside = std::min(dm, dp) <= r;
    if (!inside) {
      min_outside = std::min(min_outside, w);
      if (w <= rep.zero_tolerance) zeros_ok = false;
    }
    if (on_boundary) min_boundary = std::min(min_boundary, w);
  };

  if (m == 1) {
    for (int i = 0; i < samples_per_dim; ++i) {
      u(0) = -a + 2.0 * a * i / (samples_per_dim - 1);
      visit(i == 0 || i == samples_per_dim - 1);
    }
  } else if (m == 2) {
    for (int i = 0; i < samples_per_dim; ++i) {
      for (int j = 0; j < samples_per_dim; ++j) {
        u(0) = -a + 2.0 * a * i / (samples_per_dim - 1);
        u(1) = -a + 2.0 * a * j / (samples_per_dim - 1);
        visit(i == 0 || j == 0 || i == samples_per_dim - 1 || j == samples_per_dim - 1);
      }
    }
  } else {
    throw InvalidParameter("verify_double_well: only m in {1,2} is sampled");
  }

  // Min Hessian eigenvalue over the well balls, re-sampled independently.
  double min_eig = std::numeric_limits<double>::infinity();
  PointMat h(m, m);
  const int nb = std::max(32, samples_per_dim / 4);
  for (const PointVec* well : {&p.well_minus(), &p.well_plus()}) {
    if (m == 1) {
      for (int i = 0; i < nb; ++i) {
        u(0) = (*well)(0) - r + 2.0 * r * i / (nb - 1);
        p.hessian(u, h);
        min_eig = std::min(min_eig, h(0, 0));
      }
    } else {
      for (int ir = 0; ir <= nb; ++ir) {
        for (int ia = 0; ia < nb; ++ia) {
          const double rr = r * ir / nb;
          const double th = 2.0 * M_PI * ia / nb;
          u = *well;
          u(0) += rr * std::cos(th);
          u(1) += rr * std::sin(th);
          p.hessian(u, h);
          Eigen::SelfAdjointEigenSolver<MatX> es{MatX(h)};
          min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
        }
      }
    }
  }

  rep.min_outside_value = min_outside;
  rep.min_boundary_value = min_boundary;
  rep.min_ball_eigenvalue = min_eig;
  rep.zeros_in_wells = zeros_ok;
  rep.hessian_convex = c > 0.0 && min_eig >= c - 1e-9 * std::abs(c) && min_eig > 0.0;
  rep.boundary_positive = min_boundary > 0.0;
  rep.admissible = rep.zeros_in_wells && rep.hessian_convex && rep.boundary_positive;
  if (!rep.admissible) {
    rep.details = std::string("failed:") + (rep.zeros_in_wells ? "" : " zeros-outside-wells") +
                  (rep.hessian_convex ? "" : " nonconvex-wells") +
                  (rep.boundary_positive ? "" : " boundary-nonpositive");
  }
  return rep;
}

double check_gradient(const Potential& p, const PointVec& u, double h) {
  if (!(h > 0.0)) throw InvalidParameter("check_gradient: h must be > 0");
  const int m = p.dim();
  PointVec g(m);
  p.gradient(u, g);
  double worst = 0.0;
  PointVec up = u, um = u;
  for (int i = 0; i < m; ++i) {
    up = u;
    um = u;
    up(i) += h;
    um(i) -= h;
    const double fd = (p.value(up) - p.value(um)) / (2.0 * h);
    worst = std::max(worst, std::abs(g(i) - fd) / (1.0 + std::abs(g(i))));
  }
  return worst;
}

double check_hessian(const Potential& p, const PointVec& u, double h) {
  if (!(h > 0.0)) throw InvalidParameter("check_hessian: h must be > 0");
  const int m = p.dim();
  PointMat hh(m, m);
  p.hessian(u, hh);
  double worst = 0.0;
  PointVec up(m), um(m), gp(m), gm(m);
  for (int i = 0; i < m; ++i) {
    up = u;
    um = u;
    up(i) += h;
    um(i) -= h;
    p.gradient(up, gp);
    p.gradient(um, gm);
    for (int j = 0; j < m; ++j) {
      const double fd = (gp(j) - gm(j)) / (2.0 * h);
      worst = std::max(worst, std::abs(hh(j, i) - fd) / (1.0 + std::abs(hh(j, i))));
    }
  }
  return worst;
}

}  // namespace efk
