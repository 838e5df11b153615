#include "efk/energy2d.hpp"

#include <algorithm>
#include <cmath>

#include "efk/action1d.hpp"
#include "efk/errors.hpp"
#include "efk/rng.hpp"

namespace efk {

namespace {

void check_field(const Field2D& f) {
  if (!f.potential) throw InvalidParameter("field has no potential");
  if (f.m() != f.potential->dim()) throw InvalidParameter("field/potential dim mismatch");
  for (const MatX& u : f.comps) {
    if (u.rows() != f.grid.nt || u.cols() != f.grid.nx) {
      throw InvalidParameter("field plane shape mismatch");
    }
  }
}

VecX trapezoid_weights(Index n, double h) {
  VecX w = VecX::Constant(n, h);
  w(0) = 0.5 * h;
  w(n - 1) = 0.5 * h;
  return w;
}

// Central second differences along t with even ghost rows.
MatX dt2_of(const MatX& u, double ht) {
  const Index nt = u.rows();
  MatX d(nt, u.cols());
  const double ih2 = 1.0 / (ht * ht);
  d.row(0) = 2.0 * ih2 * (u.row(1) - u.row(0));
  d.middleRows(1, nt - 2) =
      ih2 * (u.topRows(nt - 2) - 2.0 * u.middleRows(1, nt - 2) + u.bottomRows(nt - 2));
  d.row(nt - 1) = 2.0 * ih2 * (u.row(nt - 2) - u.row(nt - 1));
  return d;
}

MatX dx2_of(const MatX& u, double hx) {
  const Index nx = u.cols();
  MatX d(u.rows(), nx);
  const double ih2 = 1.0 / (hx * hx);
  d.col(0) = 2.0 * ih2 * (u.col(1) - u.col(0));
  d.middleCols(1, nx - 2) =
      ih2 * (u.leftCols(nx - 2) - 2.0 * u.middleCols(1, nx - 2) + u.rightCols(nx - 2));
  d.col(nx - 1) = 2.0 * ih2 * (u.col(nx - 2) - u.col(nx - 1));
  return d;
}

}  // namespace

double energy_slab(const Field2D& f, Index i_lo, Index i_hi) {
  check_field(f);
  const Index nt = f.nt(), nx = f.nx(), m = f.m();
  if (i_lo < 0 || i_hi >= nt || i_lo >= i_hi) {
    throw InvalidParameter("energy_slab: bad row range");
  }
  const double ht = f.grid.ht(), hx = f.grid.hx();
  const Index rows = i_hi - i_lo + 1;
  const VecX wt = trapezoid_weights(rows, ht);  // slab trapezoid in t
  const VecX wx = trapezoid_weights(nx, hx);
  const OperatorCoeffs& cf = f.coeffs;

  double total = 0.0;
  for (Index c = 0; c < m; ++c) {
    const MatX& u = f.comps[c];
    const MatX dt2 = dt2_of(u, ht).middleRows(i_lo, rows);
    const MatX dx2 = dx2_of(u, hx).middleRows(i_lo, rows);
    total += 0.5 * cf.a11 * wt.dot(dt2.array().square().matrix() * wx);
    total += 0.5 * cf.a22 * wt.dot(dx2.array().square().matrix() * wx);

    const MatX et = (u.middleRows(i_lo + 1, rows - 1) - u.middleRows(i_lo, rows - 1)) / ht;
    total += 0.5 * cf.b1 * ht * (et.array().square().matrix() * wx).sum();

    const MatX ex =
        (u.block(i_lo, 1, rows, nx - 1) - u.block(i_lo, 0, rows, nx - 1)) / hx;
    total += 0.5 * cf.b2 * hx * wt.dot(ex.array().square().matrix().rowwise().sum());

    if (cf.a12 != 0.0) {
      const MatX cc = (u.block(i_lo + 1, 1, rows - 1, nx - 1) -
                       u.block(i_lo + 1, 0, rows - 1, nx - 1) -
                       u.block(i_lo, 1, rows - 1, nx - 1) +
                       u.block(i_lo, 0, rows - 1, nx - 1)) /
                      (ht * hx);
      total += 0.5 * cf.a12 * ht * hx * cc.squaredNorm();
    }
  }

  PointVec uu(m);
  for (Index i = i_lo; i <= i_hi; ++i) {
    double row_sum = 0.0;
    for (Index j = 0; j < nx; ++j) {
      for (Index c = 0; c < m; ++c) uu(c) = f.comps[c](i, j);
      row_sum += wx(j) * f.potential->value(uu);
    }
    total += wt(i - i_lo) * row_sum;
  }
  return total;
}

double energy_2d(const Field2D& f) { return energy_slab(f, 0, f.nt() - 1); }

std::vector<MatX> energy_gradient_2d(const Field2D& f) {
  check_field(f);
  const Index nt = f.nt(), nx = f.nx(), m = f.m();
  const double ht = f.grid.ht(), hx = f.grid.hx();
  const double iht2 = 1.0 / (ht * ht), ihx2 = 1.0 / (hx * hx);
  const VecX wt = trapezoid_weights(nt, ht);
  const VecX wx = trapezoid_weights(nx, hx);
  const OperatorCoeffs& cf = f.coeffs;

  std::vector<MatX> grad(m, MatX::Zero(nt, nx));
  for (Index c = 0; c < m; ++c) {
    const MatX& u = f.comps[c];
    MatX& g = grad[c];

    // Curvature terms: adjoint of D2 applied to the weighted differences,
    // with the even-ghost chain folding the boundary rows/cols inward.
    MatX qt = cf.a11 * (wt.asDiagonal() * dt2_of(u, ht) * wx.asDiagonal());
    g.middleRows(1, nt - 2) +=
        iht2 * (qt.topRows(nt - 2) - 2.0 * qt.middleRows(1, nt - 2) + qt.bottomRows(nt - 2));
    g.row(1) += iht2 * qt.row(0);
    g.row(nt - 2) += iht2 * qt.row(nt - 1);

    MatX qx = cf.a22 * (wt.asDiagonal() * dx2_of(u, hx) * wx.asDiagonal());
    g.middleCols(1, nx - 2) +=
        ihx2 * (qx.leftCols(nx - 2) - 2.0 * qx.middleCols(1, nx - 2) + qx.rightCols(nx - 2));
    g.col(1) += ihx2 * qx.col(0);
    g.col(nx - 2) += ihx2 * qx.col(nx - 1);

    const MatX et = (u.bottomRows(nt - 1) - u.topRows(nt - 1)) / ht;
    g.middleRows(1, nt - 2) +=
        cf.b1 * (et.topRows(nt - 2) - et.bottomRows(nt - 2)) * wx.asDiagonal();

    const MatX ex = (u.rightCols(nx - 1) - u.leftCols(nx - 1)) / hx;
    g.middleCols(1, nx - 2) +=
        cf.b2 * wt.asDiagonal() * (ex.leftCols(nx - 2) - ex.rightCols(nx - 2));

    if (cf.a12 != 0.0) {
      const MatX cc = (u.block(1, 1, nt - 1, nx - 1) - u.block(1, 0, nt - 1, nx - 1) -
                       u.block(0, 1, nt - 1, nx - 1) + u.block(0, 0, nt - 1, nx - 1)) /
                      (ht * hx);
      g.block(0, 0, nt - 1, nx - 1) += cf.a12 * cc;
      g.block(1, 0, nt - 1, nx - 1) -= cf.a12 * cc;
      g.block(0, 1, nt - 1, nx - 1) -= cf.a12 * cc;
      g.block(1, 1, nt - 1, nx - 1) += cf.a12 * cc;
    }
  }

  PointVec uu(m), gw(m);
  for (Index i = 0; i < nt; ++i) {
    for (Index j = 0; j < nx; ++j) {
      for (Index c = 0; c < m; ++c) uu(c) = f.comps[c](i, j);
      f.potential->gradient(uu, gw);
      const double w = wt(i) * wx(j);
      for (Index c = 0; c < m; ++c) grad[c](i, j) += w * gw(c);
    }
  }

  for (Index c = 0; c < m; ++c) {
    grad[c].row(0).setZero();
    grad[c].row(nt - 1).setZero();
    grad[c].col(0).setZero();
    grad[c].col(nx - 1).setZero();
  }
  return grad;
}

namespace {

struct ResidualInfo {
  double residual = 0.0;
  double scale = 1.0;
};

ResidualInfo residual_info(const Field2D& f) {
  check_field(f);
  const Index nt = f.nt(), nx = f.nx(), m = f.m();
  if (nt < 7 || nx < 7) throw InvalidParameter("residual_pde: margin exceeds grid");
  const double ht = f.grid.ht(), hx = f.grid.hx();
  const double iht2 = 1.0 / (ht * ht), ihx2 = 1.0 / (hx * hx);
  const double iht4 = iht2 * iht2, ihx4 = ihx2 * ihx2;
  const double imix = iht2 * ihx2;
  const OperatorCoeffs& cf = f.coeffs;

  double worst = 0.0;
  double scale = 1.0;
  PointVec uu(m), gw(m);
  for (Index i = 2; i + 2 < nt; ++i) {
    for (Index j = 2; j + 2 < nx; ++j) {
      for (Index c = 0; c < m; ++c) uu(c) = f.comps[c](i, j);
      f.potential->gradient(uu, gw);
      double res2 = 0.0, fourth = 0.0, second = 0.0;
      for (Index c = 0; c < m; ++c) {
        const MatX& u = f.comps[c];
        const double d4t = iht4 * (u(i - 2, j) - 4.0 * u(i - 1, j) + 6.0 * u(i, j) -
                                   4.0 * u(i + 1, j) + u(i + 2, j));
        const double d4x = ihx4 * (u(i, j - 2) - 4.0 * u(i, j - 1) + 6.0 * u(i, j) -
                                   4.0 * u(i, j + 1) + u(i, j + 2));
        const double dtx =
            imix * (u(i - 1, j - 1) - 2.0 * u(i - 1, j) + u(i - 1, j + 1) -
                    2.0 * u(i, j - 1) + 4.0 * u(i, j) - 2.0 * u(i, j + 1) +
                    u(i + 1, j - 1) - 2.0 * u(i + 1, j) + u(i + 1, j + 1));
        const double d2t = iht2 * (u(i - 1, j) - 2.0 * u(i, j) + u(i + 1, j));
        const double d2x = ihx2 * (u(i, j - 1) - 2.0 * u(i, j) + u(i, j + 1));
        const double high = cf.a11 * d4t + cf.a12 * dtx + cf.a22 * d4x;
        const double low = cf.b1 * d2t + cf.b2 * d2x;
        const double r = high - low + gw(c);
        res2 += r * r;
        fourth += high * high;
        second += low * low;
      }
      worst = std::max(worst, std::sqrt(res2));
      scale = std::max(scale, std::sqrt(fourth) + std::sqrt(second) + gw.norm());
    }
  }
  return {worst, scale};
}

}  // namespace

double residual_pde(const Field2D& f) { return residual_info(f).residual; }
double residual_scale(const Field2D& f) { return residual_info(f).scale; }

Field2D build_V0(const Profile1D& e_minus, const Profile1D& e_plus, const Grid2D& grid,
                 OperatorVariant variant) {
  if (!(e_minus.grid == e_plus.grid) || e_minus.m() != e_plus.m()) {
    throw InvalidParameter("build_V0: incompatible 1D profiles");
  }
  if (e_minus.grid.n != grid.nx || e_minus.grid.half_length != grid.x_half_length) {
    throw InvalidParameter("build_V0: profile grid does not match the field x grid");
  }
  Field2D f = make_field(grid, e_minus.potential, e_minus.beta, variant);
  for (Index i = 0; i < grid.nt; ++i) {
    const double t = grid.t(i);
    for (Index c = 0; c < f.m(); ++c) {
      const auto em = e_minus.values.col(c).transpose();
      const auto ep = e_plus.values.col(c).transpose();
      if (t <= -1.0) {
        f.comps[c].row(i) = em;
      } else if (t >= 1.0) {
        f.comps[c].row(i) = ep;
      } else {
        const double blend = 0.25 * (3.0 * t - t * t * t);
        f.comps[c].row(i) = 0.5 * (ep + em) + blend * (ep - em);
      }
    }
  }
  return f;
}

double action_functional_J_slab(const Field2D& f, double j_min, Index i_lo, Index i_hi) {
  check_field(f);
  const Index nt = f.nt(), nx = f.nx(), m = f.m();
  if (i_lo < 0 || i_hi >= nt || i_lo >= i_hi) {
    throw InvalidParameter("action_functional_J: bad row range");
  }
  const OperatorCoeffs& cf = f.coeffs;
  if (std::abs(cf.a22 - 1.0) > 1e-14 || std::abs(cf.b2 - f.beta) > 1e-14) {
    throw InvalidParameter("action_functional_J: slice action requires a22=1, b2=beta");
  }
  const double ht = f.grid.ht(), hx = f.grid.hx();
  const VecX wx = trapezoid_weights(nx, hx);

  // Plain central differences in t (even ghosts), kept independent of the
  // energy discretization so the splitting identity is a real check.
  std::vector<MatX> ut(m), utt(m);
  for (Index c = 0; c < m; ++c) {
    const MatX& u = f.comps[c];
    MatX d1 = MatX::Zero(nt, nx);
    d1.middleRows(1, nt - 2) = (u.bottomRows(nt - 2) - u.topRows(nt - 2)) / (2.0 * ht);
    ut[c] = std::move(d1);
    utt[c] = dt2_of(u, ht);
  }

  VecX integrand = VecX::Zero(i_hi - i_lo + 1);
  for (Index i = i_lo; i <= i_hi; ++i) {
    double v = 0.0;
    for (Index c = 0; c < m; ++c) {
      v += 0.5 * cf.a11 * utt[c].row(i).array().square().matrix().dot(wx.transpose());
      v += 0.5 * cf.b1 * ut[c].row(i).array().square().matrix().dot(wx.transpose());
      if (cf.a12 != 0.0) {
        // sigma(V'(t)) with weight a12/2: central x-derivative of u_t.
        double s = 0.0;
        for (Index j = 1; j + 1 < nx; ++j) {
          const double d = (ut[c](i, j + 1) - ut[c](i, j - 1)) / (2.0 * hx);
          s += wx(j) * d * d;
        }
        v += 0.5 * cf.a12 * s;
      }
    }
    v += action_1d(f.slice(i)) - j_min;
    integrand(i - i_lo) = v;
  }

  double total = 0.0;
  for (Index i = 0; i < integrand.size(); ++i) {
    const double w = (i == 0 || i == integrand.size() - 1) ? 0.5 * ht : ht;
    total += w * integrand(i);
  }
  return total;
}

double action_functional_J(const Field2D& f, double j_min) {
  return action_functional_J_slab(f, j_min, 0, f.nt() - 1);
}

SliceTrace layer_asymptotics(const Field2D& f, const HeteroclinicFamily& fm,
                             const HeteroclinicFamily& fp, double d_min) {
  check_field(f);
  const Index nt = f.nt(), nx = f.nx(), m = f.m();
  const double ht = f.grid.ht(), hx = f.grid.hx();
  const VecX wx = trapezoid_weights(nx, hx);

  SliceTrace trace;
  trace.t.resize(nt);
  trace.d_minus.resize(nt);
  trace.d_plus.resize(nt);
  trace.ut_norm.resize(nt);
  trace.tube.resize(nt);

  for (Index i = 0; i < nt; ++i) {
    trace.t(i) = f.grid.t(i);
    const Profile1D s = f.slice(i);
    trace.d_minus(i) = dist_to_family(s, fm);
    trace.d_plus(i) = dist_to_family(s, fp);
    trace.tube[i] = tube_membership(trace.d_minus(i), trace.d_plus(i), d_min);
    double nrm = 0.0;
    if (i > 0 && i + 1 < nt) {
      for (Index c = 0; c < m; ++c) {
        const Eigen::RowVectorXd d =
            (f.comps[c].row(i + 1) - f.comps[c].row(i - 1)) / (2.0 * ht);
        nrm += d.array().square().matrix().dot(wx.transpose());
      }
    }
    trace.ut_norm(i) = std::sqrt(nrm);
  }

  Index k = 0;
  while (k < nt && trace.tube[k] == TubeClass::kMinusTube) ++k;
  trace.t_minus_exit = k - 1;
  k = nt - 1;
  while (k >= 0 && trace.tube[k] == TubeClass::kPlusTube) --k;
  trace.t_plus_entry = k + 1;

  Index last_minus = -1, first_plus = nt;
  for (Index i = 0; i < nt; ++i) {
    if (trace.tube[i] == TubeClass::kMinusTube) last_minus = i;
    if (trace.tube[i] == TubeClass::kPlusTube && first_plus == nt) first_plus = i;
  }
  trace.single_crossing = trace.t_minus_exit >= 0 && trace.t_plus_entry < nt &&
                          trace.t_minus_exit < trace.t_plus_entry &&
                          last_minus == trace.t_minus_exit &&
                          first_plus == trace.t_plus_entry;
  return trace;
}

double uniform_well_convergence(const Field2D& f) {
  check_field(f);
  const Index nt = f.nt(), nx = f.nx(), m = f.m();
  const double L = f.grid.x_half_length;
  double worst = 0.0;
  PointVec uu(m);
  for (Index i = 0; i < nt; ++i) {
    for (Index j = 0; j < nx; ++j) {
      const double x = f.grid.x(j);
      if (std::abs(x) < 0.8 * L) continue;
      const PointVec& well = x > 0.0 ? f.potential->well_plus() : f.potential->well_minus();
      for (Index c = 0; c < m; ++c) uu(c) = f.comps[c](i, j);
      worst = std::max(worst, (uu - well).norm());
    }
  }
  return worst;
}

namespace {

// Energy terms whose stencils touch rows/cols inside the given node box.
double energy_terms_in_box(const Field2D& f, Index r0, Index r1, Index c0, Index c1) {
  const Index nt = f.nt(), nx = f.nx(), m = f.m();
  const double ht = f.grid.ht(), hx = f.grid.hx();
  const double iht2 = 1.0 / (ht * ht), ihx2 = 1.0 / (hx * hx);
  const VecX wt = trapezoid_weights(nt, ht);
  const VecX wx = trapezoid_weights(nx, hx);
  const OperatorCoeffs& cf = f.coeffs;

  double total = 0.0;
  PointVec uu(m);
  for (Index i = r0; i <= r1; ++i) {
    for (Index j = c0; j <= c1; ++j) {
      double nodal = 0.0;
      for (Index c = 0; c < m; ++c) {
        const MatX& u = f.comps[c];
        double d2t, d2x;
        if (i == 0) {
          d2t = 2.0 * iht2 * (u(1, j) - u(0, j));
        } else if (i == nt - 1) {
          d2t = 2.0 * iht2 * (u(nt - 2, j) - u(nt - 1, j));
        } else {
          d2t = iht2 * (u(i - 1, j) - 2.0 * u(i, j) + u(i + 1, j));
        }
        if (j == 0) {
          d2x = 2.0 * ihx2 * (u(i, 1) - u(i, 0));
        } else if (j == nx - 1) {
          d2x = 2.0 * ihx2 * (u(i, nx - 2) - u(i, nx - 1));
        } else {
          d2x = ihx2 * (u(i, j - 1) - 2.0 * u(i, j) + u(i, j + 1));
        }
        nodal += 0.5 * cf.a11 * d2t * d2t + 0.5 * cf.a22 * d2x * d2x;
        uu(c) = u(i, j);
      }
      nodal += f.potential->value(uu);
      total += wt(i) * wx(j) * nodal;

      for (Index c = 0; c < m; ++c) {
        const MatX& u = f.comps[c];
        if (i + 1 < nt && i + 1 <= r1 + 1) {
          const double e = (u(i + 1, j) - u(i, j)) / ht;
          total += 0.5 * cf.b1 * ht * wx(j) * e * e;
        }
        if (j + 1 < nx && j + 1 <= c1 + 1) {
          const double e = (u(i, j + 1) - u(i, j)) / hx;
          total += 0.5 * cf.b2 * hx * wt(i) * e * e;
        }
        if (cf.a12 != 0.0 && i + 1 < nt && j + 1 < nx && i + 1 <= r1 + 1 &&
            j + 1 <= c1 + 1) {
          const double cc =
              (u(i + 1, j + 1) - u(i + 1, j) - u(i, j + 1) + u(i, j)) / (ht * hx);
          total += 0.5 * cf.a12 * ht * hx * cc * cc;
        }
      }
    }
  }
  return total;
}

}  // namespace

ProbeResult minimality_probe(const Field2D& f, std::uint64_t seed, int n_trials) {
  check_field(f);
  if (n_trials < 0) throw InvalidParameter("minimality_probe: n_trials must be >= 0");
  const Index nt = f.nt(), nx = f.nx(), m = f.m();
  const double ht = f.grid.ht(), hx = f.grid.hx();
  const double T = f.grid.t_half_length, L = f.grid.x_half_length;
  const CounterRng rng(seed);

  Field2D work = f;
  ProbeResult result;
  result.min_deficit = std::numeric_limits<double>::infinity();
  result.trials = n_trials;
  if (n_trials == 0) {
    result.min_deficit = 0.0;
    return result;
  }

  const double rho_max = 0.25 * std::min(T, L);
  const double rho_min = std::min(rho_max, 4.0 * std::max(ht, hx));
  for (int trial = 0; trial < n_trials; ++trial) {
    const std::uint64_t base = static_cast<std::uint64_t>(trial) * 8;
    const double rho = rng.uniform(base + 0, rho_min, rho_max);
    const double t0 = rng.uniform(base + 1, -T + rho + 2.0 * ht, T - rho - 2.0 * ht);
    const double x0 = rng.uniform(base + 2, -L + rho + 2.0 * hx, L - rho - 2.0 * hx);
    const double amp = rng.uniform(base + 3, 1e-3, 1e-1);
    PointVec dir(m);
    if (m == 1) {
      dir(0) = rng.uniform(base + 4) < 0.5 ? -1.0 : 1.0;
    } else {
      const double th = rng.uniform(base + 4, 0.0, 2.0 * M_PI);
      dir.setZero();
      dir(0) = std::cos(th);
      dir(1) = std::sin(th);
    }

    const Index is = std::max<Index>(1, static_cast<Index>(std::ceil((t0 - rho + T) / ht)));
    const Index ie =
        std::min<Index>(nt - 2, static_cast<Index>(std::floor((t0 + rho + T) / ht)));
    const Index js = std::max<Index>(1, static_cast<Index>(std::ceil((x0 - rho + L) / hx)));
    const Index je =
        std::min<Index>(nx - 2, static_cast<Index>(std::floor((x0 + rho + L) / hx)));
    if (is > ie || js > je) continue;

    MatX bump(ie - is + 1, je - js + 1);
    for (Index i = is; i <= ie; ++i) {
      const double qt = smoothstep(1.0 - std::abs(f.grid.t(i) - t0) / rho);
      for (Index j = js; j <= je; ++j) {
        const double qx = smoothstep(1.0 - std::abs(f.grid.x(j) - x0) / rho);
        bump(i - is, j - js) = amp * qt * qx;
      }
    }

    const Index r0 = std::max<Index>(0, is - 2), r1 = std::min<Index>(nt - 1, ie + 2);
    const Index c0 = std::max<Index>(0, js - 2), c1 = std::min<Index>(nx - 1, je + 2);
    const double e_before = energy_terms_in_box(work, r0, r1, c0, c1);
    for (Index c = 0; c < m; ++c) {
      work.comps[c].block(is, js, bump.rows(), bump.cols()) += dir(c) * bump;
    }
    const double e_after = energy_terms_in_box(work, r0, r1, c0, c1);
    for (Index c = 0; c < m; ++c) {
      work.comps[c].block(is, js, bump.rows(), bump.cols()) -= dir(c) * bump;
    }

    const double deficit = e_after - e_before;
    if (deficit < result.min_deficit) {
      result.min_deficit = deficit;
      result.scale = std::max(1.0, std::abs(e_before));
      result.worst_trial = trial;
    }
  }
  if (!std::isfinite(result.min_deficit)) result.min_deficit = 0.0;
  return result;
}

double holder_bound_check(const Field2D& f, double j0, int n_slices) {
  check_field(f);
  const Index nt = f.nt(), nx = f.nx(), m = f.m();
  if (n_slices < 2) throw InvalidParameter("holder_bound_check: need >= 2 slices");
  const double hx = f.grid.hx();
  const VecX wx = trapezoid_weights(nx, hx);
  const double mconst = std::sqrt(2.0 * j0 / f.beta);

  std::vector<Index> idx(n_slices);
  for (int s = 0; s < n_slices; ++s) {
    idx[s] = static_cast<Index>(std::llround(static_cast<double>(s) *
                                             static_cast<double>(nt - 1) /
                                             static_cast<double>(n_slices - 1)));
  }
  double worst = 0.0;
  for (int a = 0; a < n_slices; ++a) {
    for (int b = a + 1; b < n_slices; ++b) {
      double d2 = 0.0;
      for (Index c = 0; c < m; ++c) {
        const Eigen::RowVectorXd diff = f.comps[c].row(idx[a]) - f.comps[c].row(idx[b]);
        d2 += diff.array().square().matrix().dot(wx.transpose());
      }
      const double dt = std::abs(f.grid.t(idx[a]) - f.grid.t(idx[b]));
      worst = std::max(worst, std::sqrt(d2) / (mconst * std::sqrt(dt)));
    }
  }
  return worst;
}

double slab_bound_worst_margin(const Field2D& f, double j_min, const Profile1D& e0) {
  check_field(f);
  const Index nt = f.nt(), nx = f.nx();
  const double hx = f.grid.hx();
  const VecX wx = trapezoid_weights(nx, hx);

  auto grad_sq = [&](const Profile1D& p) {
    double s = 0.0;
    for (Index j = 1; j + 1 < nx; ++j) {
      s += wx(j) * ((p.values.row(j + 1) - p.values.row(j - 1)) / (2.0 * hx)).squaredNorm();
    }
    return s;
  };
  const double e0_grad_sq = grad_sq(e0);

  double worst = -std::numeric_limits<double>::infinity();
  for (Index i = 0; i < nt; ++i) {
    const Profile1D s = f.slice(i);
    const double lhs = grad_sq(s);
    const double weff = action_1d(s) - j_min;
    const double rhs = 4.0 * (weff + j_min) / f.beta + 2.0 * e0_grad_sq;
    worst = std::max(worst, lhs - rhs);
  }
  return worst;
}

}  // namespace efk
