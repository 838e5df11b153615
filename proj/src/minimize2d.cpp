#include "efk/minimize2d.hpp"

#include <cmath>
#include <memory>
#include <vector>

#include "efk/errors.hpp"
#include "efk/lbfgs.hpp"
#include "efk/precond.hpp"

namespace efk {

namespace {
thread_local std::vector<double> g_last_history;
}

const std::vector<double>& last_double_layer_energy_history() { return g_last_history; }

Profile1D restrict_profile(const Profile1D& fine, Index stride) {
  if ((fine.grid.n - 1) % stride != 0) {
    throw InvalidParameter("restrict_profile: stride does not divide the grid");
  }
  Profile1D coarse = fine;
  coarse.grid = Grid1D::make(fine.grid.half_length, (fine.grid.n - 1) / stride + 1);
  coarse.values.resize(coarse.grid.n, fine.m());
  for (Index i = 0; i < coarse.grid.n; ++i) {
    coarse.values.row(i) = fine.values.row(i * stride);
  }
  return coarse;
}

Field2D prolong_field(const Field2D& coarse, const Grid2D& fine_grid) {
  const Index ntc = coarse.nt(), nxc = coarse.nx();
  if (fine_grid.nt != 2 * ntc - 1 || fine_grid.nx != 2 * nxc - 1) {
    throw InvalidParameter("prolong_field: fine grid is not a 2x refinement");
  }
  Field2D fine = make_field(fine_grid, coarse.potential, coarse.beta, coarse.variant);
  fine.coeffs = coarse.coeffs;
  for (Index c = 0; c < coarse.m(); ++c) {
    const MatX& uc = coarse.comps[c];
    MatX& uf = fine.comps[c];
    for (Index i = 0; i < ntc; ++i) {
      for (Index j = 0; j < nxc; ++j) {
        uf(2 * i, 2 * j) = uc(i, j);
      }
    }
    for (Index i = 0; i + 1 < ntc; ++i) {
      for (Index j = 0; j < nxc; ++j) {
        uf(2 * i + 1, 2 * j) = 0.5 * (uc(i, j) + uc(i + 1, j));
      }
    }
    for (Index i = 0; i < fine_grid.nt; ++i) {
      for (Index j = 0; j + 1 < nxc; ++j) {
        uf(i, 2 * j + 1) = 0.5 * (uf(i, 2 * j) + uf(i, 2 * j + 2));
      }
    }
  }
  return fine;
}

namespace {

void apply_clamps(Field2D& f, const Profile1D& e_minus, const Profile1D& e_plus) {
  const Index nt = f.nt(), nx = f.nx();
  for (Index c = 0; c < f.m(); ++c) {
    f.comps[c].row(0) = e_minus.values.col(c).transpose();
    f.comps[c].row(nt - 1) = e_plus.values.col(c).transpose();
    f.comps[c].col(0).setConstant(f.potential->well_minus()(c));
    f.comps[c].col(nx - 1).setConstant(f.potential->well_plus()(c));
  }
}

VecX flatten(const Field2D& f) {
  const Index plane = f.nt() * f.nx();
  VecX x(plane * f.m());
  for (Index c = 0; c < f.m(); ++c) {
    Eigen::Map<MatX>(x.data() + c * plane, f.nt(), f.nx()) = f.comps[c];
  }
  return x;
}

void unflatten(const VecX& x, Field2D& f) {
  const Index plane = f.nt() * f.nx();
  for (Index c = 0; c < f.m(); ++c) {
    f.comps[c] = Eigen::Map<const MatX>(x.data() + c * plane, f.nt(), f.nx());
  }
}

struct LevelSolve {
  int iterations = 0;
  bool converged = false;
  double energy = 0.0;
};

LevelSolve solve_level(Field2D& f, const SolverOptions& opts, double grad_tol_rel) {
  const Index nt = f.nt(), nx = f.nx(), m = f.m();
  const double ht = f.grid.ht(), hx = f.grid.hx();

  Field2D work = f;
  auto fg = [&work, nt, nx, m](const VecX& x, VecX& g) -> double {
    unflatten(x, work);
    const double e = energy_2d(work);
    const std::vector<MatX> grads = energy_gradient_2d(work);
    const Index plane = nt * nx;
    g.resize(plane * m);
    for (Index c = 0; c < m; ++c) {
      Eigen::Map<MatX>(g.data() + c * plane, nt, nx) = grads[c];
    }
    return e;
  };

  LbfgsOptions lopts;
  lopts.memory = opts.memory;
  lopts.energy_tol = opts.energy_tol;
  lopts.max_iters = opts.max_iters;

  VecX x0 = flatten(f);
  VecX g0(x0.size());
  const double f0 = fg(x0, g0);
  const double eps_mach = std::numeric_limits<double>::epsilon();
  const double u_scale = std::max(1.0, x0.cwiseAbs().maxCoeff());
  const OperatorCoeffs& cf = f.coeffs;
  const double stencil = cf.a11 / std::pow(ht, 4) + cf.a22 / std::pow(hx, 4) +
                         std::abs(cf.a12) / (ht * ht * hx * hx);
  const double noise_floor = 128.0 * eps_mach * u_scale * ht * hx * stencil;
  lopts.grad_tol = std::max(grad_tol_rel * std::max(1.0, g0.lpNorm<Eigen::Infinity>()),
                            noise_floor);
  const double lambda_max =
      ht * hx * (16.0 * stencil + cf.b1 * 4.0 / (ht * ht) + cf.b2 * 4.0 / (hx * hx));
  lopts.stall_tol = std::sqrt(eps_mach * (1.0 + std::abs(f0)) * lambda_max);

  const double lambda = std::max(1e-8, f.potential->well_hessian_min_eig());
  ReferenceSolver2D ref(f.grid, cf.a11, cf.a12, cf.a22, cf.b1, cf.b2, lambda);
  Precond precond = [&ref, nt, nx, m](VecX& v) { ref.apply(v, nt, nx, m); };
  const Precond* precond_ptr = opts.use_preconditioner ? &precond : nullptr;

  LbfgsResult lr = lbfgs_minimize(fg, std::move(x0), lopts, precond_ptr);
  g_last_history = lr.energy_history;
  unflatten(lr.x, f);

  LevelSolve out;
  out.iterations = lr.iterations;
  out.converged = lr.converged;
  out.energy = lr.f;
  return out;
}

}  // namespace

DoubleLayerResult minimize_double_layer(PotentialPtr pot, double beta,
                                        const Profile1D& e_minus, const Profile1D& e_plus,
                                        const Grid2D& grid, OperatorVariant variant,
                                        const DoubleLayerOptions& opts,
                                        const Field2D* init) {
  if (!pot) throw InvalidParameter("minimize_double_layer: null potential");
  if (!(e_minus.grid == e_plus.grid) || e_minus.grid.n != grid.nx) {
    throw InvalidParameter("minimize_double_layer: e grids must match the field x grid");
  }

  DoubleLayerResult result;
  int total_iters = 0;

  Field2D f = make_field(grid, pot, beta, variant);
  if (init) {
    if (!(init->grid == grid)) {
      throw InvalidParameter("minimize_double_layer: init grid mismatch");
    }
    f.comps = init->comps;
    apply_clamps(f, e_minus, e_plus);
  } else if (opts.continuation) {
    // Nested levels: halve both directions while the coarse grid stays usable.
    std::vector<Index> strides;
    Index stride = 1;
    while ((grid.nt - 1) % (2 * stride) == 0 && (grid.nx - 1) % (2 * stride) == 0 &&
           (grid.nt - 1) / (2 * stride) + 1 >= opts.min_coarse_nodes &&
           (grid.nx - 1) / (2 * stride) + 1 >= opts.min_coarse_nodes) {
      stride *= 2;
    }
    for (Index s = stride; s >= 1; s /= 2) strides.push_back(s);

    Field2D level_field = make_field(grid, pot, beta, variant);
    bool have_field = false;
    for (size_t li = 0; li < strides.size(); ++li) {
      const Index s = strides[li];
      const Grid2D gl = Grid2D::make(grid.t_half_length, grid.x_half_length,
                                     (grid.nt - 1) / s + 1, (grid.nx - 1) / s + 1);
      const Profile1D em = s == 1 ? e_minus : restrict_profile(e_minus, s);
      const Profile1D ep = s == 1 ? e_plus : restrict_profile(e_plus, s);
      Field2D fl = have_field ? prolong_field(level_field, gl)
                              : build_V0(em, ep, gl, variant);
      apply_clamps(fl, em, ep);
      SolverOptions lo = opts.solver;
      const bool final_level = s == 1;
      const double rel = final_level ? opts.solver.grad_tol_rel
                                     : std::max(opts.solver.grad_tol_rel, 1e-6);
      const LevelSolve ls = solve_level(fl, lo, rel);
      total_iters += ls.iterations;
      if (final_level) {
        f = fl;
        result.iterations = ls.iterations;
        result.converged = ls.converged;
        result.energy = ls.energy;
      } else {
        level_field = std::move(fl);
        have_field = true;
      }
    }
    result.total_iterations = total_iters;
    result.field = std::move(f);
    if (!result.converged) {
      auto last = std::make_shared<Field2D>(result.field);
      throw SolverFailure("minimize_double_layer: no convergence on the fine grid", last);
    }
    return result;
  } else {
    f = build_V0(e_minus, e_plus, grid, variant);
    apply_clamps(f, e_minus, e_plus);
  }

  const LevelSolve ls = solve_level(f, opts.solver, opts.solver.grad_tol_rel);
  result.iterations = ls.iterations;
  result.total_iterations = total_iters + ls.iterations;
  result.converged = ls.converged;
  result.energy = ls.energy;
  result.field = std::move(f);
  if (!result.converged) {
    auto last = std::make_shared<Field2D>(result.field);
    throw SolverFailure("minimize_double_layer: no convergence", last);
  }
  return result;
}

}  // namespace efk
