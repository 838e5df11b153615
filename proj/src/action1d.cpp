#include "efk/action1d.hpp"

#include <algorithm>
#include <cmath>

#include "efk/errors.hpp"

namespace efk {

namespace {

// Central second differences with even ghost reflection at both ends.
MatX second_differences(const MatX& u, double h) {
  const Index n = u.rows();
  MatX d2(n, u.cols());
  const double ih2 = 1.0 / (h * h);
  d2.row(0) = 2.0 * ih2 * (u.row(1) - u.row(0));
  d2.middleRows(1, n - 2) =
      ih2 * (u.topRows(n - 2) - 2.0 * u.middleRows(1, n - 2) + u.bottomRows(n - 2));
  d2.row(n - 1) = 2.0 * ih2 * (u.row(n - 2) - u.row(n - 1));
  return d2;
}

inline double node_weight(Index i, Index n, double h) {
  return (i == 0 || i == n - 1) ? 0.5 * h : h;
}

void check_profile(const Profile1D& p) {
  if (!p.potential) throw InvalidParameter("profile has no potential");
  if (p.values.rows() != p.grid.n || p.values.cols() != p.potential->dim()) {
    throw InvalidParameter("profile shape does not match grid/potential");
  }
}

}  // namespace

double action_1d(const Profile1D& p) {
  check_profile(p);
  const Index n = p.n();
  const double h = p.grid.spacing();
  const MatX d2 = second_differences(p.values, h);

  double total = 0.0;
  PointVec u(p.m());
  for (Index i = 0; i < n; ++i) {
    u = p.values.row(i).transpose();
    total += node_weight(i, n, h) * (0.5 * d2.row(i).squaredNorm() + p.potential->value(u));
  }
  const double coef = 0.5 * p.beta / h;
  for (Index c = 0; c + 1 < n; ++c) {
    total += coef * (p.values.row(c + 1) - p.values.row(c)).squaredNorm();
  }
  return total;
}

MatX action_gradient_1d(const Profile1D& p) {
  check_profile(p);
  const Index n = p.n();
  const Index m = p.m();
  const double h = p.grid.spacing();
  const double ih2 = 1.0 / (h * h);
  const MatX d2 = second_differences(p.values, h);

  // q_i = w_i * D2 u_i; the curvature gradient is the adjoint stencil of D2
  // applied to q, with the ghost chain folding the end rows onto rows 1, n-2.
  MatX q(n, m);
  for (Index i = 0; i < n; ++i) q.row(i) = node_weight(i, n, h) * d2.row(i);

  MatX grad = MatX::Zero(n, m);
  for (Index j = 1; j + 1 < n; ++j) {
    grad.row(j) = ih2 * (q.row(j - 1) - 2.0 * q.row(j) + q.row(j + 1));
  }
  grad.row(1) += ih2 * q.row(0);      // ghost at the left end: d2_0 depends on u_1 twice
  grad.row(n - 2) += ih2 * q.row(n - 1);

  PointVec u(m), g(m);
  for (Index j = 1; j + 1 < n; ++j) {
    u = p.values.row(j).transpose();
    p.potential->gradient(u, g);
    grad.row(j) += h * g.transpose();
    grad.row(j) -=
        (p.beta / h) * (p.values.row(j + 1) - 2.0 * p.values.row(j) + p.values.row(j - 1));
  }
  return grad;
}

double residual_ode(const Profile1D& p) {
  check_profile(p);
  const Index n = p.n();
  if (n < 9) throw InvalidParameter("residual_ode: needs n >= 9");
  const double h = p.grid.spacing();
  const double ih2 = 1.0 / (h * h);
  const double ih4 = ih2 * ih2;
  const MatX& u = p.values;

  double worst = 0.0;
  PointVec ui(p.m()), g(p.m());
  for (Index i = 2; i + 2 < n; ++i) {
    ui = u.row(i).transpose();
    p.potential->gradient(ui, g);
    const auto d4 = ih4 * (u.row(i - 2) - 4.0 * u.row(i - 1) + 6.0 * u.row(i) -
                           4.0 * u.row(i + 1) + u.row(i + 2));
    const auto d2 = ih2 * (u.row(i - 1) - 2.0 * u.row(i) + u.row(i + 1));
    worst = std::max(worst, (d4 - p.beta * d2 + g.transpose()).norm());
  }
  return worst;
}

Profile1D make_profile(const Grid1D& grid, PotentialPtr pot, double beta) {
  Profile1D p;
  p.grid = grid;
  p.potential = std::move(pot);
  p.beta = beta;
  p.values = MatX::Zero(grid.n, p.potential->dim());
  return p;
}

Profile1D build_e0(PotentialPtr pot, const Grid1D& grid, double beta) {
  if (grid.half_length < 1.0) {
    throw InvalidParameter("build_e0: grid half-length must be >= 1");
  }
  Profile1D p = make_profile(grid, std::move(pot), beta);
  const PointVec& am = p.potential->well_minus();
  const PointVec& ap = p.potential->well_plus();
  const PointVec mid = 0.5 * (ap + am);
  const PointVec dif = ap - am;
  for (Index i = 0; i < grid.n; ++i) {
    const double x = grid.x(i);
    if (x <= -1.0) {
      p.values.row(i) = am.transpose();
    } else if (x >= 1.0) {
      p.values.row(i) = ap.transpose();
    } else {
      p.values.row(i) = (mid + 0.25 * (3.0 * x - x * x * x) * dif).transpose();
    }
  }
  return p;
}

Profile1D shift_profile(const Profile1D& p, Index shift) {
  Profile1D out = p;
  const Index n = p.n();
  for (Index j = 0; j < n; ++j) {
    const Index src = j - shift;
    if (src < 0) {
      out.values.row(j) = p.potential->well_minus().transpose();
    } else if (src >= n) {
      out.values.row(j) = p.potential->well_plus().transpose();
    } else {
      out.values.row(j) = p.values.row(src);
    }
  }
  return out;
}

namespace {

// Weighted squared distance between p shifted by s nodes and q.
double shifted_sq_distance(const Profile1D& p, const Profile1D& q, Index s) {
  const Index n = p.n();
  const double h = p.grid.spacing();
  const auto& am = p.potential->well_minus();
  const auto& ap = p.potential->well_plus();

  double sum = 0.0;
  // Overlap block [max(0,s), min(n, n+s)) maps q-row j to p-row j-s.
  const Index j0 = std::max<Index>(0, s);
  const Index j1 = std::min<Index>(n, n + s);
  if (j1 > j0) {
    sum += (p.values.middleRows(j0 - s, j1 - j0) - q.values.middleRows(j0, j1 - j0))
               .squaredNorm();
  }
  for (Index j = 0; j < j0; ++j) {
    sum += (am.transpose() - q.values.row(j)).squaredNorm();
  }
  for (Index j = j1; j < n; ++j) {
    sum += (ap.transpose() - q.values.row(j)).squaredNorm();
  }
  sum *= h;
  // Trapezoid half-weights at the two end nodes.
  auto p_at = [&](Index src) -> MatX {
    if (src < 0) return am.transpose();
    if (src >= n) return ap.transpose();
    return p.values.row(src);
  };
  sum -= 0.5 * h * (p_at(-s) - q.values.row(0)).squaredNorm();
  sum -= 0.5 * h * (p_at(n - 1 - s) - q.values.row(n - 1)).squaredNorm();
  return std::max(sum, 0.0);
}

}  // namespace

ShiftScan scan_translation(const Profile1D& p, const Profile1D& q) {
  if (!(p.grid == q.grid)) throw InvalidParameter("scan_translation: mismatched grids");
  const Index n = p.n();
  const Index smax = n / 2;
  double best = std::numeric_limits<double>::infinity();
  Index best_s = 0;
  for (Index s = -smax; s <= smax; ++s) {
    const double d2 = shifted_sq_distance(p, q, s);
    if (d2 < best) {
      best = d2;
      best_s = s;
    }
  }
  // The valley can be flat down to rounding (the distance is dominated by
  // translation-invariant terms); prefer the smallest shift among ties.
  const double tie = best + 1e-9 * best + 1e-14;
  for (Index s = -smax; s <= smax; ++s) {
    if (std::abs(s) < std::abs(best_s) && shifted_sq_distance(p, q, s) <= tie) {
      best_s = s;
    }
  }
  best = shifted_sq_distance(p, q, best_s);
  const double h = p.grid.spacing();
  ShiftScan scan;
  scan.best_shift = best_s;
  scan.d_best = std::sqrt(best);

  // Parabolic refinement of d^2(s) about the best integer shift.
  const double dm = shifted_sq_distance(p, q, best_s - 1);
  const double dp = shifted_sq_distance(p, q, best_s + 1);
  const double denom = dm - 2.0 * best + dp;
  double delta = 0.0;
  double refined = best;
  if (denom > 0.0) {
    delta = 0.5 * (dm - dp) / denom;
    delta = std::clamp(delta, -0.5, 0.5);
    refined = best - 0.25 * (dm - dp) * delta;
  }
  scan.t_refined = (static_cast<double>(best_s) + delta) * h;
  scan.d_refined = std::sqrt(std::max(refined, 0.0));
  return scan;
}

std::pair<Profile1D, double> normalize_translation(const Profile1D& p,
                                                   const Profile1D& reference) {
  // T reports the displacement of p relative to the reference (p ~ ref^T);
  // the applied node shift undoes it.
  const ShiftScan scan = scan_translation(p, reference);
  return {shift_profile(p, scan.best_shift), -scan.t_refined};
}

std::pair<double, bool> linearized_decay_rate(const Potential& pot, double beta) {
  const double lambda = pot.well_hessian_min_eig();
  if (!(lambda > 0.0)) {
    throw InvalidParameter("linearized_decay_rate: well Hessian not positive");
  }
  const double disc = beta * beta - 4.0 * lambda;
  if (disc >= 0.0) {
    return {std::sqrt(0.5 * (beta - std::sqrt(disc))), false};
  }
  // Complex roots mu^2 = (beta +- i sqrt(-disc))/2: |mu| = lambda^{1/4}.
  const double arg = std::atan2(std::sqrt(-disc), beta);
  return {std::pow(lambda, 0.25) * std::cos(0.5 * arg), true};
}

namespace {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

LineFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double denom = n * sxx - sx * sx;
  LineFit f;
  f.slope = (n * sxy - sx * sy) / denom;
  f.intercept = (sy - f.slope * sx) / n;
  return f;
}

struct SideFit {
  double k = 0.0;
  double K = 0.0;
  bool ok = false;
};

// Fit one tail. `sgn` = +1 for the right tail, -1 for the left (mirrored).
SideFit fit_tail(const Profile1D& p, int sgn, bool oscillatory, double amp_lo,
                 double amp_hi) {
  const Index n = p.n();
  const double h = p.grid.spacing();
  const double L = p.grid.half_length;
  const PointVec well = sgn > 0 ? p.potential->well_plus() : p.potential->well_minus();

  // Amplitudes indexed by distance from the center, walking toward the well.
  std::vector<double> amp(n), xs(n);
  for (Index t = 0; t < n; ++t) {
    const Index i = sgn > 0 ? t : n - 1 - t;
    amp[t] = (p.values.row(i) - well.transpose()).norm();
    xs[t] = sgn > 0 ? p.grid.x(i) : -p.grid.x(i);
  }

  // One-unit buffer next to the clamped end: the clamp contaminates the tail.
  Index t_max = n - 1;
  while (t_max > 0 && xs[t_max] > L - 1.0) --t_max;

  std::vector<double> fx, fy;
  if (!oscillatory) {
    for (Index t = 0; t <= t_max; ++t) {
      if (xs[t] > 0.0 && amp[t] >= amp_lo && amp[t] <= amp_hi) {
        fx.push_back(xs[t]);
        fy.push_back(std::log(amp[t]));
      }
    }
    if (fx.size() < 5) return {};
    const LineFit f = fit_line(fx, fy);
    if (!(f.slope < 0.0)) return {};
    SideFit out;
    out.k = -f.slope;
    out.K = std::exp(f.intercept);
    for (size_t i = 0; i < fx.size(); ++i) {
      out.K = std::max(out.K, std::exp(fy[i] + out.k * fx[i]));
    }
    out.ok = true;
    return out;
  }

  // Oscillatory tails: |u - a| has near-zeros, so fit the suffix energy
  // integral I(x) = int_x^{end} |u - a|^2, whose log decays at slope -2k.
  std::vector<double> suffix(t_max + 2, 0.0);
  for (Index t = t_max; t >= 0; --t) {
    suffix[t] = suffix[t + 1] + h * amp[t] * amp[t];
    if (t == 0) break;
  }
  // Window selected by the running envelope of the amplitude.
  double env = 0.0;
  std::vector<double> envelope(t_max + 1, 0.0);
  for (Index t = t_max; t >= 0; --t) {
    env = std::max(env, amp[t]);
    envelope[t] = env;
    if (t == 0) break;
  }
  for (Index t = 0; t <= t_max; ++t) {
    if (xs[t] > 0.0 && envelope[t] <= amp_hi && envelope[t] >= amp_lo && suffix[t] > 0.0) {
      fx.push_back(xs[t]);
      fy.push_back(std::log(suffix[t]));
    }
  }
  if (fx.size() < 5) return {};
  const LineFit f = fit_line(fx, fy);
  if (!(f.slope < 0.0)) return {};
  SideFit out;
  out.k = -0.5 * f.slope;
  out.K = 0.0;
  for (Index t = 0; t <= t_max; ++t) {
    if (xs[t] > 0.0 && envelope[t] <= amp_hi) {
      out.K = std::max(out.K, amp[t] * std::exp(out.k * xs[t]));
    }
  }
  if (out.K == 0.0) out.K = std::exp(0.5 * f.intercept);
  out.ok = true;
  return out;
}

}  // namespace

std::optional<DecayFit> try_fit_decay_rate(const Profile1D& p, double amp_lo,
                                           double amp_hi) {
  check_profile(p);
  const auto [k_lin, oscillatory] = linearized_decay_rate(*p.potential, p.beta);
  const SideFit right = fit_tail(p, +1, oscillatory, amp_lo, amp_hi);
  const SideFit left = fit_tail(p, -1, oscillatory, amp_lo, amp_hi);
  if (!right.ok && !left.ok) return std::nullopt;

  DecayFit fit;
  fit.k_lin = k_lin;
  fit.oscillatory = oscillatory;
  fit.resolved = right.ok && left.ok;
  if (right.ok && left.ok) {
    fit.k = std::min(right.k, left.k);
    fit.K = std::max(right.K, left.K);
  } else {
    const SideFit& s = right.ok ? right : left;
    fit.k = s.k;
    fit.K = s.K;
  }
  return fit;
}

DecayFit fit_decay_rate(const Profile1D& p, double amp_lo, double amp_hi) {
  auto fit = try_fit_decay_rate(p, amp_lo, amp_hi);
  if (!fit) {
    throw InvalidParameter("fit_decay_rate: domain too short, tail windows are empty");
  }
  return *fit;
}

double transition_cost_bound(const Potential& pot, double beta) {
  const double r = pot.well_radius();
  return std::sqrt(beta * pot.convexity()) * 0.25 * r * r;
}

double action_over_range(const Profile1D& p, Index i0, Index i1) {
  check_profile(p);
  const Index n = p.n();
  if (i0 < 0 || i1 >= n || i0 >= i1) {
    throw InvalidParameter("action_over_range: bad index range");
  }
  const double h = p.grid.spacing();
  const MatX d2 = second_differences(p.values, h);
  double sum = 0.0;
  PointVec u(p.m());
  for (Index i = i0; i <= i1; ++i) {
    u = p.values.row(i).transpose();
    const double w = (i == i0 || i == i1) ? 0.5 * h : h;
    sum += w * (0.5 * d2.row(i).squaredNorm() + p.potential->value(u));
  }
  const double coef = 0.5 * p.beta / h;
  for (Index c = i0; c < i1; ++c) {
    sum += coef * (p.values.row(c + 1) - p.values.row(c)).squaredNorm();
  }
  return sum;
}

std::optional<double> min_transition_segment_action(const Profile1D& p, double eps0) {
  check_profile(p);
  const Index n = p.n();
  const double r = p.potential->well_radius();
  auto segment_action = [&](Index i0, Index i1) { return action_over_range(p, i0, i1); };

  std::optional<double> best;
  for (const PointVec* well : {&p.potential->well_minus(), &p.potential->well_plus()}) {
    VecX amp(n);
    for (Index i = 0; i < n; ++i) {
      amp(i) = (p.values.row(i) - well->transpose()).norm();
    }
    // Transitions in both directions: deep node (amp <= eps0) to the nearest
    // node at or beyond the ball radius with no deep node in between.
    for (int dir : {+1, -1}) {
      Index last_deep = -1;
      const Index begin = dir > 0 ? 0 : n - 1;
      for (Index c = 0; c < n; ++c) {
        const Index i = begin + dir * c;
        if (amp(i) <= eps0) {
          last_deep = i;
        } else if (amp(i) >= r && last_deep >= 0) {
          const Index lo = std::min(last_deep, i);
          const Index hi = std::max(last_deep, i);
          const double a = segment_action(lo, hi);
          if (!best || a < *best) best = a;
          last_deep = -1;
        }
      }
    }
  }
  return best;
}

TailExtension build_tail_extension(const PointVec& v_end, const PointVec& v_prime_end,
                                   int side, const Potential& pot, double beta,
                                   double eps0, double spacing) {
  if (!(eps0 > 0.0) || eps0 >= 0.5 * pot.well_radius()) {
    throw InvalidParameter("build_tail_extension: requires 0 < eps0 < r/2");
  }
  const PointVec well = side < 0 ? pot.well_minus() : pot.well_plus();
  if ((v_end - well).norm() > eps0 / 8.0 + 1e-15) {
    throw InvalidParameter("build_tail_extension: |v - a| exceeds eps0/8 at the junction");
  }
  if (v_prime_end.norm() > eps0 / 4.0 + 1e-15) {
    throw InvalidParameter("build_tail_extension: |v'| exceeds eps0/4 at the junction");
  }
  if (!(spacing > 0.0) || spacing > 0.25) {
    throw InvalidParameter("build_tail_extension: spacing must lie in (0, 0.25]");
  }

  // Segment parametrized by s in [0,2] walking away from the junction toward
  // the well; side only flips the sign convention of the slope.
  const double sgn = side < 0 ? -1.0 : 1.0;
  const PointVec v1 = sgn * v_prime_end;  // d z / d s at s = 0
  const PointVec phi = v_end + 0.5 * v1;  // value reached at s = 1
  const Index nseg = static_cast<Index>(std::lround(2.0 / spacing)) + 1;
  const double hs = 2.0 / static_cast<double>(nseg - 1);

  TailExtension ext;
  ext.values.resize(nseg, pot.dim());
  ext.xs.resize(nseg);
  double action = 0.0;
  PointVec z(pot.dim()), zp(pot.dim()), zpp(pot.dim());
  for (Index i = 0; i < nseg; ++i) {
    const double s = hs * static_cast<double>(i);
    if (s <= 1.0) {
      z = v_end + (s - 0.5 * s * s) * v1;
      zp = (1.0 - s) * v1;
      zpp = -v1;
    } else {
      const double q = s - 1.0;
      const double blend = 2.0 * q * q - q * q * q * q;
      z = phi + blend * (well - phi);
      zp = (4.0 * q - 4.0 * q * q * q) * (well - phi);
      zpp = (4.0 - 12.0 * q * q) * (well - phi);
    }
    ext.xs(i) = sgn * s;
    ext.values.row(i) = z.transpose();
    ext.max_deviation = std::max(ext.max_deviation, (z - well).norm());
    ext.max_slope = std::max(ext.max_slope, zp.norm());
    ext.max_curvature = std::max(ext.max_curvature, zpp.norm());
    const double w = (i == 0 || i == nseg - 1) ? 0.5 * hs : hs;
    action += w * (0.5 * zpp.squaredNorm() + 0.5 * beta * zp.squaredNorm() + pot.value(z));
  }
  ext.segment_action = action;
  ext.action_bound = (4.0 + beta + pot.upper_constant()) * eps0 * eps0;
  return ext;
}

}  // namespace efk
