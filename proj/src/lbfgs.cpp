#include "efk/lbfgs.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace efk {

namespace {

struct Pair {
  VecX s;
  VecX y;
  double rho;
};

// Cubic minimizer of an interval with values/derivatives at both ends
// (Nocedal & Wright eq. 3.59). Falls back to bisection when degenerate.
double cubic_min(double a, double fa, double da, double b, double fb, double db) {
  const double d1 = da + db - 3.0 * (fa - fb) / (a - b);
  const double disc = d1 * d1 - da * db;
  if (disc < 0.0) return 0.5 * (a + b);
  const double d2 = std::copysign(std::sqrt(disc), b - a);
  double t = b - (b - a) * (db + d2 - d1) / (db - da + 2.0 * d2);
  if (!std::isfinite(t)) return 0.5 * (a + b);
  const double lo = std::min(a, b), hi = std::max(a, b);
  const double margin = 0.1 * (hi - lo);
  return std::clamp(t, lo + margin, hi - margin);
}

}  // namespace

LbfgsResult lbfgs_minimize(const ValueGrad& fg, VecX x0, const LbfgsOptions& opts,
                           const Precond* h0) {
  LbfgsResult res;
  res.x = std::move(x0);
  const Index n = res.x.size();

  VecX g(n), g_new(n), x_new(n), d(n), q(n);
  double f = fg(res.x, g);
  res.f = f;
  res.grad_inf_norm = g.lpNorm<Eigen::Infinity>();
  res.energy_history.push_back(f);
  if (res.grad_inf_norm <= std::max(opts.grad_tol, opts.stall_tol)) {
    res.converged = true;
    return res;
  }

  std::deque<Pair> pairs;
  double gamma = 1.0;
  int restarts = 0;

  auto apply_h0 = [&](VecX& v) {
    if (h0) {
      (*h0)(v);
    } else {
      v *= gamma;
    }
  };

  for (int iter = 1; iter <= opts.max_iters; ++iter) {
    // Two-loop recursion.
    q = g;
    std::vector<double> alpha(pairs.size());
    for (Index i = static_cast<Index>(pairs.size()) - 1; i >= 0; --i) {
      alpha[i] = pairs[i].rho * pairs[i].s.dot(q);
      q -= alpha[i] * pairs[i].y;
    }
    apply_h0(q);
    for (size_t i = 0; i < pairs.size(); ++i) {
      const double beta = pairs[i].rho * pairs[i].y.dot(q);
      q += (alpha[i] - beta) * pairs[i].s;
    }
    d = -q;

    double dg = d.dot(g);
    if (!(dg < 0.0)) {
      // Not a descent direction: drop memory and fall back to -H0 g.
      pairs.clear();
      d = g;
      apply_h0(d);
      d = -d;
      dg = d.dot(g);
      if (!(dg < 0.0)) {
        d = -g;
        dg = -g.squaredNorm();
      }
    }

    // Strong Wolfe line search (bracket + zoom). Armijo comparisons carry a
    // rounding allowance so progress does not stall once energy differences
    // drop below double precision while the analytic gradient is still large.
    const double f0 = f;
    const double dg0 = dg;
    const double f_noise = 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(f0));
    double a_prev = 0.0, f_prev = f0, dg_prev = dg0;
    double a = 1.0;
    double a_lo = 0.0, f_lo = f0, dg_lo = dg0;
    double a_hi = 0.0, f_hi = 0.0, dg_hi = 0.0;
    bool bracketed = false;
    bool ls_ok = false;
    double f_trial = f0, dg_trial = dg0;
    const int max_expand = 30;

    for (int ls = 0; ls < max_expand; ++ls) {
      x_new = res.x + a * d;
      f_trial = fg(x_new, g_new);
      dg_trial = d.dot(g_new);
      if (!std::isfinite(f_trial)) {
        a_hi = a;
        f_hi = f_trial;
        dg_hi = dg_trial;
        a = 0.5 * (a_prev + a);
        continue;
      }
      if (f_trial > f0 + opts.wolfe_c1 * a * dg0 + f_noise ||
          (ls > 0 && f_trial >= f_prev + f_noise)) {
        a_lo = a_prev;
        f_lo = f_prev;
        dg_lo = dg_prev;
        a_hi = a;
        f_hi = f_trial;
        dg_hi = dg_trial;
        bracketed = true;
        break;
      }
      if (std::abs(dg_trial) <= -opts.wolfe_c2 * dg0) {
        ls_ok = true;
        break;
      }
      if (dg_trial >= 0.0) {
        a_lo = a;
        f_lo = f_trial;
        dg_lo = dg_trial;
        a_hi = a_prev;
        f_hi = f_prev;
        dg_hi = dg_prev;
        bracketed = true;
        break;
      }
      a_prev = a;
      f_prev = f_trial;
      dg_prev = dg_trial;
      a *= 2.0;
    }

    if (bracketed) {
      for (int z = 0; z < 40 && !ls_ok; ++z) {
        a = std::isfinite(f_hi) ? cubic_min(a_lo, f_lo, dg_lo, a_hi, f_hi, dg_hi)
                                : 0.5 * (a_lo + a_hi);
        if (std::abs(a_hi - a_lo) < 1e-16 * std::max(1.0, std::abs(a_lo))) break;
        x_new = res.x + a * d;
        f_trial = fg(x_new, g_new);
        dg_trial = d.dot(g_new);
        if (!std::isfinite(f_trial) || f_trial > f0 + opts.wolfe_c1 * a * dg0 + f_noise ||
            f_trial >= f_lo + f_noise) {
          a_hi = a;
          f_hi = f_trial;
          dg_hi = dg_trial;
        } else {
          if (std::abs(dg_trial) <= -opts.wolfe_c2 * dg0) {
            ls_ok = true;
            break;
          }
          if (dg_trial * (a_hi - a_lo) >= 0.0) {
            a_hi = a_lo;
            f_hi = f_lo;
            dg_hi = dg_lo;
          }
          a_lo = a;
          f_lo = f_trial;
          dg_lo = dg_trial;
        }
      }
      if (!ls_ok && std::isfinite(f_lo) && f_lo < f0 + f_noise && a_lo > 0.0) {
        // Accept the best sufficient-decrease point even without curvature.
        a = a_lo;
        x_new = res.x + a * d;
        f_trial = fg(x_new, g_new);
        dg_trial = d.dot(g_new);
        ls_ok = f_trial < f0 + f_noise;
      }
    }

    if (!ls_ok) {
      if (!pairs.empty() && restarts < opts.max_restarts) {
        pairs.clear();
        gamma = 1.0;
        ++restarts;
        continue;
      }
      // No further progress representable; report what we have.
      res.iterations = iter - 1;
      res.grad_inf_norm = g.lpNorm<Eigen::Infinity>();
      res.converged =
          res.grad_inf_norm <= std::max(opts.grad_tol, opts.stall_tol);
      return res;
    }

    // Accepted step.
    VecX s = x_new - res.x;
    VecX y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      gamma = sy / y.squaredNorm();
      pairs.push_back({std::move(s), std::move(y), 1.0 / sy});
      if (static_cast<int>(pairs.size()) > opts.memory) pairs.pop_front();
    }

    const double rel_dec = (f - f_trial) / std::max(1.0, std::abs(f_trial));
    res.x.swap(x_new);
    g.swap(g_new);
    f = f_trial;
    res.f = f;
    res.iterations = iter;
    res.energy_history.push_back(f);
    res.grad_inf_norm = g.lpNorm<Eigen::Infinity>();

    if (res.grad_inf_norm <= opts.grad_tol && rel_dec <= opts.energy_tol) {
      res.converged = true;
      return res;
    }
  }
  res.converged = res.grad_inf_norm <= opts.grad_tol;
  return res;
}

}  // namespace efk
