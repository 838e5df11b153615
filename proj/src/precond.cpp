#include "efk/precond.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <vector>

#include "efk/errors.hpp"

namespace efk {

Eigen::SparseMatrix<double> clamped_curvature_form(Index n, double h) {
  // B: second differences at every node (ghost reflection at the clamped
  // ends) as a function of the free nodes 1..n-2; K = B^T diag(w) B.
  const Index nf = n - 2;
  const double ih2 = 1.0 / (h * h);
  std::vector<Eigen::Triplet<double>> trips;
  Eigen::SparseMatrix<double> b(n, nf);
  trips.emplace_back(0, 0, 2.0 * ih2);
  for (Index i = 1; i <= n - 2; ++i) {
    for (Index k : {i - 1, i, i + 1}) {
      if (k < 1 || k > n - 2) continue;
      trips.emplace_back(i, k - 1, k == i ? -2.0 * ih2 : ih2);
    }
  }
  trips.emplace_back(n - 1, nf - 1, 2.0 * ih2);
  b.setFromTriplets(trips.begin(), trips.end());

  VecX w = VecX::Constant(n, h);
  w(0) = 0.5 * h;
  w(n - 1) = 0.5 * h;
  Eigen::SparseMatrix<double> k = b.transpose() * w.asDiagonal() * b;
  k.makeCompressed();
  return k;
}

Eigen::SparseMatrix<double> edge_form(Index n, double h) {
  const Index nf = n - 2;
  const double ih = 1.0 / h;
  std::vector<Eigen::Triplet<double>> trips;
  for (Index i = 0; i < nf; ++i) {
    trips.emplace_back(i, i, 2.0 * ih);
    if (i > 0) trips.emplace_back(i, i - 1, -ih);
    if (i + 1 < nf) trips.emplace_back(i, i + 1, -ih);
  }
  Eigen::SparseMatrix<double> g(nf, nf);
  g.setFromTriplets(trips.begin(), trips.end());
  return g;
}

ReferenceSolver1D::ReferenceSolver1D(const Grid1D& grid, double beta, double lambda) {
  const Index n = grid.n;
  const double h = grid.spacing();
  a_ = clamped_curvature_form(n, h) + beta * edge_form(n, h);
  {
    Eigen::SparseMatrix<double> id(n - 2, n - 2);
    id.setIdentity();
    a_ = a_ + lambda * h * id;
  }
  a_.makeCompressed();
  solver_.compute(a_);
  if (solver_.info() != Eigen::Success) {
    throw InvalidParameter("ReferenceSolver1D: factorization failed");
  }
  boundary_scale_ = 1.0 / (lambda * h);
}

void ReferenceSolver1D::apply(VecX& flat, Index n, Index m) const {
  const Index nf = n - 2;
  VecX rhs(nf);
  for (Index c = 0; c < m; ++c) {
    Eigen::Map<VecX> col(flat.data() + c * n, n);
    rhs = col.segment(1, nf);
    col.segment(1, nf) = solver_.solve(rhs);
    col(0) *= boundary_scale_;
    col(n - 1) *= boundary_scale_;
  }
}

ReferenceSolver2D::ReferenceSolver2D(const Grid2D& grid, double a11, double a12,
                                     double a22, double b1, double b2, double lambda) {
  (void)a12;  // mixed term intentionally left out of the reference
  const Index nt = grid.nt, nx = grid.nx;
  const double ht = grid.ht(), hx = grid.hx();

  const MatX at = MatX(a11 * clamped_curvature_form(nt, ht) + b1 * edge_form(nt, ht));
  const MatX ax = MatX(a22 * clamped_curvature_form(nx, hx) + b2 * edge_form(nx, hx));
  Eigen::SelfAdjointEigenSolver<MatX> est(at);
  Eigen::SelfAdjointEigenSolver<MatX> esx(ax);
  if (est.info() != Eigen::Success || esx.info() != Eigen::Success) {
    throw InvalidParameter("ReferenceSolver2D: eigendecomposition failed");
  }
  vt_ = est.eigenvectors();
  vx_ = esx.eigenvectors();

  const Index mt = nt - 2, mx = nx - 2;
  denom_.resize(mt, mx);
  for (Index k = 0; k < mt; ++k) {
    for (Index l = 0; l < mx; ++l) {
      denom_(k, l) = hx * est.eigenvalues()(k) + ht * esx.eigenvalues()(l) +
                     lambda * ht * hx;
    }
  }
  boundary_scale_ = 1.0 / (lambda * ht * hx);
}

void ReferenceSolver2D::apply(VecX& flat, Index nt, Index nx, Index m) const {
  const Index mt = nt - 2, mx = nx - 2;
  MatX interior(mt, mx), hat(mt, mx);
  for (Index c = 0; c < m; ++c) {
    Eigen::Map<MatX> plane(flat.data() + c * nt * nx, nt, nx);
    interior = plane.block(1, 1, mt, mx);
    hat = vt_.transpose() * interior * vx_;
    hat.array() /= denom_.array();
    plane.block(1, 1, mt, mx) = vt_ * hat * vx_.transpose();
    plane.row(0) *= boundary_scale_;
    plane.row(nt - 1) *= boundary_scale_;
    plane.col(0) *= boundary_scale_;
    plane.col(nx - 1) *= boundary_scale_;
  }
}

}  // namespace efk
