#ifndef EFK_PRECOND_HPP
#define EFK_PRECOND_HPP

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "efk/grid.hpp"
#include "efk/types.hpp"

namespace efk {

// Exact Hessian of the quadratic part of the discrete 1D action at the well
// linearization (curvature form with clamped ends and ghost reflection, edge
// form, lambda * weight), factored once per (grid, beta, lambda). Boundary
// softness matters here: a simply-supported reference amplifies clamped
// boundary modes by orders of magnitude.
class ReferenceSolver1D {
 public:
  ReferenceSolver1D(const Grid1D& grid, double beta, double lambda);

  // Applies A^{-1} to the free rows of a flattened n x m state; clamped
  // boundary rows are passed through with a positive scale.
  void apply(VecX& flat, Index n, Index m) const;

  // The assembled free-node operator (tests pair it against the true Hessian).
  const Eigen::SparseMatrix<double>& matrix() const { return a_; }

 private:
  Eigen::SparseMatrix<double> a_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver_;
  double boundary_scale_ = 1.0;
};

// Same role for the 2D energy. The reference drops only the mixed-derivative
// term -- a12 lt lx <= sqrt(a11 a22)(lt^2 + lx^2) keeps the spectral ratio
// within a factor 2 for the biharmonic coefficients -- which leaves a tensor
// sum  hx (At x I) + ht (I x Ax) + lambda ht hx I  of the exact clamped 1D
// operators, applied through their dense eigenbases.
class ReferenceSolver2D {
 public:
  ReferenceSolver2D(const Grid2D& grid, double a11, double a12, double a22, double b1,
                    double b2, double lambda);

  // flat holds m component planes of size nt*nx (column-major within plane).
  void apply(VecX& flat, Index nt, Index nx, Index m) const;

 private:
  MatX vt_;     // eigenvectors of At (nt-2)
  MatX vx_;     // eigenvectors of Ax (nx-2)
  MatX denom_;  // hx lt_k + ht lx_l + lambda ht hx
  double boundary_scale_ = 1.0;
};

// Free-node quadratic-form matrices shared by both solvers.
Eigen::SparseMatrix<double> clamped_curvature_form(Index n, double h);
Eigen::SparseMatrix<double> edge_form(Index n, double h);

}  // namespace efk

#endif  // EFK_PRECOND_HPP
