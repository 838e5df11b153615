#ifndef EFK_GRID_HPP
#define EFK_GRID_HPP

#include "efk/errors.hpp"
#include "efk/types.hpp"

namespace efk {

// Uniform truncation of the line: nodes x_i = -L + i*h, h = 2L/(n-1).
struct Grid1D {
  double half_length = 0.0;
  Index n = 0;

  static Grid1D make(double half_length, Index n) {
    if (!(half_length > 0.0) || n < 5) {
      throw InvalidParameter("Grid1D: requires L > 0 and n >= 5");
    }
    return Grid1D{half_length, n};
  }

  double spacing() const { return 2.0 * half_length / static_cast<double>(n - 1); }
  double x(Index i) const { return -half_length + spacing() * static_cast<double>(i); }

  bool operator==(const Grid1D& o) const {
    return n == o.n && half_length == o.half_length;
  }
};

// Uniform rectangle [-T,T] x [-L,L]; index i runs over t, j over x.
struct Grid2D {
  double t_half_length = 0.0;
  double x_half_length = 0.0;
  Index nt = 0;
  Index nx = 0;

  static Grid2D make(double t_half_length, double x_half_length, Index nt, Index nx) {
    if (!(t_half_length > 0.0) || !(x_half_length > 0.0) || nt < 5 || nx < 5) {
      throw InvalidParameter("Grid2D: requires T, L > 0 and nt, nx >= 5");
    }
    return Grid2D{t_half_length, x_half_length, nt, nx};
  }

  double ht() const { return 2.0 * t_half_length / static_cast<double>(nt - 1); }
  double hx() const { return 2.0 * x_half_length / static_cast<double>(nx - 1); }
  double t(Index i) const { return -t_half_length + ht() * static_cast<double>(i); }
  double x(Index j) const { return -x_half_length + hx() * static_cast<double>(j); }

  Grid1D x_grid() const { return Grid1D{x_half_length, nx}; }

  bool operator==(const Grid2D& o) const {
    return nt == o.nt && nx == o.nx && t_half_length == o.t_half_length &&
           x_half_length == o.x_half_length;
  }
};

}  // namespace efk

#endif  // EFK_GRID_HPP
