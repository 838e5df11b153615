#ifndef EFK_TYPES_HPP
#define EFK_TYPES_HPP

#include <Eigen/Core>

namespace efk {

using Scalar = double;
using Index = Eigen::Index;

using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

// Point values in R^m. Components m <= 4 in this toolkit, so keep them on the
// stack to avoid per-node heap traffic in the energy loops.
using PointVec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1, Eigen::ColMajor, 4, 1>;
using PointMat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 4, 4>;

constexpr int kMaxComponents = 4;

}  // namespace efk

#endif  // EFK_TYPES_HPP
