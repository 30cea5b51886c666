#ifndef RPQUANT_TYPES_HPP
#define RPQUANT_TYPES_HPP

#include <Eigen/Core>

namespace rpquant {

/// A point set is a dense n x D matrix, one point per row.
template <typename Scalar>
using PointSetT = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using PointSet = PointSetT<double>;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

} // namespace rpquant

#endif
