#ifndef RPQUANT_STATS_HPP
#define RPQUANT_STATS_HPP

#include <optional>
#include <vector>

#include "rpquant/errors.hpp"
#include "rpquant/rng.hpp"
#include "rpquant/types.hpp"

namespace rpquant {

/// Arithmetic mean of the rows of a point set.
template <typename Derived>
Eigen::Vector<typename Derived::Scalar, Eigen::Dynamic>
mean_point(const Eigen::MatrixBase<Derived>& points) {
    if (points.rows() == 0) throw EmptySetError("mean_point: empty point set");
    return points.colwise().mean().transpose();
}

/// Average squared interpoint distance, computed in O(nD) through the
/// mean-centered form 2/n * sum ||x - mean||^2.
template <typename Derived>
typename Derived::Scalar avg_sq_diameter(const Eigen::MatrixBase<Derived>& points) {
    if (points.rows() == 0) throw EmptySetError("avg_sq_diameter: empty point set");
    const auto mu = points.colwise().mean();
    const auto centered = points.rowwise() - mu;
    return typename Derived::Scalar(2) * centered.squaredNorm() /
           static_cast<typename Derived::Scalar>(points.rows());
}

/// Population covariance (1/n normalization), symmetric PSD up to roundoff.
template <typename Derived>
PointSetT<typename Derived::Scalar> covariance(const Eigen::MatrixBase<Derived>& points) {
    if (points.rows() == 0) throw EmptySetError("covariance: empty point set");
    const auto mu = points.colwise().mean();
    const PointSetT<typename Derived::Scalar> centered = points.rowwise() - mu;
    PointSetT<typename Derived::Scalar> cov(points.cols(), points.cols());
    cov.template triangularView<Eigen::Lower>() =
        centered.transpose() * centered / static_cast<typename Derived::Scalar>(points.rows());
    cov.template triangularView<Eigen::StrictlyUpper>() = cov.transpose();
    return cov;
}

enum class DiameterMode { Exact, Approx, Auto };

struct DiameterResult {
    double value = 0.0;
    bool is_exact = true;
};

/// Largest interpoint distance. Exact mode is O(n^2 D); approx mode returns
/// 2 * max ||x - mean||, an overestimate by at most a factor 2. Auto picks
/// exact for n <= 2048.
DiameterResult diameter(const Eigen::Ref<const PointSet>& points,
                        DiameterMode mode = DiameterMode::Auto);

/// Max distance from the row mean.
double max_dist_from_mean(const Eigen::Ref<const PointSet>& points);

struct SetStats {
    Vector mean;
    double avg_sq_diameter = 0.0;
    double diameter = 0.0;
    bool diameter_is_exact = true;
};

SetStats set_stats(const Eigen::Ref<const PointSet>& points,
                   DiameterMode mode = DiameterMode::Auto);

struct SplitDecrease {
    double lhs = 0.0; ///< parent avg sq diameter minus weighted child values
    double rhs = 0.0; ///< 2 |S1||S2|/|S|^2 * ||mean(S1) - mean(S2)||^2
};

/// Both sides of the exact split-decrease identity. Throws NotAPartitionError
/// if (s1, s2) is not a partition of s as a multiset of rows.
SplitDecrease split_decrease(const Eigen::Ref<const PointSet>& s,
                             const Eigen::Ref<const PointSet>& s1,
                             const Eigen::Ref<const PointSet>& s2);

struct BiasVarianceCheck {
    double shifted_lhs = 0.0;  ///< E||X - z||^2
    double shifted_rhs = 0.0;  ///< E||X - EX||^2 + ||z - EX||^2
    double pairwise_lhs = 0.0; ///< E||X - Y||^2, direct double sum
    double pairwise_rhs = 0.0; ///< 2 E||X - EX||^2
};

/// Both identities behind the mean-centered reformulations, evaluated by
/// direct summation over the uniform distribution on the rows.
BiasVarianceCheck bias_variance_check(const Eigen::Ref<const PointSet>& points,
                                      const Eigen::Ref<const Vector>& z);

struct LocalCovStats {
    Vector eigenvalues; ///< descending, clipped to zero below tol
    double trace = 0.0;
    Index ball_size = 0;

    /// Smallest d whose leading eigenvalues carry at least (1 - eps) of the
    /// trace. Zero-trace balls report 0.
    Index d_for_eps(double eps) const;
};

struct LocalCovDimension {
    std::vector<LocalCovStats> per_ball;
    Index d_hat = 0; ///< max of d_for_eps over sampled balls
};

/// Estimate the local covariance dimension at scale r: for each sampled
/// center, eigendecompose the covariance of the points within distance r and
/// report the worst-case d over centers. Centers are all rows when
/// n <= max_centers, otherwise max_centers rows sampled without replacement.
LocalCovDimension local_cov_dimension(const Eigen::Ref<const PointSet>& points, double r,
                                      double eps, SplitRng rng, Index max_centers = 512);

} // namespace rpquant

#endif
