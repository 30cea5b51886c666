#ifndef RPQUANT_PROJECTION_HPP
#define RPQUANT_PROJECTION_HPP

#include <vector>

#include "rpquant/rng.hpp"
#include "rpquant/types.hpp"

namespace rpquant {

enum class DirectionKind { Gaussian, UnitSphere };

/// A projection direction in R^D. Gaussian kind has i.i.d. N(0, 1/D) entries;
/// unit-sphere kind is uniform on the sphere (unit norm).
struct Direction {
    Vector vector;
    DirectionKind kind = DirectionKind::Gaussian;
};

struct ProjectedSet {
    Vector values;
    Direction direction;
};

Direction sample_direction(Index dim, DirectionKind kind, SplitRng& rng);

/// One-dimensional projection: values[i] = points.row(i) . direction.
ProjectedSet project(const Eigen::Ref<const PointSet>& points, const Direction& direction);

/// sqrt(p(1-p)/trials), the binomial standard error of an estimated rate.
double binomial_stderr(double p_hat, long trials);

/// Empirical quantile (order statistic at ceil(q*n), 1-indexed).
double quantile(std::vector<double> values, double q);

// ---------------------------------------------------------------------------
// Monte-Carlo estimators of the projection concentration behavior. All sample
// gaussian-kind directions and return empirical rates the tests compare to
// the closed-form tail bounds.
// ---------------------------------------------------------------------------

struct LengthTails {
    double p_small = 0.0; ///< estimate of P[|U.x| <= alpha ||x|| / sqrt(D)]
    double p_large = 0.0; ///< estimate of P[|U.x| >= beta  ||x|| / sqrt(D)]
    long trials = 0;
};

LengthTails length_tail_probabilities(const Eigen::Ref<const Vector>& x, double alpha,
                                      double beta, long trials, SplitRng& rng);

/// Rate of draws U in which more than an eps fraction of the projected points
/// lands outside the central interval of half-width
/// sqrt(2 ln(1/(delta*eps))) * Delta / sqrt(D) around U.x0, where Delta is the
/// radius of the ball about x0 containing the set.
double central_interval_fraction(const Eigen::Ref<const PointSet>& points,
                                 const Eigen::Ref<const Vector>& x0, double delta, double eps,
                                 long trials, SplitRng& rng);

/// Rate of draws U in which |median(U.S) - U.x0| exceeds
/// (Delta / sqrt(D)) * sqrt(2 ln(2/delta)).
double median_deviation_failure_rate(const Eigen::Ref<const PointSet>& points,
                                     const Eigen::Ref<const Vector>& x0, double delta,
                                     long trials, SplitRng& rng);

/// Per-draw supremum of |x.U|^2 / ||x||^2 over a subspace with orthonormal
/// basis columns. The supremum has the closed form ||basis^T U||^2 (attained
/// at the normalized projection of U onto the subspace); `probes` random unit
/// vectors of the subspace are evaluated as a cross-check and can never
/// exceed it.
std::vector<double> subspace_max_shrinkage(const Eigen::Ref<const Matrix>& basis, long draws,
                                           long probes, SplitRng& rng);

struct QuadraticFormTails {
    double p_low = 0.0;  ///< estimate of P[U^T A U < alpha * E]
    double p_high = 0.0; ///< estimate of P[U^T A U > beta * E]
    double mean_form = 0.0;
    double mean_form_stderr = 0.0;
    double expected = 0.0; ///< trace(A) / n
    long trials = 0;
};

QuadraticFormTails quadratic_form_tails(const Eigen::Ref<const Matrix>& psd, double alpha,
                                        double beta, long trials, SplitRng& rng);

struct ProjectedDiameterStats {
    double success_rate = 0.0; ///< rate of avg_sq_diameter(S.U) >= avg_sq_diameter(S) / (4D)
    double mean_ratio = 0.0;   ///< mean of avg_sq_diameter(S.U) * D / avg_sq_diameter(S)
    double ratio_stderr = 0.0;
    long trials = 0;
};

ProjectedDiameterStats projected_avg_diameter_bound(const Eigen::Ref<const PointSet>& points,
                                                    long trials, SplitRng& rng);

struct TailFractionProfile {
    std::vector<double> bound;        ///< (2^k / delta) e^{-k^2/2}, k = 1..K
    std::vector<double> exceedance;   ///< per-k rate of fraction-outside > bound
    double any_k_exceedance = 0.0;    ///< rate of draws violating the bound at some k
    long trials = 0;
};

TailFractionProfile tail_fraction_profile(const Eigen::Ref<const PointSet>& points, double delta,
                                          int max_k, long trials, SplitRng& rng);

} // namespace rpquant

#endif
