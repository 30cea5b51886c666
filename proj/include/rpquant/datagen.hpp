#ifndef RPQUANT_DATAGEN_HPP
#define RPQUANT_DATAGEN_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "rpquant/rng.hpp"
#include "rpquant/tree.hpp"
#include "rpquant/types.hpp"

namespace rpquant {

enum class ManifoldKind { LinearSubspace, Sphere, SwissRoll };

/// Synthetic data with controlled intrinsic dimension d inside ambient
/// dimension D, plus isotropic gaussian noise.
struct ManifoldSpec {
    ManifoldKind kind = ManifoldKind::LinearSubspace;
    Index d = 2;
    Index D = 10;
    Index n = 100;
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;
};

/// The intrinsic coordinates are drawn from a stream that depends only on
/// (seed, d, n), so changing D reuses the same underlying sample.
PointSet generate(const ManifoldSpec& spec);

/// Noise level at which the residual variance fraction beyond the top d
/// covariance eigenvalues equals eps, for unit-variance subspace data.
double noise_sigma_for_eps(Index d, Index D, double eps);

struct KMeansResult {
    PointSet centers;
    std::vector<int> assignment;
    double cost = 0.0; ///< mean squared distance to the assigned center
    std::vector<double> cost_history;
    int iterations = 0;
};

/// Plain Lloyd iterations with uniform seeding from the data points. Empty
/// clusters are reseeded at the point farthest from its current center.
KMeansResult lloyd_kmeans(const Eigen::Ref<const PointSet>& points, Index k, int max_iters,
                          SplitRng& rng);

struct BruteForceKMeans {
    std::vector<int> assignment;
    double total_cost = 0.0; ///< sum over clusters of within-cluster squared deviation
};

/// Exact optimum by exhaustive search: bipartition enumeration for k = 2
/// (n <= 24), set-partition enumeration otherwise (n <= 12).
BruteForceKMeans brute_force_kmeans(const Eigen::Ref<const PointSet>& points, Index k);

struct ErrorCurve {
    std::vector<double> k;     ///< cells at each depth cut, averaged over trees
    std::vector<double> error; ///< training quantization error, averaged over trees
    double slope = 0.0;        ///< least-squares slope of log2(error) vs log2(k)
};

/// Build several independent trees and trace training error against codebook
/// size as the trees are cut at successive depths.
ErrorCurve error_vs_k(const Eigen::Ref<const PointSet>& points, int levels, int trees,
                      BuildParams params);

/// OLS slope of log2(y) against log2(x), dropping entries with y below 1e-12.
double log_log_slope(const std::vector<double>& x, const std::vector<double>& y);

} // namespace rpquant

#endif
