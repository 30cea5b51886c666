#include "rpquant/datagen.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>
#include <numeric>

#include <Eigen/QR>

#include "rpquant/errors.hpp"
#include "rpquant/stats.hpp"

namespace rpquant {

namespace {

Matrix gaussian_matrix(Index rows, Index cols, SplitRng& rng) {
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) m(i, j) = rng.next_gaussian();
    return m;
}

/// Random orthonormal frame: D x d with orthonormal columns.
Matrix random_frame(Index D, Index d, SplitRng& rng) {
    const Matrix g = gaussian_matrix(D, d, rng);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ() * Matrix::Identity(D, d);
    // Fix column signs against the QR convention so the frame depends only on g.
    const Matrix r = q.transpose() * g;
    for (Index j = 0; j < d; ++j)
        if (r(j, j) < 0.0) q.col(j) = -q.col(j);
    return q;
}

} // namespace

double noise_sigma_for_eps(Index d, Index D, double eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw InvalidParamError("noise_sigma_for_eps: eps must lie in (0,1)");
    const double denom = static_cast<double>(D - d) - eps * static_cast<double>(D);
    if (denom <= 0.0) throw InvalidParamError("noise_sigma_for_eps: eps unreachable for these dimensions");
    return std::sqrt(eps * static_cast<double>(d) / denom);
}

PointSet generate(const ManifoldSpec& spec) {
    if (spec.n < 1) throw InvalidParamError("generate: n must be >= 1");
    if (spec.d < 1) throw InvalidParamError("generate: d must be >= 1");
    if (spec.noise_sigma < 0.0) throw InvalidParamError("generate: noise_sigma must be >= 0");

    SplitRng root(spec.seed);
    SplitRng intrinsic_rng = root.child(0);
    SplitRng frame_rng = root.child(1);
    SplitRng noise_rng = root.child(2);

    Matrix intrinsic; // n x (embedding dimension of the clean manifold)
    switch (spec.kind) {
    case ManifoldKind::LinearSubspace: {
        if (spec.d > spec.D) throw InvalidParamError("generate: subspace requires d <= D");
        intrinsic = gaussian_matrix(spec.n, spec.d, intrinsic_rng);
        break;
    }
    case ManifoldKind::Sphere: {
        if (spec.d + 1 > spec.D) throw InvalidParamError("generate: sphere requires d + 1 <= D");
        intrinsic = gaussian_matrix(spec.n, spec.d + 1, intrinsic_rng);
        for (Index i = 0; i < spec.n; ++i) {
            double norm = intrinsic.row(i).norm();
            while (norm == 0.0) {
                for (Index j = 0; j < intrinsic.cols(); ++j) intrinsic(i, j) = intrinsic_rng.next_gaussian();
                norm = intrinsic.row(i).norm();
            }
            intrinsic.row(i) /= norm;
        }
        break;
    }
    case ManifoldKind::SwissRoll: {
        if (spec.d != 2) throw InvalidParamError("generate: swiss roll has intrinsic dimension 2");
        if (spec.D < 3) throw InvalidParamError("generate: swiss roll requires D >= 3");
        intrinsic.resize(spec.n, 3);
        for (Index i = 0; i < spec.n; ++i) {
            const double t = 1.5 * std::numbers::pi * (1.0 + 2.0 * intrinsic_rng.next_double());
            const double h = 21.0 * intrinsic_rng.next_double();
            intrinsic(i, 0) = t * std::cos(t);
            intrinsic(i, 1) = h;
            intrinsic(i, 2) = t * std::sin(t);
        }
        break;
    }
    }

    const Matrix frame = random_frame(spec.D, intrinsic.cols(), frame_rng);
    PointSet points = intrinsic * frame.transpose();
    if (spec.noise_sigma > 0.0) {
        for (Index i = 0; i < points.rows(); ++i)
            for (Index j = 0; j < points.cols(); ++j)
                points(i, j) += spec.noise_sigma * noise_rng.next_gaussian();
    }
    return points;
}

// ---------------------------------------------------------------------------
// Lloyd's algorithm
// ---------------------------------------------------------------------------

KMeansResult lloyd_kmeans(const Eigen::Ref<const PointSet>& points, Index k, int max_iters,
                          SplitRng& rng) {
    const Index n = points.rows();
    if (n == 0) throw EmptySetError("lloyd_kmeans: empty point set");
    if (k < 1 || k > n) throw InvalidParamError("lloyd_kmeans: need 1 <= k <= n");
    if (max_iters < 1) throw InvalidParamError("lloyd_kmeans: need at least one iteration");

    // Uniform seeding without replacement.
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    for (Index i = 0; i < k; ++i) {
        const Index j = i + static_cast<Index>(rng.next_below(static_cast<std::uint64_t>(n - i)));
        std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
    }

    KMeansResult res;
    res.centers.resize(k, points.cols());
    for (Index c = 0; c < k; ++c) res.centers.row(c) = points.row(order[static_cast<std::size_t>(c)]);
    res.assignment.assign(static_cast<std::size_t>(n), 0);

    std::vector<Index> sizes(static_cast<std::size_t>(k), 0);
    Vector min_dist(n);
    double prev_cost = std::numeric_limits<double>::infinity();

    for (int iter = 0; iter < max_iters; ++iter) {
        // Assignment step.
        double cost = 0.0;
        std::fill(sizes.begin(), sizes.end(), Index{0});
        for (Index i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            Index best_c = 0;
            for (Index c = 0; c < k; ++c) {
                const double d = (points.row(i) - res.centers.row(c)).squaredNorm();
                if (d < best) {
                    best = d;
                    best_c = c;
                }
            }
            res.assignment[static_cast<std::size_t>(i)] = static_cast<int>(best_c);
            min_dist[i] = best;
            sizes[static_cast<std::size_t>(best_c)] += 1;
            cost += best;
        }
        cost /= static_cast<double>(n);
        res.cost_history.push_back(cost);
        res.cost = cost;
        res.iterations = iter + 1;

        const bool converged = prev_cost - cost <= 1e-9 * std::max(prev_cost, 1e-300) && iter > 0;
        prev_cost = cost;

        // Update step.
        res.centers.setZero();
        for (Index i = 0; i < n; ++i)
            res.centers.row(res.assignment[static_cast<std::size_t>(i)]) += points.row(i);
        for (Index c = 0; c < k; ++c) {
            if (sizes[static_cast<std::size_t>(c)] > 0) {
                res.centers.row(c) /= static_cast<double>(sizes[static_cast<std::size_t>(c)]);
            } else {
                // Reseed an empty cluster at the point farthest from its center.
                Index far = 0;
                for (Index i = 1; i < n; ++i)
                    if (min_dist[i] > min_dist[far]) far = i;
                res.centers.row(c) = points.row(far);
                min_dist[far] = 0.0;
            }
        }
        if (converged) break;
    }
    return res;
}

// ---------------------------------------------------------------------------
// Exhaustive optimum
// ---------------------------------------------------------------------------

namespace {

/// Within-cluster squared deviation from sums: sum ||x||^2 - ||sum x||^2 / count.
double cluster_cost(double sq_sum, const Vector& vec_sum, Index count) {
    if (count == 0) return 0.0;
    return sq_sum - vec_sum.squaredNorm() / static_cast<double>(count);
}

BruteForceKMeans brute_force_bipartition(const Eigen::Ref<const PointSet>& points) {
    const Index n = points.rows();
    const Vector sq = points.rowwise().squaredNorm();
    const Vector total_vec = points.colwise().sum().transpose();
    const double total_sq = sq.sum();

    // Gray-code walk over subsets of points 1..n-1; point 0 stays in cluster 0.
    Vector sum1 = Vector::Zero(points.cols());
    double sq1 = 0.0;
    Index n1 = 0;
    std::vector<bool> in1(static_cast<std::size_t>(n), false);

    double best = std::numeric_limits<double>::infinity();
    std::uint64_t best_gray = 0;
    const std::uint64_t steps = (1ULL << (n - 1)) - 1;
    for (std::uint64_t i = 1; i <= steps; ++i) {
        const int bit = std::countr_zero(i);
        const Index p = static_cast<Index>(bit) + 1;
        if (in1[static_cast<std::size_t>(p)]) {
            sum1 -= points.row(p).transpose();
            sq1 -= sq[p];
            n1 -= 1;
            in1[static_cast<std::size_t>(p)] = false;
        } else {
            sum1 += points.row(p).transpose();
            sq1 += sq[p];
            n1 += 1;
            in1[static_cast<std::size_t>(p)] = true;
        }
        const double cost = cluster_cost(sq1, sum1, n1) +
                            cluster_cost(total_sq - sq1, total_vec - sum1, n - n1);
        if (cost < best) {
            best = cost;
            best_gray = i ^ (i >> 1);
        }
    }

    BruteForceKMeans out;
    out.assignment.assign(static_cast<std::size_t>(n), 0);
    for (Index p = 1; p < n; ++p)
        if ((best_gray >> (p - 1)) & 1ULL) out.assignment[static_cast<std::size_t>(p)] = 1;

    // Recompute the winning cost directly to shed incremental drift.
    Vector s1 = Vector::Zero(points.cols()), s2 = Vector::Zero(points.cols());
    double q1 = 0.0, q2 = 0.0;
    Index c1 = 0, c2 = 0;
    for (Index p = 0; p < n; ++p) {
        if (out.assignment[static_cast<std::size_t>(p)] == 0) {
            s1 += points.row(p).transpose();
            q1 += sq[p];
            ++c1;
        } else {
            s2 += points.row(p).transpose();
            q2 += sq[p];
            ++c2;
        }
    }
    out.total_cost = cluster_cost(q1, s1, c1) + cluster_cost(q2, s2, c2);
    return out;
}

void partitions_recurse(const Eigen::Ref<const PointSet>& points, Index k, std::vector<int>& rgs,
                        Index pos, int used, BruteForceKMeans& best) {
    const Index n = points.rows();
    if (pos == n) {
        std::vector<Vector> sums(static_cast<std::size_t>(used), Vector::Zero(points.cols()));
        std::vector<double> sqs(static_cast<std::size_t>(used), 0.0);
        std::vector<Index> counts(static_cast<std::size_t>(used), 0);
        for (Index i = 0; i < n; ++i) {
            const auto c = static_cast<std::size_t>(rgs[static_cast<std::size_t>(i)]);
            sums[c] += points.row(i).transpose();
            sqs[c] += points.row(i).squaredNorm();
            counts[c] += 1;
        }
        double cost = 0.0;
        for (std::size_t c = 0; c < sums.size(); ++c) cost += cluster_cost(sqs[c], sums[c], counts[c]);
        if (cost < best.total_cost) {
            best.total_cost = cost;
            best.assignment = rgs;
        }
        return;
    }
    const int limit = std::min<int>(used, static_cast<int>(k) - 1);
    for (int c = 0; c <= limit; ++c) {
        rgs[static_cast<std::size_t>(pos)] = c;
        partitions_recurse(points, k, rgs, pos + 1, std::max(used, c + 1), best);
    }
}

} // namespace

BruteForceKMeans brute_force_kmeans(const Eigen::Ref<const PointSet>& points, Index k) {
    const Index n = points.rows();
    if (n == 0) throw EmptySetError("brute_force_kmeans: empty point set");
    if (k < 1 || k > n) throw InvalidParamError("brute_force_kmeans: need 1 <= k <= n");

    if (k == 1) {
        BruteForceKMeans out;
        out.assignment.assign(static_cast<std::size_t>(n), 0);
        const Vector s = points.colwise().sum().transpose();
        out.total_cost = cluster_cost(points.rowwise().squaredNorm().sum(), s, n);
        return out;
    }
    if (k == 2) {
        if (n > 24) throw TooLargeError("brute_force_kmeans: bipartition search capped at n = 24");
        return brute_force_bipartition(points);
    }
    if (n > 12) throw TooLargeError("brute_force_kmeans: partition search capped at n = 12");
    BruteForceKMeans best;
    best.total_cost = std::numeric_limits<double>::infinity();
    std::vector<int> rgs(static_cast<std::size_t>(n), 0);
    partitions_recurse(points, k, rgs, 1, 1, best);
    return best;
}

// ---------------------------------------------------------------------------
// Error-vs-codebook-size experiment
// ---------------------------------------------------------------------------

double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int m = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (y[i] < 1e-12) continue;
        const double lx = std::log2(x[i]);
        const double ly = std::log2(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++m;
    }
    if (m < 2) throw InvalidParamError("log_log_slope: need at least 2 usable points");
    const double denom = static_cast<double>(m) * sxx - sx * sx;
    if (denom == 0.0) throw InvalidParamError("log_log_slope: degenerate abscissae");
    return (static_cast<double>(m) * sxy - sx * sy) / denom;
}

ErrorCurve error_vs_k(const Eigen::Ref<const PointSet>& points, int levels, int trees,
                      BuildParams params) {
    if (levels < 1) throw InvalidParamError("error_vs_k: levels must be >= 1");
    if (trees < 1) throw InvalidParamError("error_vs_k: trees must be >= 1");
    params.max_levels = levels;
    params.keep_stats = true;

    SplitRng seed_rng(params.seed);
    std::vector<std::uint64_t> seeds;
    seeds.reserve(static_cast<std::size_t>(trees));
    for (int t = 0; t < trees; ++t) seeds.push_back(seed_rng.child(static_cast<std::uint64_t>(t)).key());

    const int workers = std::max(1, params.threads);
    std::vector<RpTree> built;
    built.reserve(static_cast<std::size_t>(trees));
    for (int t0 = 0; t0 < trees; t0 += workers) {
        const int batch = std::min(workers, trees - t0);
        std::vector<std::future<RpTree>> futs;
        futs.reserve(static_cast<std::size_t>(batch));
        for (int b = 0; b < batch; ++b) {
            BuildParams p = params;
            p.seed = seeds[static_cast<std::size_t>(t0 + b)];
            p.threads = 1;
            futs.push_back(std::async(std::launch::async,
                                      [&points, p]() { return RpTree::build(points, p); }));
        }
        for (auto& f : futs) built.push_back(f.get());
    }

    ErrorCurve curve;
    curve.k.resize(static_cast<std::size_t>(levels) + 1, 0.0);
    curve.error.resize(static_cast<std::size_t>(levels) + 1, 0.0);
    for (const RpTree& tree : built) {
        for (int l = 0; l <= levels; ++l) {
            const LevelSlice slice = truncated_slice(tree, l);
            curve.k[static_cast<std::size_t>(l)] += static_cast<double>(slice.cells);
            curve.error[static_cast<std::size_t>(l)] += slice.training_error;
        }
    }
    for (int l = 0; l <= levels; ++l) {
        curve.k[static_cast<std::size_t>(l)] /= static_cast<double>(trees);
        curve.error[static_cast<std::size_t>(l)] /= static_cast<double>(trees);
    }
    curve.slope = log_log_slope(curve.k, curve.error);
    return curve;
}

} // namespace rpquant
