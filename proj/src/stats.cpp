#include "rpquant/stats.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rpquant {

namespace {

constexpr Index kExactDiameterCutoff = 2048;
constexpr Index kDiameterBlock = 512;

double max_pairwise_sq_dist(const Eigen::Ref<const PointSet>& points) {
    const Index n = points.rows();
    const Vector norms = points.rowwise().squaredNorm();
    double best = 0.0;
    for (Index i0 = 0; i0 < n; i0 += kDiameterBlock) {
        const Index b = std::min(kDiameterBlock, n - i0);
        const Matrix gram = points.middleRows(i0, b) * points.transpose();
        for (Index i = 0; i < b; ++i) {
            for (Index j = 0; j < n; ++j) {
                const double d2 = norms[i0 + i] + norms[j] - 2.0 * gram(i, j);
                if (d2 > best) best = d2;
            }
        }
    }
    return std::max(best, 0.0);
}

} // namespace

double max_dist_from_mean(const Eigen::Ref<const PointSet>& points) {
    if (points.rows() == 0) throw EmptySetError("max_dist_from_mean: empty point set");
    const auto mu = points.colwise().mean();
    return std::sqrt((points.rowwise() - mu).rowwise().squaredNorm().maxCoeff());
}

DiameterResult diameter(const Eigen::Ref<const PointSet>& points, DiameterMode mode) {
    const Index n = points.rows();
    if (n == 0) throw EmptySetError("diameter: empty point set");
    if (mode == DiameterMode::Auto)
        mode = n <= kExactDiameterCutoff ? DiameterMode::Exact : DiameterMode::Approx;
    if (mode == DiameterMode::Exact) return {std::sqrt(max_pairwise_sq_dist(points)), true};
    return {2.0 * max_dist_from_mean(points), false};
}

SetStats set_stats(const Eigen::Ref<const PointSet>& points, DiameterMode mode) {
    SetStats out;
    out.mean = mean_point(points);
    out.avg_sq_diameter = avg_sq_diameter(points);
    const DiameterResult d = diameter(points, mode);
    out.diameter = d.value;
    out.diameter_is_exact = d.is_exact;
    return out;
}

namespace {

bool rows_form_partition(const Eigen::Ref<const PointSet>& s, const Eigen::Ref<const PointSet>& s1,
                         const Eigen::Ref<const PointSet>& s2) {
    if (s1.rows() + s2.rows() != s.rows()) return false;
    if (s1.cols() != s.cols() || s2.cols() != s.cols()) return false;

    const auto row_less = [](const Eigen::Ref<const PointSet>& a, Index i,
                             const Eigen::Ref<const PointSet>& b, Index j) {
        for (Index c = 0; c < a.cols(); ++c) {
            if (a(i, c) < b(j, c)) return true;
            if (a(i, c) > b(j, c)) return false;
        }
        return false;
    };

    std::vector<Index> parent(static_cast<std::size_t>(s.rows()));
    std::iota(parent.begin(), parent.end(), Index{0});
    std::sort(parent.begin(), parent.end(),
              [&](Index a, Index b) { return row_less(s, a, s, b); });

    // Merged order of the two children, each sorted first.
    std::vector<std::pair<int, Index>> kids;
    kids.reserve(parent.size());
    for (Index i = 0; i < s1.rows(); ++i) kids.emplace_back(0, i);
    for (Index i = 0; i < s2.rows(); ++i) kids.emplace_back(1, i);
    std::sort(kids.begin(), kids.end(), [&](const auto& a, const auto& b) {
        const auto& ma = a.first == 0 ? s1 : s2;
        const auto& mb = b.first == 0 ? s1 : s2;
        return row_less(ma, a.second, mb, b.second);
    });

    for (std::size_t k = 0; k < parent.size(); ++k) {
        const auto& child = kids[k].first == 0 ? s1 : s2;
        if (s.row(parent[k]) != child.row(kids[k].second)) return false;
    }
    return true;
}

} // namespace

SplitDecrease split_decrease(const Eigen::Ref<const PointSet>& s,
                             const Eigen::Ref<const PointSet>& s1,
                             const Eigen::Ref<const PointSet>& s2) {
    if (s1.rows() == 0 || s2.rows() == 0)
        throw NotAPartitionError("split_decrease: both parts must be nonempty");
    if (!rows_form_partition(s, s1, s2))
        throw NotAPartitionError("split_decrease: parts do not partition the parent multiset");

    const double n = static_cast<double>(s.rows());
    const double w1 = static_cast<double>(s1.rows()) / n;
    const double w2 = static_cast<double>(s2.rows()) / n;

    SplitDecrease out;
    out.lhs = avg_sq_diameter(s) - (w1 * avg_sq_diameter(s1) + w2 * avg_sq_diameter(s2));
    out.rhs = 2.0 * w1 * w2 * (mean_point(s1) - mean_point(s2)).squaredNorm();
    return out;
}

BiasVarianceCheck bias_variance_check(const Eigen::Ref<const PointSet>& points,
                                      const Eigen::Ref<const Vector>& z) {
    const Index n = points.rows();
    if (n == 0) throw EmptySetError("bias_variance_check: empty point set");
    if (z.size() != points.cols())
        throw DimensionMismatchError("bias_variance_check: z dimension mismatch");

    const Vector mu = mean_point(points);
    const double var = (points.rowwise() - mu.transpose()).rowwise().squaredNorm().mean();

    BiasVarianceCheck out;
    out.shifted_lhs = (points.rowwise() - z.transpose()).rowwise().squaredNorm().mean();
    out.shifted_rhs = var + (z - mu).squaredNorm();

    double pair_sum = 0.0;
    for (Index i = 0; i < n; ++i)
        pair_sum += (points.rowwise() - points.row(i)).rowwise().squaredNorm().sum();
    out.pairwise_lhs = pair_sum / (static_cast<double>(n) * static_cast<double>(n));
    out.pairwise_rhs = 2.0 * var;
    return out;
}

Index LocalCovStats::d_for_eps(double eps) const {
    if (trace <= 0.0) return 0;
    const double target = (1.0 - eps) * trace;
    double cum = 0.0;
    for (Index d = 0; d < eigenvalues.size(); ++d) {
        cum += eigenvalues[d];
        if (cum >= target) return d + 1;
    }
    return eigenvalues.size();
}

LocalCovDimension local_cov_dimension(const Eigen::Ref<const PointSet>& points, double r,
                                      double eps, SplitRng rng, Index max_centers) {
    const Index n = points.rows();
    if (n == 0) throw EmptySetError("local_cov_dimension: empty point set");
    if (n < 2) throw InvalidParamError("local_cov_dimension: need at least 2 points");
    if (!(r > 0.0)) throw InvalidParamError("local_cov_dimension: r must be positive");
    if (!(eps > 0.0 && eps < 1.0))
        throw InvalidParamError("local_cov_dimension: eps must lie in (0, 1)");

    std::vector<Index> centers(static_cast<std::size_t>(n));
    std::iota(centers.begin(), centers.end(), Index{0});
    if (n > max_centers) {
        // Partial Fisher-Yates: the first max_centers entries are a uniform
        // sample without replacement.
        for (Index i = 0; i < max_centers; ++i) {
            const Index j = i + static_cast<Index>(rng.next_below(static_cast<std::uint64_t>(n - i)));
            std::swap(centers[static_cast<std::size_t>(i)], centers[static_cast<std::size_t>(j)]);
        }
        centers.resize(static_cast<std::size_t>(max_centers));
    }

    const double r_sq = r * r;
    LocalCovDimension out;
    out.per_ball.reserve(centers.size());
    for (const Index c : centers) {
        const Vector d2 = (points.rowwise() - points.row(c)).rowwise().squaredNorm();
        std::vector<Index> in_ball;
        for (Index i = 0; i < n; ++i)
            if (d2[i] <= r_sq) in_ball.push_back(i);

        LocalCovStats stats;
        stats.ball_size = static_cast<Index>(in_ball.size());
        if (in_ball.size() < 2) {
            stats.eigenvalues = Vector::Zero(points.cols());
            stats.trace = 0.0;
        } else {
            PointSet ball(static_cast<Index>(in_ball.size()), points.cols());
            for (std::size_t i = 0; i < in_ball.size(); ++i) ball.row(static_cast<Index>(i)) = points.row(in_ball[i]);
            const Matrix cov = covariance(ball);
            Eigen::SelfAdjointEigenSolver<Matrix> es(cov, Eigen::EigenvaluesOnly);
            Vector ev = es.eigenvalues().reverse();
            const double tol = 1e-9 * std::max(cov.trace(), 0.0);
            for (Index i = 0; i < ev.size(); ++i)
                if (ev[i] < tol) ev[i] = 0.0;
            stats.eigenvalues = std::move(ev);
            stats.trace = stats.eigenvalues.sum();
        }
        out.d_hat = std::max(out.d_hat, stats.d_for_eps(eps));
        out.per_ball.push_back(std::move(stats));
    }
    return out;
}

} // namespace rpquant
