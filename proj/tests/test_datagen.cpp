#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <set>

#include "oracles.hpp"
#include "rpquant/datagen.hpp"
#include "rpquant/errors.hpp"
#include "rpquant/stats.hpp"

using namespace rpquant;

namespace {

PointSet column(std::initializer_list<double> values) {
    PointSet points(static_cast<Index>(values.size()), 1);
    Index i = 0;
    for (double v : values) points(i++, 0) = v;
    return points;
}

/// Pairwise form of the clustering objective, summed over ordered pairs.
double pairwise_partition_cost(const Eigen::Ref<const PointSet>& points,
                               const std::vector<int>& assignment, int k) {
    double total = 0.0;
    for (int c = 0; c < k; ++c) {
        double sum = 0.0;
        Index count = 0;
        for (Index i = 0; i < points.rows(); ++i) {
            if (assignment[static_cast<std::size_t>(i)] != c) continue;
            ++count;
            for (Index j = 0; j < points.rows(); ++j)
                if (assignment[static_cast<std::size_t>(j)] == c)
                    sum += (points.row(i) - points.row(j)).squaredNorm();
        }
        if (count > 0) total += sum / (2.0 * static_cast<double>(count));
    }
    return total;
}

double centroid_partition_cost(const Eigen::Ref<const PointSet>& points,
                               const std::vector<int>& assignment, int k) {
    double total = 0.0;
    for (int c = 0; c < k; ++c) {
        Vector sum = Vector::Zero(points.cols());
        Index count = 0;
        for (Index i = 0; i < points.rows(); ++i)
            if (assignment[static_cast<std::size_t>(i)] == c) {
                sum += points.row(i).transpose();
                ++count;
            }
        if (count == 0) continue;
        const Vector mu = sum / static_cast<double>(count);
        for (Index i = 0; i < points.rows(); ++i)
            if (assignment[static_cast<std::size_t>(i)] == c)
                total += (points.row(i).transpose() - mu).squaredNorm();
    }
    return total;
}

} // namespace

TEST_CASE("manifold generation") {
    SUBCASE("noiseless subspace has exact covariance rank") {
        ManifoldSpec spec;
        spec.kind = ManifoldKind::LinearSubspace;
        spec.d = 2;
        spec.D = 10;
        spec.n = 200;
        spec.seed = 4;
        const PointSet s = generate(spec);
        const Matrix cov = covariance(s);
        Eigen::SelfAdjointEigenSolver<Matrix> es(cov, Eigen::EigenvaluesOnly);
        const Vector ev = es.eigenvalues().reverse();
        CHECK(ev[2] <= 1e-9 * cov.trace());
        CHECK(ev[1] > 1e-3);
    }

    SUBCASE("noise tuned for a target residual share") {
        const double target = 0.02;
        ManifoldSpec spec;
        spec.kind = ManifoldKind::LinearSubspace;
        spec.d = 5;
        spec.D = 100;
        spec.n = 4000;
        spec.noise_sigma = noise_sigma_for_eps(5, 100, target);
        spec.seed = 11;
        const PointSet s = generate(spec);
        const Matrix cov = covariance(s);
        Eigen::SelfAdjointEigenSolver<Matrix> es(cov, Eigen::EigenvaluesOnly);
        const Vector ev = es.eigenvalues().reverse();
        const double residual = ev.tail(95).sum() / ev.sum();
        CHECK(residual == doctest::Approx(target).epsilon(0.25));

        // The spectrum resolves the intrinsic dimension at a slightly looser eps.
        SplitRng rng(0);
        const auto res = local_cov_dimension(s, 1e12, 1.5 * target, rng, 32);
        CHECK(res.d_hat == 5);
    }

    SUBCASE("sphere samples lie on the unit sphere") {
        ManifoldSpec spec;
        spec.kind = ManifoldKind::Sphere;
        spec.d = 2;
        spec.D = 7;
        spec.n = 64;
        spec.seed = 9;
        const PointSet s = generate(spec);
        for (Index i = 0; i < s.rows(); ++i) CHECK(s.row(i).norm() == doctest::Approx(1.0));
    }

    SUBCASE("swiss roll occupies a 3-dimensional slice") {
        ManifoldSpec spec;
        spec.kind = ManifoldKind::SwissRoll;
        spec.d = 2;
        spec.D = 12;
        spec.n = 300;
        spec.seed = 13;
        const PointSet s = generate(spec);
        const Matrix cov = covariance(s);
        Eigen::SelfAdjointEigenSolver<Matrix> es(cov, Eigen::EigenvaluesOnly);
        const Vector ev = es.eigenvalues().reverse();
        CHECK(ev[3] <= 1e-9 * cov.trace());
        CHECK(ev[2] > 1e-6);
    }

    SUBCASE("validation and determinism") {
        ManifoldSpec bad;
        bad.n = 0;
        CHECK_THROWS_AS(generate(bad), InvalidParamError);
        ManifoldSpec sphere_bad;
        sphere_bad.kind = ManifoldKind::Sphere;
        sphere_bad.d = 10;
        sphere_bad.D = 10;
        CHECK_THROWS_AS(generate(sphere_bad), InvalidParamError);

        ManifoldSpec spec;
        spec.d = 3;
        spec.D = 9;
        spec.n = 50;
        spec.noise_sigma = 0.05;
        spec.seed = 21;
        CHECK(generate(spec) == generate(spec));
    }
}

TEST_CASE("lloyd iterations") {
    SplitRng rng(31);

    SUBCASE("k = n drives the cost to zero") {
        const PointSet s = oracles::random_point_set(rng, 12, 3, 6);
        const auto res = lloyd_kmeans(s, s.rows(), 20, rng);
        CHECK(res.cost == doctest::Approx(0.0));
    }

    SUBCASE("k = 1 reaches half the average squared diameter after one update") {
        const PointSet s = oracles::random_point_set(rng, 40, 4, 5);
        const auto res = lloyd_kmeans(s, 1, 20, rng);
        REQUIRE(res.cost_history.size() >= 2);
        CHECK(res.cost_history[1] == doctest::Approx(avg_sq_diameter(s) / 2.0).epsilon(1e-12));
        CHECK(res.cost == doctest::Approx(avg_sq_diameter(s) / 2.0).epsilon(1e-12));
    }

    SUBCASE("hand-checked two clusters") {
        const PointSet s = column({0, 2, 10, 12});
        for (std::uint64_t seed = 0; seed < 8; ++seed) {
            SplitRng local(seed);
            const auto res = lloyd_kmeans(s, 2, 50, local);
            CHECK(res.cost == doctest::Approx(1.0));
            std::vector<double> centers{res.centers(0, 0), res.centers(1, 0)};
            std::sort(centers.begin(), centers.end());
            CHECK(centers[0] == doctest::Approx(1.0));
            CHECK(centers[1] == doctest::Approx(11.0));
        }
    }

    SUBCASE("cost is nonincreasing across iterations") {
        for (int rep = 0; rep < 10; ++rep) {
            SplitRng local = rng.child(static_cast<std::uint64_t>(rep));
            const PointSet s = oracles::random_point_set(local, 60, 5, 10);
            const Index k = 1 + static_cast<Index>(local.next_below(5));
            const auto res = lloyd_kmeans(s, std::min(k, s.rows()), 60, local);
            for (std::size_t t = 1; t < res.cost_history.size(); ++t)
                CHECK(res.cost_history[t] <= res.cost_history[t - 1] * (1 + 1e-12) + 1e-15);
        }
    }

    CHECK_THROWS_AS(lloyd_kmeans(column({1, 2}), 3, 10, rng), InvalidParamError);
    CHECK_THROWS_AS(lloyd_kmeans(column({1, 2}), 0, 10, rng), InvalidParamError);
}

TEST_CASE("exhaustive optimum") {
    SUBCASE("hand-checked instance") {
        const PointSet s = column({0, 2, 10, 12});
        const auto res = brute_force_kmeans(s, 2);
        CHECK(res.total_cost == doctest::Approx(4.0));
        CHECK(res.assignment[0] == res.assignment[1]);
        CHECK(res.assignment[2] == res.assignment[3]);
        CHECK(res.assignment[0] != res.assignment[2]);
        // Pairwise and centroid forms agree on the optimum.
        CHECK(pairwise_partition_cost(s, res.assignment, 2) == doctest::Approx(4.0).epsilon(1e-12));
    }

    SUBCASE("k = n and adjacent grouping") {
        const PointSet s = column({5, 6, 7});
        CHECK(brute_force_kmeans(s, 3).total_cost == doctest::Approx(0.0));
        const auto two = brute_force_kmeans(s, 2);
        CHECK(two.total_cost == doctest::Approx(0.5));
        CHECK(two.assignment[0] != two.assignment[2]);
    }

    SUBCASE("bipartition path agrees with the set-partition path") {
        SplitRng rng(41);
        for (int rep = 0; rep < 10; ++rep) {
            SplitRng local = rng.child(static_cast<std::uint64_t>(rep));
            const PointSet s = oracles::random_point_set(local, 10, 3, 4);
            const auto fast = brute_force_kmeans(s, 2);
            // Force the general enumerator by asking for k = 2 via rgs.
            BruteForceKMeans slow;
            slow.total_cost = std::numeric_limits<double>::infinity();
            const Index n = s.rows();
            for (std::uint64_t mask = 1; mask + 1 < (1ULL << n); ++mask) {
                std::vector<int> assignment(static_cast<std::size_t>(n), 0);
                for (Index i = 0; i < n; ++i)
                    if ((mask >> i) & 1ULL) assignment[static_cast<std::size_t>(i)] = 1;
                const double cost = centroid_partition_cost(s, assignment, 2);
                if (cost < slow.total_cost) {
                    slow.total_cost = cost;
                    slow.assignment = assignment;
                }
            }
            CHECK(fast.total_cost == doctest::Approx(slow.total_cost).epsilon(1e-9));
        }
    }

    SUBCASE("lloyd never beats the optimum") {
        SplitRng rng(43);
        for (int rep = 0; rep < 10; ++rep) {
            SplitRng local = rng.child(static_cast<std::uint64_t>(rep));
            const PointSet s = oracles::random_point_set(local, 12, 3, 5);
            const Index k = 2 + static_cast<Index>(local.next_below(2));
            if (k > s.rows()) continue;
            const auto best = brute_force_kmeans(s, k);
            const auto heur = lloyd_kmeans(s, k, 50, local);
            CHECK(heur.cost * static_cast<double>(s.rows()) >= best.total_cost - 1e-9);
        }
    }

    SUBCASE("guards") {
        SplitRng rng(47);
        const PointSet big = oracles::random_point_set(rng, 30, 2, 25);
        CHECK_THROWS_AS(brute_force_kmeans(big, 2), TooLargeError);
        const PointSet mid = oracles::random_point_set(rng, 14, 2, 13);
        CHECK_THROWS_AS(brute_force_kmeans(mid, 3), TooLargeError);
    }
}

TEST_CASE("pairwise and centroid costs agree on random partitions") {
    SplitRng rng(53);
    for (int rep = 0; rep < 50; ++rep) {
        SplitRng local = rng.child(static_cast<std::uint64_t>(rep));
        const PointSet s = oracles::random_point_set(local, 25, 5, 2);
        const int k = 1 + static_cast<int>(local.next_below(4));
        std::vector<int> assignment(static_cast<std::size_t>(s.rows()));
        for (auto& a : assignment) a = static_cast<int>(local.next_below(static_cast<std::uint64_t>(k)));
        const double a = pairwise_partition_cost(s, assignment, k);
        const double b = centroid_partition_cost(s, assignment, k);
        CHECK(oracles::rel_gap(a + 1.0, b + 1.0) <= 1e-9); // shift guards the all-zero case
    }
}

TEST_CASE("error versus codebook size") {
    ManifoldSpec spec;
    spec.kind = ManifoldKind::LinearSubspace;
    spec.d = 2;
    spec.D = 30;
    spec.n = 2000;
    spec.noise_sigma = noise_sigma_for_eps(2, 30, 0.005);
    spec.seed = 61;
    const PointSet s = generate(spec);

    BuildParams params;
    params.min_size = 2;
    params.seed = 5;
    const ErrorCurve curve = error_vs_k(s, 6, 3, params);

    REQUIRE(curve.k.size() == 7);
    CHECK(curve.k[0] == doctest::Approx(1.0));
    CHECK(curve.error[0] == doctest::Approx(avg_sq_diameter(s) / 2.0).epsilon(1e-9));
    for (std::size_t l = 1; l < curve.error.size(); ++l) {
        CHECK(curve.error[l] <= curve.error[l - 1] * (1 + 1e-12));
        CHECK(curve.k[l] > curve.k[l - 1]);
    }
    CHECK(curve.slope < 0.0);

    // Same parameters reproduce the same curve.
    const ErrorCurve again = error_vs_k(s, 6, 3, params);
    CHECK(again.slope == curve.slope);
    CHECK(again.error == curve.error);

    // Lower intrinsic dimension decays faster at matched ambient dimension.
    ManifoldSpec spec8 = spec;
    spec8.d = 8;
    spec8.noise_sigma = noise_sigma_for_eps(8, 30, 0.005);
    const ErrorCurve curve8 = error_vs_k(generate(spec8), 6, 3, params);
    CHECK(curve.slope < curve8.slope);
}
