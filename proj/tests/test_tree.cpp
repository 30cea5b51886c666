#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <map>
#include <set>

#include <json.hpp>

#include "oracles.hpp"
#include "rpquant/errors.hpp"
#include "rpquant/stats.hpp"
#include "rpquant/tree.hpp"

using namespace rpquant;

namespace {

PointSet column(std::initializer_list<double> values) {
    PointSet points(static_cast<Index>(values.size()), 1);
    Index i = 0;
    for (double v : values) points(i++, 0) = v;
    return points;
}

PointSet gaussian_cloud(Index n, Index d, SplitRng& rng, double scale = 1.0) {
    PointSet points(n, d);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < d; ++j) points(i, j) = scale * rng.next_gaussian();
    return points;
}

void collect_leaf_counts(const RpTreeNode& node, std::map<int, Index>& counts) {
    if (node.is_leaf()) {
        counts[node.leaf_id] = node.count;
        return;
    }
    collect_leaf_counts(*node.left, counts);
    collect_leaf_counts(*node.right, counts);
}

} // namespace

TEST_CASE("choose_rule branch selection") {
    SplitRng rng(1);

    SUBCASE("two distinct points take a projection split with p = 1/2") {
        PointSet s(2, 3);
        s << 0, 0, 0, 1, 2, 2;
        const auto res = choose_rule(s, 10.0, rng);
        CHECK(rule_kind(res.rule) == SplitKind::Projection);
        CHECK(res.outcome.p == doctest::Approx(0.5));
        CHECK(res.left_rows.size() == 1);
        CHECK(res.right_rows.size() == 1);
    }

    SUBCASE("heavy outlier forces a distance split") {
        PointSet s = PointSet::Zero(100, 2);
        s(99, 0) = 100.0;
        // Confirm the branch condition with the independent pairwise oracle.
        const double ad = oracles::pairwise_avg_sq_diameter(s);
        const double diam = oracles::naive_diameter(s);
        REQUIRE(diam * diam > 10.0 * ad);
        const auto res = choose_rule(s, 10.0, rng);
        CHECK(rule_kind(res.rule) == SplitKind::Distance);
        CHECK(res.left_rows.size() == 99);
        CHECK(res.right_rows.size() == 1);
        // Weighted child squared diameter under the stated deterministic factor.
        const double weighted = res.outcome.p * res.outcome.child_delta_sq[0] +
                                (1 - res.outcome.p) * res.outcome.child_delta_sq[1];
        CHECK(weighted <= (0.5 + 2.0 / 10.0) * res.outcome.parent_delta_sq);
    }

    SUBCASE("identical points cannot be split") {
        PointSet s = PointSet::Constant(8, 2, 3.0);
        CHECK_THROWS_AS(choose_rule(s, 10.0, rng), DegenerateCellError);
    }

    CHECK_THROWS_AS(choose_rule(PointSet::Zero(1, 2), 10.0, rng), InvalidParamError);
    CHECK_THROWS_AS(choose_rule(PointSet::Zero(4, 2), 3.0, rng), InvalidParamError);
}

TEST_CASE("build base cases") {
    SUBCASE("tiny set becomes a single leaf holding the mean") {
        const PointSet s = column({1, 2, 6});
        BuildParams params;
        params.min_size = 10;
        params.seed = 3;
        const RpTree tree = RpTree::build(s, params);
        CHECK(tree.leaf_count() == 1);
        CHECK(tree.root().is_leaf());
        CHECK(tree.root().codeword[0] == doctest::Approx(3.0));
        const auto r = tree.route(Vector{{100.0}});
        CHECK(r.leaf_id == tree.root().leaf_id);
    }

    SUBCASE("well-separated points split down to singletons") {
        const int levels = 4;
        const Index n = 1 << levels;
        SplitRng rng(9);
        PointSet s(n, 3);
        for (Index i = 0; i < n; ++i) {
            for (Index j = 0; j < 3; ++j) s(i, j) = 0.01 * rng.next_gaussian();
            s(i, 0) += 1000.0 * static_cast<double>(i);
        }
        BuildParams params;
        params.min_size = 1;
        params.max_levels = levels;
        params.seed = 5;
        const RpTree tree = RpTree::build(s, params);
        CHECK(tree.leaf_count() == static_cast<int>(n));
        CHECK(tree.quantization_error(s) == doctest::Approx(0.0));

        // Each training point lands in its own leaf.
        std::set<int> seen;
        for (Index i = 0; i < n; ++i) {
            const auto r = tree.route(s.row(i).transpose());
            CHECK(r.count == 1);
            CHECK((*r.codeword - s.row(i).transpose()).norm() == doctest::Approx(0.0));
            seen.insert(r.leaf_id);
        }
        CHECK(seen.size() == static_cast<std::size_t>(n));
    }

    SUBCASE("empty input and bad parameters") {
        CHECK_THROWS_AS(RpTree::build(PointSet(0, 2), BuildParams{}), EmptySetError);
        BuildParams bad;
        bad.c = 4.0;
        CHECK_THROWS_AS(RpTree::build(column({1, 2}), bad), InvalidParamError);
        BuildParams bad2;
        bad2.min_size = 0;
        CHECK_THROWS_AS(RpTree::build(column({1, 2}), bad2), InvalidParamError);
    }
}

TEST_CASE("quantization error identities") {
    SplitRng rng(21);

    SUBCASE("single-leaf tree gives half the average squared diameter") {
        const PointSet s = gaussian_cloud(40, 4, rng);
        BuildParams params;
        params.max_levels = 0;
        const RpTree tree = RpTree::build(s, params);
        CHECK(tree.quantization_error(s) ==
              doctest::Approx(avg_sq_diameter(s) / 2.0).epsilon(1e-12));
    }

    SUBCASE("hand-checked two-leaf split") {
        const PointSet s = column({0, 2, 10, 12});
        BuildParams params;
        params.min_size = 2;
        params.max_levels = 1;
        params.seed = 1;
        const RpTree tree = RpTree::build(s, params);
        REQUIRE(tree.leaf_count() == 2);
        CHECK(tree.quantization_error(s) == doctest::Approx(1.0).epsilon(1e-12));
    }

    SUBCASE("training error equals the weighted per-leaf identity") {
        const PointSet s = gaussian_cloud(300, 6, rng);
        BuildParams params;
        params.min_size = 8;
        params.seed = 17;
        const RpTree tree = RpTree::build(s, params);
        const double routed = tree.quantization_error(s);
        const double from_stats = truncated_slice(tree, 1000).training_error;
        CHECK(oracles::rel_gap(routed, from_stats) <= 1e-9);
    }
}

TEST_CASE("per-split invariants on random builds") {
    SplitRng rng(33);
    for (int rep = 0; rep < 6; ++rep) {
        SplitRng local = rng.child(static_cast<std::uint64_t>(rep));
        const Index n = 150 + static_cast<Index>(local.next_below(250));
        const Index dim = 2 + static_cast<Index>(local.next_below(7));
        PointSet s = gaussian_cloud(n, dim, local);
        // Salt with occasional outliers so distance splits occur too.
        for (Index i = 0; i < n / 40; ++i)
            s.row(static_cast<Index>(local.next_below(static_cast<std::uint64_t>(n)))) *= 40.0;

        BuildParams params;
        params.min_size = 6;
        params.seed = local.next_u64();
        const RpTree tree = RpTree::build(s, params);

        // Partition property: leaf counts sum to n and match routed counts.
        std::map<int, Index> counts;
        collect_leaf_counts(tree.root(), counts);
        Index total = 0;
        for (const auto& [id, c] : counts) total += c;
        CHECK(total == n);
        std::map<int, Index> routed;
        for (Index i = 0; i < n; ++i) routed[tree.route(s.row(i).transpose()).leaf_id] += 1;
        CHECK(routed == counts);

        for (const auto& e : split_quality_report(tree)) {
            CHECK(e.decrease_identity_rel_err <= 1e-9);
            CHECK(e.rel_avg_diameter_decrease >= -1e-12);
            if (e.kind == SplitKind::Distance && e.deltas_exact) CHECK(e.distance_bound_ok);
        }

        // Weighted child diameters never exceed the parent's, at every split.
        const std::function<void(const RpTreeNode&)> walk = [&](const RpTreeNode& node) {
            if (node.is_leaf()) return;
            const SplitOutcome& o = *node.outcome;
            if (o.parent_delta_is_exact && o.child_delta_is_exact[0] && o.child_delta_is_exact[1]) {
                const double mixed = o.p * std::sqrt(o.child_delta_sq[0]) +
                                     (1 - o.p) * std::sqrt(o.child_delta_sq[1]);
                CHECK(mixed <= std::sqrt(o.parent_delta_sq) * (1 + 1e-12));
            }
            walk(*node.left);
            walk(*node.right);
        };
        walk(tree.root());
    }
}

TEST_CASE("median split balance on continuous data") {
    SplitRng rng(55);
    for (int rep = 0; rep < 20; ++rep) {
        SplitRng local = rng.child(static_cast<std::uint64_t>(rep));
        const Index n = 2 + static_cast<Index>(local.next_below(400));
        const PointSet s = gaussian_cloud(n, 5, local);
        const auto res = choose_rule(s, 10.0, local);
        if (rule_kind(res.rule) == SplitKind::Projection)
            CHECK(std::abs(res.outcome.p - 0.5) <= 0.5 / static_cast<double>(n) + 1e-12);
    }
}

TEST_CASE("weighted child diameters never exceed the parent") {
    SplitRng rng(66);
    for (int rep = 0; rep < 10; ++rep) {
        SplitRng local = rng.child(static_cast<std::uint64_t>(rep));
        const PointSet s = oracles::random_point_set(local, 200, 5, 20);
        const auto res = choose_rule(s, 10.0, local);
        const double parent = std::sqrt(res.outcome.parent_delta_sq);
        const double mixed = res.outcome.p * std::sqrt(res.outcome.child_delta_sq[0]) +
                             (1 - res.outcome.p) * std::sqrt(res.outcome.child_delta_sq[1]);
        CHECK(mixed <= parent * (1 + 1e-12));
    }
}

TEST_CASE("determinism and thread-count independence") {
    SplitRng rng(77);
    const PointSet s = gaussian_cloud(500, 8, rng);
    BuildParams params;
    params.min_size = 5;
    params.seed = 12345;

    const RpTree t1 = RpTree::build(s, params);
    const RpTree t2 = RpTree::build(s, params);
    CHECK(t1.to_json() == t2.to_json());

    BuildParams threaded = params;
    threaded.threads = 4;
    const RpTree t3 = RpTree::build(s, threaded);
    CHECK(t1.to_json() == t3.to_json());

    BuildParams other = params;
    other.seed = 54321;
    CHECK(t1.to_json() != RpTree::build(s, other).to_json());
}

TEST_CASE("shared directions per level") {
    SplitRng rng(88);
    const PointSet s = gaussian_cloud(400, 10, rng);
    BuildParams params;
    params.min_size = 5;
    params.seed = 7;
    params.shared_per_level = true;
    const RpTree tree = RpTree::build(s, params);

    // Every split at one depth uses the same direction vector.
    std::map<int, Vector> dir_at_depth;
    const std::function<void(const RpTreeNode&, int)> walk = [&](const RpTreeNode& node, int depth) {
        if (node.is_leaf()) return;
        const Vector* dir = nullptr;
        if (const auto* p = std::get_if<ProjectionRule>(node.rule.get())) dir = &p->direction;
        if (const auto* p = std::get_if<ProjectedDistanceRule>(node.rule.get())) dir = &p->direction;
        REQUIRE(dir != nullptr); // plain distance rules do not appear in shared mode
        const auto [it, fresh] = dir_at_depth.try_emplace(depth, *dir);
        if (!fresh) CHECK(it->second == *dir);
        walk(*node.left, depth + 1);
        walk(*node.right, depth + 1);
    };
    walk(tree.root(), 0);

    // Partition property still holds.
    std::map<int, Index> counts;
    collect_leaf_counts(tree.root(), counts);
    Index total = 0;
    for (const auto& [id, c] : counts) total += c;
    CHECK(total == s.rows());
    for (const auto& e : split_quality_report(tree)) CHECK(e.decrease_identity_rel_err <= 1e-9);
}

TEST_CASE("mean threshold option still partitions correctly") {
    SplitRng rng(99);
    const PointSet s = gaussian_cloud(300, 4, rng);
    BuildParams params;
    params.threshold = ThresholdKind::Mean;
    params.min_size = 10;
    params.seed = 2;
    const RpTree tree = RpTree::build(s, params);
    std::map<int, Index> counts;
    collect_leaf_counts(tree.root(), counts);
    Index total = 0;
    for (const auto& [id, c] : counts) total += c;
    CHECK(total == s.rows());
    CHECK(oracles::rel_gap(tree.quantization_error(s), truncated_slice(tree, 1 << 20).training_error) <= 1e-9);
}

TEST_CASE("serialization") {
    SplitRng rng(111);
    const PointSet s = gaussian_cloud(300, 6, rng);
    BuildParams params;
    params.min_size = 8;
    params.seed = 31;
    const RpTree tree = RpTree::build(s, params);

    SUBCASE("round trip preserves the document and the routing") {
        const std::string text = tree.to_json();
        const RpTree loaded = RpTree::from_json(text);
        CHECK(loaded.to_json() == text);
        CHECK(loaded.leaf_count() == tree.leaf_count());
        for (int q = 0; q < 500; ++q) {
            Vector x(6);
            for (Index j = 0; j < 6; ++j) x[j] = 6.0 * rng.next_double() - 3.0;
            const auto a = tree.route(x);
            const auto b = loaded.route(x);
            CHECK(a.leaf_id == b.leaf_id);
            CHECK(*a.codeword == *b.codeword);
        }
    }

    SUBCASE("truncated document is rejected") {
        const std::string text = tree.to_json();
        CHECK_THROWS_AS(RpTree::from_json(text.substr(0, text.size() / 2)), CorruptInputError);
    }

    SUBCASE("unknown schema version is rejected") {
        nlohmann::json j = nlohmann::json::parse(tree.to_json());
        j["schema_version"] = 99;
        CHECK_THROWS_AS(RpTree::from_json(j.dump()), SchemaMismatchError);
    }

    SUBCASE("missing fields are corrupt") {
        nlohmann::json j = nlohmann::json::parse(tree.to_json());
        j.erase("root");
        CHECK_THROWS_AS(RpTree::from_json(j.dump()), CorruptInputError);
    }
}

TEST_CASE("uniform scaling carries through replayed rules") {
    SplitRng rng(222);
    const PointSet s = gaussian_cloud(250, 5, rng);
    BuildParams params;
    params.min_size = 10;
    params.seed = 77;
    const RpTree tree = RpTree::build(s, params);
    const double base_error = tree.quantization_error(s);

    const double scale = 4.0; // power of two: scaling commutes exactly with rounding
    nlohmann::json j = nlohmann::json::parse(tree.to_json());
    const std::function<void(nlohmann::json&)> rescale = [&](nlohmann::json& node) {
        if (node.at("kind") == "leaf") {
            for (auto& v : node.at("codeword")) v = v.get<double>() * scale;
        } else {
            auto& rule = node.at("rule");
            const std::string type = rule.at("type");
            if (type == "projection") {
                rule["threshold"] = rule.at("threshold").get<double>() * scale;
            } else if (type == "distance") {
                for (auto& v : rule.at("center")) v = v.get<double>() * scale;
                rule["radius_threshold"] = rule.at("radius_threshold").get<double>() * scale;
            } else {
                rule["center"] = rule.at("center").get<double>() * scale;
                rule["radius_threshold"] = rule.at("radius_threshold").get<double>() * scale;
            }
            for (auto& child : node.at("children")) rescale(child);
        }
    };
    rescale(j.at("root"));
    const RpTree scaled = RpTree::from_json(j.dump());

    const PointSet s_scaled = scale * s;
    // Same partition under the replayed rules...
    for (Index i = 0; i < s.rows(); ++i)
        CHECK(scaled.route(s_scaled.row(i).transpose()).leaf_id ==
              tree.route(s.row(i).transpose()).leaf_id);
    // ...so the error scales by the squared factor.
    CHECK(oracles::rel_gap(scaled.quantization_error(s_scaled), scale * scale * base_error) <= 1e-9);
}
