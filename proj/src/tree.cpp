#include "rpquant/tree.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>
#include <utility>

#include <json.hpp>

#include "rpquant/errors.hpp"
#include "rpquant/stats.hpp"

namespace rpquant {

using json = nlohmann::ordered_json;

SplitKind rule_kind(const SplitRule& rule) {
    if (std::holds_alternative<ProjectionRule>(rule)) return SplitKind::Projection;
    if (std::holds_alternative<DistanceRule>(rule)) return SplitKind::Distance;
    return SplitKind::ProjectedDistance;
}

namespace {

// Rule predicates run this fixed-order scalar arithmetic on both the build
// and the routing side, so a training point lying exactly on a threshold
// (the median element always does) lands on the same side in both.
double strict_dot(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b) {
    double s = 0.0;
    for (Index i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double strict_dist(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b) {
    double s = 0.0;
    for (Index i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

} // namespace

bool rule_goes_left(const SplitRule& rule, const Eigen::Ref<const Vector>& x) {
    return std::visit(
        [&](const auto& r) -> bool {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, ProjectionRule>) {
                if (x.size() != r.direction.size())
                    throw DimensionMismatchError("rule_goes_left: dimension mismatch");
                return strict_dot(x, r.direction) <= r.threshold;
            } else if constexpr (std::is_same_v<T, DistanceRule>) {
                if (x.size() != r.center.size())
                    throw DimensionMismatchError("rule_goes_left: dimension mismatch");
                return strict_dist(x, r.center) <= r.radius_threshold;
            } else {
                if (x.size() != r.direction.size())
                    throw DimensionMismatchError("rule_goes_left: dimension mismatch");
                return std::abs(strict_dot(x, r.direction) - r.center) <= r.radius_threshold;
            }
        },
        rule);
}

namespace {

constexpr Index kExactDiameterCutoff = 2048;

CellStats compute_cell_stats(const Eigen::Ref<const PointSet>& cell) {
    CellStats s;
    s.n_cell = cell.rows();
    s.mean = cell.colwise().mean().transpose();
    const Vector sq = (cell.rowwise() - s.mean.transpose()).rowwise().squaredNorm();
    s.radius = std::sqrt(sq.maxCoeff());
    s.delta_a_sq = 2.0 * sq.mean();
    if (s.n_cell <= kExactDiameterCutoff) {
        const DiameterResult d = diameter(cell, DiameterMode::Exact);
        s.delta_sq = d.value * d.value;
        s.delta_is_exact = true;
    } else {
        s.delta_sq = 4.0 * s.radius * s.radius;
        s.delta_is_exact = false;
    }
    return s;
}

PointSet gather_rows(const Eigen::Ref<const PointSet>& points, const std::vector<Index>& rows) {
    PointSet out(static_cast<Index>(rows.size()), points.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Index>(i)) = points.row(rows[i]);
    return out;
}

double lower_median(Vector values) {
    const Index n = values.size();
    std::nth_element(values.data(), values.data() + (n - 1) / 2, values.data() + n);
    return values[(n - 1) / 2];
}

double split_threshold(const Vector& values, ThresholdKind kind) {
    return kind == ThresholdKind::Median ? lower_median(values) : values.mean();
}

struct Partition {
    std::vector<Index> left, right;
};

Partition partition_by_values(const Vector& values, double threshold) {
    Partition p;
    for (Index i = 0; i < values.size(); ++i) {
        if (values[i] <= threshold) p.left.push_back(i);
        else p.right.push_back(i);
    }
    return p;
}

ChooseRuleResult finish_split(const Eigen::Ref<const PointSet>& cell, const CellStats& stats,
                              SplitRule rule, SplitKind kind, Partition parts,
                              std::optional<double> mu1_tilde, std::optional<double> mu2_tilde) {
    ChooseRuleResult res;
    res.rule = std::move(rule);
    res.left_rows = std::move(parts.left);
    res.right_rows = std::move(parts.right);
    res.child_stats[0] = compute_cell_stats(gather_rows(cell, res.left_rows));
    res.child_stats[1] = compute_cell_stats(gather_rows(cell, res.right_rows));

    SplitOutcome& o = res.outcome;
    o.kind = kind;
    o.p = static_cast<double>(res.left_rows.size()) / static_cast<double>(cell.rows());
    o.parent_delta_a_sq = stats.delta_a_sq;
    o.parent_delta_sq = stats.delta_sq;
    o.parent_delta_is_exact = stats.delta_is_exact;
    for (int k = 0; k < 2; ++k) {
        o.child_delta_a_sq[k] = res.child_stats[k].delta_a_sq;
        o.child_delta_sq[k] = res.child_stats[k].delta_sq;
        o.child_delta_is_exact[k] = res.child_stats[k].delta_is_exact;
    }
    o.mu1 = res.child_stats[0].mean;
    o.mu2 = res.child_stats[1].mean;
    o.mu1_tilde = mu1_tilde;
    o.mu2_tilde = mu2_tilde;
    o.decrease = 2.0 * o.p * (1.0 - o.p) * (o.mu1 - o.mu2).squaredNorm();
    return res;
}

ChooseRuleResult choose_rule_impl(const Eigen::Ref<const PointSet>& cell, const CellStats& stats,
                                  double c, SplitRng& rng, const ChooseRuleOptions& options) {
    if (stats.delta_a_sq <= 0.0)
        throw DegenerateCellError("choose_rule: all points in the cell are identical");

    const bool shared = options.forced_direction.has_value();

    const auto strict_projection = [&cell](const Vector& direction) {
        Vector values(cell.rows());
        for (Index i = 0; i < cell.rows(); ++i)
            values[i] = strict_dot(cell.row(i).transpose(), direction);
        return values;
    };

    const auto try_distance = [&]() -> ChooseRuleResult {
        if (shared) {
            const Direction& dir = *options.forced_direction;
            const Vector values = strict_projection(dir.vector);
            const double center = values.mean();
            const Vector dist = (values.array() - center).abs();
            const double thr = lower_median(dist);
            Partition parts = partition_by_values(dist, thr);
            if (parts.right.empty())
                throw DegenerateCellError("choose_rule: projected distance split is degenerate");
            const auto part_mean = [&](const std::vector<Index>& rows) {
                double s = 0.0;
                for (Index i : rows) s += values[i];
                return s / static_cast<double>(rows.size());
            };
            const double m1 = part_mean(parts.left), m2 = part_mean(parts.right);
            return finish_split(cell, stats,
                                ProjectedDistanceRule{dir.vector, center, thr},
                                SplitKind::ProjectedDistance, std::move(parts), m1, m2);
        }
        Vector dist(cell.rows());
        for (Index i = 0; i < cell.rows(); ++i)
            dist[i] = strict_dist(cell.row(i).transpose(), stats.mean);
        const double thr = lower_median(dist);
        Partition parts = partition_by_values(dist, thr);
        if (parts.right.empty())
            throw DegenerateCellError("choose_rule: distance split is degenerate");
        return finish_split(cell, stats, DistanceRule{stats.mean, thr}, SplitKind::Distance,
                            std::move(parts), std::nullopt, std::nullopt);
    };

    if (stats.delta_sq <= c * stats.delta_a_sq) {
        const Direction dir = shared ? *options.forced_direction
                                     : sample_direction(cell.cols(), options.direction_kind, rng);
        const Vector values = strict_projection(dir.vector);
        const double thr = split_threshold(values, options.threshold);
        Partition parts = partition_by_values(values, thr);
        if (!parts.right.empty()) {
            const auto part_mean = [&](const std::vector<Index>& rows) {
                double s = 0.0;
                for (Index i : rows) s += values[i];
                return s / static_cast<double>(rows.size());
            };
            const double m1 = part_mean(parts.left), m2 = part_mean(parts.right);
            return finish_split(cell, stats, ProjectionRule{dir.vector, thr},
                                SplitKind::Projection, std::move(parts), m1, m2);
        }
        // All projections tied at the threshold: fall back to a distance split.
        return try_distance();
    }
    return try_distance();
}

} // namespace

ChooseRuleResult choose_rule(const Eigen::Ref<const PointSet>& cell, double c, SplitRng& rng,
                             const ChooseRuleOptions& options) {
    if (cell.rows() < 2) throw InvalidParamError("choose_rule: cell must hold at least 2 points");
    if (!(c > 4.0)) throw InvalidParamError("choose_rule: c must exceed 4");
    const CellStats stats = compute_cell_stats(cell);
    return choose_rule_impl(cell, stats, c, rng, options);
}

// ---------------------------------------------------------------------------
// Construction
// ---------------------------------------------------------------------------

namespace {

struct Builder {
    const Eigen::Ref<const PointSet>& points;
    const BuildParams& params;
    int max_levels;
    std::vector<Direction> level_dirs; // shared-per-level mode

    std::unique_ptr<RpTreeNode> run(std::vector<Index> rows, int depth, SplitRng rng,
                                    std::optional<CellStats> precomputed, int thread_budget) const {
        auto node = std::make_unique<RpTreeNode>();
        const PointSet cell = gather_rows(points, rows);
        const CellStats stats = precomputed ? std::move(*precomputed) : compute_cell_stats(cell);

        const auto make_leaf = [&]() {
            node->codeword = stats.mean;
            node->count = stats.n_cell;
            if (params.keep_stats) node->stats = stats;
        };

        if (stats.n_cell < params.min_size || stats.n_cell < 2 || depth == max_levels) {
            make_leaf();
            return node;
        }

        ChooseRuleOptions options;
        options.direction_kind = params.direction_kind;
        options.threshold = params.threshold;
        if (params.shared_per_level) options.forced_direction = level_dirs[static_cast<std::size_t>(depth)];

        SplitRng node_rng = rng;
        ChooseRuleResult split;
        try {
            split = choose_rule_impl(cell, stats, params.c, node_rng, options);
        } catch (const DegenerateCellError&) {
            make_leaf();
            return node;
        }

        std::vector<Index> left_rows, right_rows;
        left_rows.reserve(split.left_rows.size());
        right_rows.reserve(split.right_rows.size());
        for (Index i : split.left_rows) left_rows.push_back(rows[static_cast<std::size_t>(i)]);
        for (Index i : split.right_rows) right_rows.push_back(rows[static_cast<std::size_t>(i)]);

        node->rule = std::make_unique<SplitRule>(std::move(split.rule));
        if (params.keep_stats) {
            node->stats = stats;
            node->outcome = split.outcome;
        }

        if (thread_budget > 1) {
            const int left_budget = thread_budget / 2;
            auto fut = std::async(std::launch::async, [&, lr = std::move(left_rows)]() mutable {
                return run(std::move(lr), depth + 1, rng.child(0), std::move(split.child_stats[0]),
                           left_budget);
            });
            node->right = run(std::move(right_rows), depth + 1, rng.child(1),
                              std::move(split.child_stats[1]), thread_budget - left_budget);
            node->left = fut.get();
        } else {
            node->left = run(std::move(left_rows), depth + 1, rng.child(0),
                             std::move(split.child_stats[0]), 1);
            node->right = run(std::move(right_rows), depth + 1, rng.child(1),
                              std::move(split.child_stats[1]), 1);
        }
        return node;
    }
};

void finalize(RpTreeNode& node, int depth, int& next_leaf_id, int& max_depth) {
    max_depth = std::max(max_depth, depth);
    if (node.is_leaf()) {
        node.leaf_id = next_leaf_id++;
        return;
    }
    finalize(*node.left, depth + 1, next_leaf_id, max_depth);
    finalize(*node.right, depth + 1, next_leaf_id, max_depth);
}

} // namespace

RpTree RpTree::build(const Eigen::Ref<const PointSet>& points, BuildParams params) {
    const Index n = points.rows();
    if (n == 0) throw EmptySetError("RpTree::build: empty point set");
    if (params.min_size < 1) throw InvalidParamError("RpTree::build: min_size must be >= 1");
    if (!(params.c > 4.0)) throw InvalidParamError("RpTree::build: c must exceed 4");
    if (params.threads < 1) throw InvalidParamError("RpTree::build: threads must be >= 1");
    if (params.max_levels < 0) {
        int levels = 0;
        while ((params.min_size << levels) < n) ++levels;
        params.max_levels = levels;
    }

    RpTree tree;
    tree.params_ = params;
    tree.dim_ = points.cols();
    tree.n_train_ = n;

    Builder builder{points, params, params.max_levels, {}};
    if (params.shared_per_level) {
        // One direction per level, drawn from a stream disjoint from the
        // per-node streams.
        SplitRng level_rng = SplitRng(params.seed).child(1);
        builder.level_dirs.reserve(static_cast<std::size_t>(params.max_levels));
        for (int l = 0; l < params.max_levels; ++l) {
            SplitRng r = level_rng.child(static_cast<std::uint64_t>(l));
            builder.level_dirs.push_back(sample_direction(points.cols(), params.direction_kind, r));
        }
    }

    std::vector<Index> rows(static_cast<std::size_t>(n));
    std::iota(rows.begin(), rows.end(), Index{0});
    tree.root_ = builder.run(std::move(rows), 0, SplitRng(params.seed).child(0), std::nullopt,
                             params.threads);

    int next_leaf = 0, max_depth = 0;
    finalize(*tree.root_, 0, next_leaf, max_depth);
    tree.leaf_count_ = next_leaf;
    tree.depth_ = max_depth;
    return tree;
}

RpTree::RouteResult RpTree::route(const Eigen::Ref<const Vector>& x) const {
    if (x.size() != dim_) throw DimensionMismatchError("RpTree::route: dimension mismatch");
    const RpTreeNode* node = root_.get();
    while (!node->is_leaf()) node = rule_goes_left(*node->rule, x) ? node->left.get() : node->right.get();
    return {node->leaf_id, &node->codeword, node->count};
}

double RpTree::quantization_error(const Eigen::Ref<const PointSet>& points) const {
    if (points.rows() == 0) throw EmptySetError("quantization_error: empty point set");
    if (points.cols() != dim_) throw DimensionMismatchError("quantization_error: dimension mismatch");
    double sum = 0.0;
    for (Index i = 0; i < points.rows(); ++i) {
        const RouteResult r = route(points.row(i).transpose());
        sum += (points.row(i).transpose() - *r.codeword).squaredNorm();
    }
    return sum / static_cast<double>(points.rows());
}

// ---------------------------------------------------------------------------
// Evaluation helpers
// ---------------------------------------------------------------------------

namespace {

void slice_walk(const RpTreeNode& node, int depth, int level, Index& cells, double& weighted_err) {
    if (!node.stats) throw InvalidParamError("truncated_slice: tree was built without stats");
    if (depth == level || node.is_leaf()) {
        cells += 1;
        weighted_err += static_cast<double>(node.stats->n_cell) * node.stats->delta_a_sq / 2.0;
        return;
    }
    slice_walk(*node.left, depth + 1, level, cells, weighted_err);
    slice_walk(*node.right, depth + 1, level, cells, weighted_err);
}

} // namespace

LevelSlice truncated_slice(const RpTree& tree, int level) {
    if (level < 0) throw InvalidParamError("truncated_slice: level must be >= 0");
    LevelSlice out;
    out.level = level;
    double weighted = 0.0;
    slice_walk(tree.root(), 0, level, out.cells, weighted);
    out.training_error = weighted / static_cast<double>(tree.n_train());
    return out;
}

namespace {

void report_walk(const RpTreeNode& node, int depth, double c, std::vector<SplitReportEntry>& out) {
    if (node.is_leaf()) return;
    if (!node.outcome) throw InvalidParamError("split_quality_report: tree was built without stats");
    const SplitOutcome& o = *node.outcome;

    SplitReportEntry e;
    e.kind = o.kind;
    e.depth = depth;
    e.p = o.p;
    e.parent_delta_sq = o.parent_delta_sq;
    e.weighted_child_delta_sq = o.p * o.child_delta_sq[0] + (1.0 - o.p) * o.child_delta_sq[1];
    e.deltas_exact =
        o.parent_delta_is_exact && o.child_delta_is_exact[0] && o.child_delta_is_exact[1];
    e.distance_bound_factor = 0.5 + 2.0 / c;
    e.distance_bound_ok = true;
    if (o.kind == SplitKind::Distance && e.deltas_exact)
        e.distance_bound_ok = e.weighted_child_delta_sq <=
                              e.distance_bound_factor * e.parent_delta_sq * (1.0 + 1e-12);
    e.parent_delta_a_sq = o.parent_delta_a_sq;
    e.weighted_child_delta_a_sq =
        o.p * o.child_delta_a_sq[0] + (1.0 - o.p) * o.child_delta_a_sq[1];
    e.rel_avg_diameter_decrease =
        (o.parent_delta_a_sq - e.weighted_child_delta_a_sq) / o.parent_delta_a_sq;
    const double lhs = o.parent_delta_a_sq - e.weighted_child_delta_a_sq;
    e.decrease_identity_rel_err =
        std::abs(lhs - o.decrease) / std::max({std::abs(lhs), std::abs(o.decrease), 1e-300});
    out.push_back(e);

    report_walk(*node.left, depth + 1, c, out);
    report_walk(*node.right, depth + 1, c, out);
}

} // namespace

std::vector<SplitReportEntry> split_quality_report(const RpTree& tree) {
    std::vector<SplitReportEntry> out;
    report_walk(tree.root(), 0, tree.params().c, out);
    return out;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace {

json vector_to_json(const Vector& v) {
    return json(std::vector<double>(v.data(), v.data() + v.size()));
}

Vector vector_from_json(const json& j) {
    const auto vals = j.get<std::vector<double>>();
    return Eigen::Map<const Vector>(vals.data(), static_cast<Index>(vals.size()));
}

json stats_to_json(const CellStats& s) {
    return json{{"n", s.n_cell},
                {"delta_sq", s.delta_sq},
                {"delta_exact", s.delta_is_exact},
                {"delta_a_sq", s.delta_a_sq},
                {"mean", vector_to_json(s.mean)},
                {"radius", s.radius}};
}

CellStats stats_from_json(const json& j) {
    CellStats s;
    s.n_cell = j.at("n").get<Index>();
    s.delta_sq = j.at("delta_sq").get<double>();
    s.delta_is_exact = j.at("delta_exact").get<bool>();
    s.delta_a_sq = j.at("delta_a_sq").get<double>();
    s.mean = vector_from_json(j.at("mean"));
    s.radius = j.at("radius").get<double>();
    return s;
}

const char* kind_name(SplitKind k) {
    switch (k) {
    case SplitKind::Projection: return "projection";
    case SplitKind::Distance: return "distance";
    case SplitKind::ProjectedDistance: return "projected_distance";
    }
    return "projection";
}

SplitKind kind_from_name(const std::string& s) {
    if (s == "projection") return SplitKind::Projection;
    if (s == "distance") return SplitKind::Distance;
    if (s == "projected_distance") return SplitKind::ProjectedDistance;
    throw CorruptInputError("tree json: unknown split kind '" + s + "'");
}

json rule_to_json(const SplitRule& rule) {
    return std::visit(
        [](const auto& r) -> json {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, ProjectionRule>) {
                return json{{"type", "projection"},
                            {"direction", vector_to_json(r.direction)},
                            {"threshold", r.threshold}};
            } else if constexpr (std::is_same_v<T, DistanceRule>) {
                return json{{"type", "distance"},
                            {"center", vector_to_json(r.center)},
                            {"radius_threshold", r.radius_threshold}};
            } else {
                return json{{"type", "projected_distance"},
                            {"direction", vector_to_json(r.direction)},
                            {"center", r.center},
                            {"radius_threshold", r.radius_threshold}};
            }
        },
        rule);
}

SplitRule rule_from_json(const json& j) {
    const auto type = j.at("type").get<std::string>();
    if (type == "projection")
        return ProjectionRule{vector_from_json(j.at("direction")), j.at("threshold").get<double>()};
    if (type == "distance")
        return DistanceRule{vector_from_json(j.at("center")), j.at("radius_threshold").get<double>()};
    if (type == "projected_distance")
        return ProjectedDistanceRule{vector_from_json(j.at("direction")), j.at("center").get<double>(),
                                     j.at("radius_threshold").get<double>()};
    throw CorruptInputError("tree json: unknown rule type '" + type + "'");
}

json outcome_to_json(const SplitOutcome& o) {
    json j{{"kind", kind_name(o.kind)},
           {"p", o.p},
           {"parent_delta_a_sq", o.parent_delta_a_sq},
           {"parent_delta_sq", o.parent_delta_sq},
           {"parent_delta_exact", o.parent_delta_is_exact},
           {"child_delta_a_sq", {o.child_delta_a_sq[0], o.child_delta_a_sq[1]}},
           {"child_delta_sq", {o.child_delta_sq[0], o.child_delta_sq[1]}},
           {"child_delta_exact", {o.child_delta_is_exact[0], o.child_delta_is_exact[1]}},
           {"mu1", vector_to_json(o.mu1)},
           {"mu2", vector_to_json(o.mu2)},
           {"decrease", o.decrease}};
    j["mu1_tilde"] = o.mu1_tilde ? json(*o.mu1_tilde) : json(nullptr);
    j["mu2_tilde"] = o.mu2_tilde ? json(*o.mu2_tilde) : json(nullptr);
    return j;
}

SplitOutcome outcome_from_json(const json& j) {
    SplitOutcome o;
    o.kind = kind_from_name(j.at("kind").get<std::string>());
    o.p = j.at("p").get<double>();
    o.parent_delta_a_sq = j.at("parent_delta_a_sq").get<double>();
    o.parent_delta_sq = j.at("parent_delta_sq").get<double>();
    o.parent_delta_is_exact = j.at("parent_delta_exact").get<bool>();
    for (int k = 0; k < 2; ++k) {
        o.child_delta_a_sq[k] = j.at("child_delta_a_sq").at(k).get<double>();
        o.child_delta_sq[k] = j.at("child_delta_sq").at(k).get<double>();
        o.child_delta_is_exact[k] = j.at("child_delta_exact").at(k).get<bool>();
    }
    o.mu1 = vector_from_json(j.at("mu1"));
    o.mu2 = vector_from_json(j.at("mu2"));
    if (!j.at("mu1_tilde").is_null()) o.mu1_tilde = j.at("mu1_tilde").get<double>();
    if (!j.at("mu2_tilde").is_null()) o.mu2_tilde = j.at("mu2_tilde").get<double>();
    o.decrease = j.at("decrease").get<double>();
    return o;
}

json node_to_json(const RpTreeNode& node) {
    json j;
    if (node.is_leaf()) {
        j["kind"] = "leaf";
        j["codeword"] = vector_to_json(node.codeword);
        j["count"] = node.count;
    } else {
        j["kind"] = "internal";
        j["rule"] = rule_to_json(*node.rule);
        if (node.outcome) j["outcome"] = outcome_to_json(*node.outcome);
        j["children"] = json::array({node_to_json(*node.left), node_to_json(*node.right)});
    }
    if (node.stats) j["stats"] = stats_to_json(*node.stats);
    return j;
}

std::unique_ptr<RpTreeNode> node_from_json(const json& j, Index dim) {
    auto node = std::make_unique<RpTreeNode>();
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "leaf") {
        node->codeword = vector_from_json(j.at("codeword"));
        if (node->codeword.size() != dim) throw CorruptInputError("tree json: codeword dimension mismatch");
        node->count = j.at("count").get<Index>();
    } else if (kind == "internal") {
        node->rule = std::make_unique<SplitRule>(rule_from_json(j.at("rule")));
        if (j.contains("outcome")) node->outcome = outcome_from_json(j.at("outcome"));
        const json& children = j.at("children");
        if (!children.is_array() || children.size() != 2)
            throw CorruptInputError("tree json: internal node must have two children");
        node->left = node_from_json(children.at(0), dim);
        node->right = node_from_json(children.at(1), dim);
    } else {
        throw CorruptInputError("tree json: unknown node kind '" + kind + "'");
    }
    if (j.contains("stats")) node->stats = stats_from_json(j.at("stats"));
    return node;
}

const char* direction_kind_name(DirectionKind k) {
    return k == DirectionKind::Gaussian ? "gaussian" : "unit_sphere";
}

const char* threshold_kind_name(ThresholdKind k) {
    return k == ThresholdKind::Median ? "median" : "mean";
}

} // namespace

std::string RpTree::to_json(int indent) const {
    json j;
    j["schema_version"] = 1;
    j["dim"] = dim_;
    j["n_train"] = n_train_;
    j["params"] = json{{"c", params_.c},
                       {"min_size", params_.min_size},
                       {"max_levels", params_.max_levels},
                       {"shared_per_level", params_.shared_per_level},
                       {"seed", params_.seed},
                       {"direction_kind", direction_kind_name(params_.direction_kind)},
                       {"threshold", threshold_kind_name(params_.threshold)},
                       {"keep_stats", params_.keep_stats}};
    j["root"] = node_to_json(*root_);
    return j.dump(indent);
}

RpTree RpTree::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw CorruptInputError(std::string("tree json: parse failure: ") + e.what());
    }
    try {
        if (!j.contains("schema_version")) throw CorruptInputError("tree json: missing schema_version");
        const auto version = j.at("schema_version").get<int>();
        if (version != 1)
            throw SchemaMismatchError("tree json: unsupported schema version " + std::to_string(version));

        RpTree tree;
        tree.dim_ = j.at("dim").get<Index>();
        tree.n_train_ = j.at("n_train").get<Index>();
        const json& p = j.at("params");
        tree.params_.c = p.at("c").get<double>();
        tree.params_.min_size = p.at("min_size").get<Index>();
        tree.params_.max_levels = p.at("max_levels").get<int>();
        tree.params_.shared_per_level = p.at("shared_per_level").get<bool>();
        tree.params_.seed = p.at("seed").get<std::uint64_t>();
        const auto dk = p.at("direction_kind").get<std::string>();
        if (dk == "gaussian") tree.params_.direction_kind = DirectionKind::Gaussian;
        else if (dk == "unit_sphere") tree.params_.direction_kind = DirectionKind::UnitSphere;
        else throw CorruptInputError("tree json: unknown direction kind '" + dk + "'");
        const auto tk = p.at("threshold").get<std::string>();
        if (tk == "median") tree.params_.threshold = ThresholdKind::Median;
        else if (tk == "mean") tree.params_.threshold = ThresholdKind::Mean;
        else throw CorruptInputError("tree json: unknown threshold kind '" + tk + "'");
        tree.params_.keep_stats = p.at("keep_stats").get<bool>();

        tree.root_ = node_from_json(j.at("root"), tree.dim_);
        int next_leaf = 0, max_depth = 0;
        finalize(*tree.root_, 0, next_leaf, max_depth);
        tree.leaf_count_ = next_leaf;
        tree.depth_ = max_depth;
        return tree;
    } catch (const json::exception& e) {
        throw CorruptInputError(std::string("tree json: malformed document: ") + e.what());
    }
}

} // namespace rpquant
