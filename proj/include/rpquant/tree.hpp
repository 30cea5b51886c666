#ifndef RPQUANT_TREE_HPP
#define RPQUANT_TREE_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rpquant/projection.hpp"
#include "rpquant/rng.hpp"
#include "rpquant/types.hpp"

namespace rpquant {

// ---------------------------------------------------------------------------
// Split rules
// ---------------------------------------------------------------------------

/// Routes left when x . direction <= threshold.
struct ProjectionRule {
    Vector direction;
    double threshold = 0.0;
};

/// Routes left when ||x - center|| <= radius_threshold.
struct DistanceRule {
    Vector center;
    double radius_threshold = 0.0;
};

/// Distance split reworked for the shared-direction build mode: routes left
/// when |x . direction - center| <= radius_threshold.
struct ProjectedDistanceRule {
    Vector direction;
    double center = 0.0;
    double radius_threshold = 0.0;
};

using SplitRule = std::variant<ProjectionRule, DistanceRule, ProjectedDistanceRule>;

enum class SplitKind { Projection, Distance, ProjectedDistance };

SplitKind rule_kind(const SplitRule& rule);
bool rule_goes_left(const SplitRule& rule, const Eigen::Ref<const Vector>& x);

// ---------------------------------------------------------------------------
// Per-cell bookkeeping
// ---------------------------------------------------------------------------

struct CellStats {
    Index n_cell = 0;
    double delta_sq = 0.0; ///< squared diameter, exact for cells up to the cutoff
    bool delta_is_exact = true;
    double delta_a_sq = 0.0; ///< average squared interpoint distance
    Vector mean;
    double radius = 0.0; ///< max distance from the cell mean
};

struct SplitOutcome {
    SplitKind kind = SplitKind::Projection;
    double p = 0.0; ///< left-child fraction |S1|/|S|
    double parent_delta_a_sq = 0.0;
    double parent_delta_sq = 0.0;
    bool parent_delta_is_exact = true;
    double child_delta_a_sq[2] = {0.0, 0.0};
    double child_delta_sq[2] = {0.0, 0.0};
    bool child_delta_is_exact[2] = {true, true};
    Vector mu1, mu2; ///< child means
    std::optional<double> mu1_tilde, mu2_tilde; ///< projected child means, when the split projects
    double decrease = 0.0; ///< 2 p (1-p) ||mu1 - mu2||^2
};

struct RpTreeNode {
    std::optional<CellStats> stats; ///< present when built with keep_stats

    // Internal nodes
    std::unique_ptr<SplitRule> rule;
    std::unique_ptr<RpTreeNode> left, right;
    std::optional<SplitOutcome> outcome;

    // Leaves
    Vector codeword; ///< mean of the training points routed here
    Index count = 0;
    int leaf_id = -1;

    bool is_leaf() const { return rule == nullptr; }
};

// ---------------------------------------------------------------------------
// Construction parameters
// ---------------------------------------------------------------------------

enum class ThresholdKind { Median, Mean };

struct BuildParams {
    double c = 10.0; ///< diameter-vs-average-diameter branch constant; must exceed 4
    Index min_size = 10;
    int max_levels = -1; ///< -1 derives ceil(log2(n / min_size))
    bool shared_per_level = false;
    std::uint64_t seed = 0;
    DirectionKind direction_kind = DirectionKind::Gaussian;
    ThresholdKind threshold = ThresholdKind::Median;
    bool keep_stats = true;
    int threads = 1;
};

struct ChooseRuleOptions {
    DirectionKind direction_kind = DirectionKind::Gaussian;
    ThresholdKind threshold = ThresholdKind::Median;
    /// When set, the projection direction is not sampled (shared-level mode);
    /// the distance branch also operates in this projected space.
    std::optional<Direction> forced_direction;
};

struct ChooseRuleResult {
    SplitRule rule;
    SplitOutcome outcome;
    std::vector<Index> left_rows, right_rows; ///< row indices of the induced partition
    CellStats child_stats[2];
};

/// Pick a split for one cell: a projection split at the threshold of the
/// projected values when the squared diameter is at most c times the average
/// squared interpoint distance, otherwise a distance split at the median
/// distance from the mean. Throws DegenerateCellError when no rule separates
/// the cell (the caller makes a leaf).
ChooseRuleResult choose_rule(const Eigen::Ref<const PointSet>& cell, double c, SplitRng& rng,
                             const ChooseRuleOptions& options = {});

// ---------------------------------------------------------------------------
// The tree
// ---------------------------------------------------------------------------

class RpTree {
public:
    static RpTree build(const Eigen::Ref<const PointSet>& points, BuildParams params);

    const RpTreeNode& root() const { return *root_; }
    const BuildParams& params() const { return params_; }
    Index dim() const { return dim_; }
    Index n_train() const { return n_train_; }
    int leaf_count() const { return leaf_count_; }
    int depth() const { return depth_; }

    struct RouteResult {
        int leaf_id = -1;
        const Vector* codeword = nullptr;
        Index count = 0;
    };
    RouteResult route(const Eigen::Ref<const Vector>& x) const;

    /// Mean squared distance from each row to the codeword of its routed leaf.
    double quantization_error(const Eigen::Ref<const PointSet>& points) const;

    std::string to_json(int indent = -1) const;
    static RpTree from_json(const std::string& text);

private:
    RpTree() = default;
    std::unique_ptr<RpTreeNode> root_;
    BuildParams params_;
    Index dim_ = 0;
    Index n_train_ = 0;
    int leaf_count_ = 0;
    int depth_ = 0;
};

// ---------------------------------------------------------------------------
// Evaluation helpers
// ---------------------------------------------------------------------------

struct LevelSlice {
    int level = 0;
    Index cells = 0;          ///< nodes acting as leaves when the tree is cut at `level`
    double training_error = 0.0; ///< mean squared training distortion of the cut
};

/// Evaluate the tree as if truncated at the given depth, using each cut
/// node's mean as its codeword. Requires stats retention.
LevelSlice truncated_slice(const RpTree& tree, int level);

struct SplitReportEntry {
    SplitKind kind = SplitKind::Projection;
    int depth = 0;
    double p = 0.0;
    double parent_delta_sq = 0.0;
    double weighted_child_delta_sq = 0.0;
    bool deltas_exact = true;
    double distance_bound_factor = 0.0; ///< 1/2 + 2/c
    bool distance_bound_ok = true;      ///< checked for distance splits with exact diameters
    double parent_delta_a_sq = 0.0;
    double weighted_child_delta_a_sq = 0.0;
    double rel_avg_diameter_decrease = 0.0;
    double decrease_identity_rel_err = 0.0; ///< gap between the stats drop and 2p(1-p)||mu1-mu2||^2
};

/// Per-split audit of every internal node. Requires stats retention.
std::vector<SplitReportEntry> split_quality_report(const RpTree& tree);

} // namespace rpquant

#endif
