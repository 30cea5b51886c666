#ifndef RPQUANT_HARDNESS_HPP
#define RPQUANT_HARDNESS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rpquant/types.hpp"

namespace rpquant {

// ---------------------------------------------------------------------------
// CNF formulas
// ---------------------------------------------------------------------------

/// CNF formula as a clause list of signed 1-based variable indices.
struct CnfFormula {
    int num_vars = 0;
    std::vector<std::vector<int>> clauses;
};

/// Parse DIMACS CNF (`p cnf <vars> <clauses>` header, 0-terminated clauses,
/// `c` comment lines). Validates the header counts, the variable range, and
/// that no clause mentions a variable twice.
CnfFormula parse_dimacs(const std::string& text);
std::string to_dimacs(const CnfFormula& formula);

/// Checks the restricted 3-CNF input form: every clause has exactly three
/// literals and every variable occurs at least twice (counting both
/// polarities). Throws ValidationError naming the offending clause/variable.
void validate_3sat_restricted(const CnfFormula& formula);

enum class SatSemantics { Sat, NotAllEqual };

bool sat_check(const CnfFormula& formula, const std::vector<bool>& assignment);
/// True iff every clause has exactly one or two satisfied literals.
bool naesat_check(const CnfFormula& formula, const std::vector<bool>& assignment);

/// Exhaustive desk-scale satisfiability oracle; guarded at `max_assignments`
/// enumerated assignments (default 2^20).
std::optional<std::vector<bool>> exhaustive_satisfying_assignment(
    const CnfFormula& formula, SatSemantics semantics,
    std::uint64_t max_assignments = 1ULL << 20);

// ---------------------------------------------------------------------------
// Formula transforms
// ---------------------------------------------------------------------------

struct ThreeOccurrence {
    CnfFormula formula;                ///< each variable occurs exactly three times
    std::vector<int> copy_to_original; ///< 1-based: new variable -> source variable
};

/// Rewrite so each variable appears exactly three times: one occurrence in a
/// 3-clause plus a cyclic chain of binary implication clauses tying its
/// copies together. Satisfiability is preserved in both directions.
ThreeOccurrence to_three_occurrence(const CnfFormula& formula);

struct NaeSatStar {
    CnfFormula formula;          ///< exactly-3-literal clauses
    int num_source_vars = 0;     ///< variables inherited from the input
    int num_selector_vars = 0;   ///< one per 3-literal input clause
    int num_flag_vars = 0;       ///< one per input clause (3 when a 2-cycle was padded)
    bool single_flag_chain_omitted = false; ///< set when the flag chain degenerates to nothing
    bool flag_chain_padded = false; ///< set when a 2-element chain gained a padding flag
};

/// Gadget rewrite of a formula with only 3- and 2-literal clauses into the
/// not-all-equal form whose variable pairs co-occur at most twice (once per
/// polarity pattern). The postcondition is checked by direct pair counting.
NaeSatStar to_naesat_star(const CnfFormula& clauses32);

// ---------------------------------------------------------------------------
// Distance matrix and clustering
// ---------------------------------------------------------------------------

/// 2n x 2n matrix over literal points; row i is literal x_{i+1}, row n+i is
/// its negation. Entries lie in {0, 1, 1+delta, 1+DeltaBig}.
struct DistanceMatrix {
    Matrix entries;
    int num_vars = 0;    ///< n
    int num_clauses = 0; ///< m
    double delta = 0.0;
    double delta_big = 0.0;

    Index size() const { return entries.rows(); }
    Index literal_index(int literal) const;
};

DistanceMatrix build_distance_matrix(const CnfFormula& naesat);

/// Cost achieved by clustering the literal points along any not-all-equal
/// satisfying assignment: n - 1 + 2 delta m / n.
double cost_threshold(const CnfFormula& naesat);

struct Clustering2 {
    std::vector<bool> in_first; ///< both clusters must be nonempty
    double cost = 0.0;
};

/// Pairwise clustering objective: sum over the two clusters of
/// (1 / 2|C|) * sum of all ordered within-cluster entries.
double clustering_cost(const Eigen::Ref<const Matrix>& distances,
                       const std::vector<bool>& in_first);

/// Cluster positive literals of the assignment against the rest.
Clustering2 assignment_to_clustering(const DistanceMatrix& dm,
                                     const CnfFormula& naesat,
                                     const std::vector<bool>& assignment);

/// Exact minimum over all bipartitions with both sides nonempty; guarded at
/// 24 points.
Clustering2 brute_force_2clustering(const Eigen::Ref<const Matrix>& distances);

// ---------------------------------------------------------------------------
// Euclidean realizability
// ---------------------------------------------------------------------------

struct SchoenbergResult {
    bool embeddable = false;
    Vector spectrum; ///< eigenvalues of -HDH, descending
};

/// Double-centering test: D is realizable as squared Euclidean distances iff
/// -HDH is positive semidefinite, H = I - (1/N) 1 1^T.
SchoenbergResult schoenberg_check(const Eigen::Ref<const Matrix>& distances);

struct Embedding {
    PointSet points;     ///< N x N coordinates (trailing columns zero-padded)
    Vector gram_spectrum;
    double max_abs_reconstruction_error = 0.0;
};

/// Classical multidimensional scaling: factor -(1/2) H D H and keep the
/// nonnegative spectrum. Pairwise squared distances of the result reproduce
/// the input within 1e-6.
Embedding embed_mds(const Eigen::Ref<const Matrix>& distances);

// ---------------------------------------------------------------------------
// End-to-end pipeline
// ---------------------------------------------------------------------------

enum class ReductionEntry {
    ThreeSat,    ///< restricted 3-CNF; runs the full transform chain
    ClauseMix32, ///< formula of 3- and 2-literal clauses; skips the copying step
    NaeSatStar   ///< already in not-all-equal form; goes straight to the matrix
};

struct ReductionReport {
    ReductionEntry entry = ReductionEntry::ThreeSat;
    CnfFormula input;
    std::optional<CnfFormula> three_occurrence;
    NaeSatStar naesat;
    DistanceMatrix dmatrix;
    double c_threshold = 0.0;
    Embedding embedding;

    // Populated by verify when the instance fits the enumeration guards.
    std::optional<double> brute_force_cost;
    std::optional<bool> verdict_satisfiable; ///< brute cost <= threshold + 1e-9
    std::optional<bool> oracle_satisfiable;  ///< exhaustive oracle on the input formula
    std::optional<double> euclidean_brute_force_cost;
};

/// Run the reduction chain from the given entry stage; with verify, also run
/// the exhaustive oracles that fit the guards. Errors are labeled with the
/// stage that raised them.
ReductionReport end_to_end_reduce(const CnfFormula& input, ReductionEntry entry, bool verify);

} // namespace rpquant

#endif
