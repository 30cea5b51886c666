#include "rpquant/hardness.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <sstream>
#include <utility>

#include <Eigen/Eigenvalues>

#include "rpquant/datagen.hpp"
#include "rpquant/errors.hpp"

namespace rpquant {

// ---------------------------------------------------------------------------
// DIMACS parsing
// ---------------------------------------------------------------------------

CnfFormula parse_dimacs(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;

    CnfFormula formula;
    bool have_header = false;
    std::size_t declared_clauses = 0;
    std::vector<int> current;

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok)) continue;
        if (tok == "c" || tok[0] == 'c') continue;
        if (tok == "p") {
            if (have_header) throw ParseError("dimacs: duplicate header at line " + std::to_string(line_no));
            std::string fmt;
            long vars = 0, clauses = 0;
            if (!(ls >> fmt >> vars >> clauses) || fmt != "cnf" || vars < 1 || clauses < 0)
                throw ParseError("dimacs: malformed header at line " + std::to_string(line_no));
            formula.num_vars = static_cast<int>(vars);
            declared_clauses = static_cast<std::size_t>(clauses);
            have_header = true;
            continue;
        }
        if (!have_header)
            throw ParseError("dimacs: clause before header at line " + std::to_string(line_no));
        ls.clear();
        ls.str(line);
        long lit = 0;
        while (ls >> lit) {
            if (lit == 0) {
                if (current.empty())
                    throw ParseError("dimacs: empty clause at line " + std::to_string(line_no));
                for (std::size_t i = 0; i < current.size(); ++i)
                    for (std::size_t j = i + 1; j < current.size(); ++j)
                        if (std::abs(current[i]) == std::abs(current[j]))
                            throw ValidationError("dimacs: variable " +
                                                  std::to_string(std::abs(current[i])) +
                                                  " repeated in clause ending at line " +
                                                  std::to_string(line_no));
                formula.clauses.push_back(std::move(current));
                current.clear();
            } else {
                if (std::abs(lit) > formula.num_vars)
                    throw ParseError("dimacs: variable " + std::to_string(std::abs(lit)) +
                                     " out of range at line " + std::to_string(line_no));
                current.push_back(static_cast<int>(lit));
            }
        }
        if (!ls.eof())
            throw ParseError("dimacs: bad token at line " + std::to_string(line_no));
    }
    if (!have_header) throw ParseError("dimacs: missing header");
    if (!current.empty()) throw ParseError("dimacs: unterminated clause at end of input");
    if (formula.clauses.size() != declared_clauses)
        throw ParseError("dimacs: header declares " + std::to_string(declared_clauses) +
                         " clauses, found " + std::to_string(formula.clauses.size()));
    return formula;
}

std::string to_dimacs(const CnfFormula& formula) {
    std::ostringstream out;
    out << "p cnf " << formula.num_vars << ' ' << formula.clauses.size() << '\n';
    for (const auto& clause : formula.clauses) {
        for (int lit : clause) out << lit << ' ';
        out << "0\n";
    }
    return out.str();
}

void validate_3sat_restricted(const CnfFormula& formula) {
    std::vector<int> occurrences(static_cast<std::size_t>(formula.num_vars) + 1, 0);
    for (std::size_t ci = 0; ci < formula.clauses.size(); ++ci) {
        const auto& clause = formula.clauses[ci];
        if (clause.size() != 3)
            throw ValidationError("3sat: clause " + std::to_string(ci + 1) + " has " +
                                  std::to_string(clause.size()) + " literals, expected 3");
        for (int lit : clause) occurrences[static_cast<std::size_t>(std::abs(lit))] += 1;
    }
    for (int v = 1; v <= formula.num_vars; ++v)
        if (occurrences[static_cast<std::size_t>(v)] < 2)
            throw ValidationError("3sat: variable " + std::to_string(v) +
                                  " occurs fewer than twice");
}

// ---------------------------------------------------------------------------
// Assignment checks
// ---------------------------------------------------------------------------

namespace {

void require_complete(const CnfFormula& formula, const std::vector<bool>& assignment) {
    if (assignment.size() != static_cast<std::size_t>(formula.num_vars))
        throw IncompleteAssignmentError("assignment covers " + std::to_string(assignment.size()) +
                                        " of " + std::to_string(formula.num_vars) + " variables");
}

bool literal_true(int lit, const std::vector<bool>& assignment) {
    const bool v = assignment[static_cast<std::size_t>(std::abs(lit)) - 1];
    return lit > 0 ? v : !v;
}

} // namespace

bool sat_check(const CnfFormula& formula, const std::vector<bool>& assignment) {
    require_complete(formula, assignment);
    for (const auto& clause : formula.clauses) {
        bool any = false;
        for (int lit : clause)
            if (literal_true(lit, assignment)) {
                any = true;
                break;
            }
        if (!any) return false;
    }
    return true;
}

bool naesat_check(const CnfFormula& formula, const std::vector<bool>& assignment) {
    require_complete(formula, assignment);
    for (const auto& clause : formula.clauses) {
        int satisfied = 0;
        for (int lit : clause)
            if (literal_true(lit, assignment)) ++satisfied;
        if (satisfied == 0 || satisfied == static_cast<int>(clause.size())) return false;
    }
    return true;
}

std::optional<std::vector<bool>> exhaustive_satisfying_assignment(const CnfFormula& formula,
                                                                  SatSemantics semantics,
                                                                  std::uint64_t max_assignments) {
    if (formula.num_vars >= 63 || (1ULL << formula.num_vars) > max_assignments)
        throw TooLargeError("exhaustive oracle: 2^" + std::to_string(formula.num_vars) +
                            " assignments exceed the guard");
    const std::uint64_t total = 1ULL << formula.num_vars;
    std::vector<bool> assignment(static_cast<std::size_t>(formula.num_vars), false);
    for (std::uint64_t mask = 0; mask < total; ++mask) {
        for (int v = 0; v < formula.num_vars; ++v)
            assignment[static_cast<std::size_t>(v)] = (mask >> v) & 1ULL;
        const bool ok = semantics == SatSemantics::Sat ? sat_check(formula, assignment)
                                                       : naesat_check(formula, assignment);
        if (ok) return assignment;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Transform: three occurrences per variable
// ---------------------------------------------------------------------------

ThreeOccurrence to_three_occurrence(const CnfFormula& formula) {
    validate_3sat_restricted(formula);

    std::vector<int> occurrences(static_cast<std::size_t>(formula.num_vars) + 1, 0);
    for (const auto& clause : formula.clauses)
        for (int lit : clause) occurrences[static_cast<std::size_t>(std::abs(lit))] += 1;

    // Copy j of variable v gets index first_copy[v] + j. A variable with
    // exactly two occurrences still gets three copies: a 2-cycle of agreement
    // clauses would repeat the copy pair with the same polarity pattern,
    // which the downstream not-all-equal restrictions forbid.
    std::vector<int> copies(static_cast<std::size_t>(formula.num_vars) + 1, 0);
    std::vector<int> first_copy(static_cast<std::size_t>(formula.num_vars) + 1, 0);
    int next = 0;
    for (int v = 1; v <= formula.num_vars; ++v) {
        copies[static_cast<std::size_t>(v)] = std::max(occurrences[static_cast<std::size_t>(v)], 3);
        first_copy[static_cast<std::size_t>(v)] = next;
        next += copies[static_cast<std::size_t>(v)];
    }

    ThreeOccurrence out;
    out.formula.num_vars = next;
    out.copy_to_original.assign(static_cast<std::size_t>(next) + 1, 0);
    for (int v = 1; v <= formula.num_vars; ++v)
        for (int j = 0; j < copies[static_cast<std::size_t>(v)]; ++j)
            out.copy_to_original[static_cast<std::size_t>(first_copy[static_cast<std::size_t>(v)] + j + 1)] = v;

    // Replace occurrences in reading order, preserving polarity.
    std::vector<int> used(static_cast<std::size_t>(formula.num_vars) + 1, 0);
    for (const auto& clause : formula.clauses) {
        std::vector<int> rewritten;
        rewritten.reserve(clause.size());
        for (int lit : clause) {
            const int v = std::abs(lit);
            const int copy = first_copy[static_cast<std::size_t>(v)] + used[static_cast<std::size_t>(v)] + 1;
            used[static_cast<std::size_t>(v)] += 1;
            rewritten.push_back(lit > 0 ? copy : -copy);
        }
        out.formula.clauses.push_back(std::move(rewritten));
    }

    // Cyclic implication chain among the copies of each variable.
    for (int v = 1; v <= formula.num_vars; ++v) {
        const int k = copies[static_cast<std::size_t>(v)];
        const int base = first_copy[static_cast<std::size_t>(v)] + 1;
        for (int j = 0; j < k; ++j)
            out.formula.clauses.push_back({-(base + j), base + (j + 1) % k});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Transform: not-all-equal form
// ---------------------------------------------------------------------------

namespace {

/// Polarity pattern of a variable pair inside one clause: `same` when the two
/// literals have equal sign, `mixed` otherwise. The target form allows each
/// pair of variables at most one clause of each pattern.
struct PairUse {
    int same = 0;
    int mixed = 0;
};

void check_pair_restrictions(const CnfFormula& formula, const char* stage) {
    std::map<std::pair<int, int>, PairUse> uses;
    for (const auto& clause : formula.clauses) {
        for (std::size_t i = 0; i < clause.size(); ++i) {
            for (std::size_t j = i + 1; j < clause.size(); ++j) {
                const int a = clause[i], b = clause[j];
                const auto key = std::minmax({std::abs(a), std::abs(b)});
                PairUse& u = uses[{key.first, key.second}];
                ((a > 0) == (b > 0) ? u.same : u.mixed) += 1;
                if (u.same > 1 || u.mixed > 1)
                    throw RestrictionViolatedError(
                        std::string(stage) + ": variables " + std::to_string(key.first) + " and " +
                        std::to_string(key.second) +
                        " co-occur twice with the same polarity pattern");
            }
        }
    }
}

} // namespace

NaeSatStar to_naesat_star(const CnfFormula& clauses32) {
    int m3 = 0, m2 = 0;
    for (std::size_t ci = 0; ci < clauses32.clauses.size(); ++ci) {
        const std::size_t len = clauses32.clauses[ci].size();
        if (len == 3) ++m3;
        else if (len == 2) ++m2;
        else
            throw StructureError("naesat transform: clause " + std::to_string(ci + 1) + " has " +
                                 std::to_string(len) + " literals, expected 2 or 3");
    }
    if (m3 + m2 == 0) throw StructureError("naesat transform: formula has no clauses");

    NaeSatStar out;
    const int n0 = clauses32.num_vars;
    out.num_source_vars = n0;
    out.num_selector_vars = m3;
    // A two-element agreement cycle would visit the pair {f_1, f_2} twice
    // with the same polarity pattern, so it is padded to a 3-cycle with one
    // extra flag variable; a single flag needs no agreement at all.
    const int chain = m3 + m2;
    out.single_flag_chain_omitted = chain == 1;
    out.flag_chain_padded = chain == 2;
    out.num_flag_vars = out.flag_chain_padded ? 3 : chain;
    const int selector = n0;                      // selector j is variable selector + j (1-based j)
    const int flag = n0 + m3;                     // flag i is variable flag + i
    const int last = flag + out.num_flag_vars + 1; // the shared terminal flag variable
    out.formula.num_vars = last;

    int next3 = 0, next2 = 0;
    for (const auto& clause : clauses32.clauses) {
        if (clause.size() == 3) {
            ++next3;
            out.formula.clauses.push_back({clause[0], clause[1], selector + next3});
            out.formula.clauses.push_back({-(selector + next3), clause[2], flag + next3});
        } else {
            ++next2;
            out.formula.clauses.push_back({clause[0], clause[1], flag + m3 + next2});
        }
    }

    if (chain >= 2) {
        const int cycle = out.num_flag_vars;
        for (int i = 1; i <= cycle; ++i)
            out.formula.clauses.push_back({-(flag + i), flag + 1 + (i % cycle), last});
    }

    check_pair_restrictions(out.formula, "naesat transform");
    return out;
}

// ---------------------------------------------------------------------------
// Distance matrix
// ---------------------------------------------------------------------------

Index DistanceMatrix::literal_index(int literal) const {
    const int v = std::abs(literal);
    if (v < 1 || v > num_vars) throw InvalidParamError("literal_index: variable out of range");
    return literal > 0 ? Index(v - 1) : Index(num_vars + v - 1);
}

DistanceMatrix build_distance_matrix(const CnfFormula& naesat) {
    const int n = naesat.num_vars;
    const int m = static_cast<int>(naesat.clauses.size());
    if (n < 1) throw InvalidParamError("distance matrix: formula has no variables");
    if (m < 1) throw InvalidParamError("distance matrix: formula has no clauses");
    for (std::size_t ci = 0; ci < naesat.clauses.size(); ++ci) {
        if (naesat.clauses[ci].size() != 3)
            throw RestrictionViolatedError("distance matrix: clause " + std::to_string(ci + 1) +
                                           " does not have exactly 3 literals");
        const auto& cl = naesat.clauses[ci];
        for (std::size_t i = 0; i < cl.size(); ++i)
            for (std::size_t j = i + 1; j < cl.size(); ++j)
                if (std::abs(cl[i]) == std::abs(cl[j]))
                    throw RestrictionViolatedError("distance matrix: clause " + std::to_string(ci + 1) +
                                                   " repeats a variable");
    }
    check_pair_restrictions(naesat, "distance matrix");

    DistanceMatrix dm;
    dm.num_vars = n;
    dm.num_clauses = m;
    dm.delta = 1.0 / (5.0 * m + 2.0 * n);
    dm.delta_big = 5.0 * dm.delta * m;
    // Parameter window for the reduction; the chosen setting sits exactly at
    // the upper end.
    if (!(4.0 * dm.delta * m < dm.delta_big && dm.delta_big <= 1.0 - 2.0 * dm.delta * n + 1e-12))
        throw InvalidParamError("distance matrix: parameter window violated");

    const Index N = 2 * static_cast<Index>(n);
    dm.entries = Matrix::Constant(N, N, 1.0);
    for (Index i = 0; i < N; ++i) dm.entries(i, i) = 0.0;
    for (int v = 1; v <= n; ++v) {
        const Index a = dm.literal_index(v);
        const Index b = dm.literal_index(-v);
        dm.entries(a, b) = dm.entries(b, a) = 1.0 + dm.delta_big;
    }

    // Relation marks with provenance: each related literal pair must come
    // from a unique clause.
    std::map<std::pair<Index, Index>, std::size_t> provenance;
    const auto mark = [&](int lit_a, int lit_b, std::size_t clause_id) {
        Index a = dm.literal_index(lit_a);
        Index b = dm.literal_index(lit_b);
        if (a > b) std::swap(a, b);
        const auto [it, inserted] = provenance.try_emplace({a, b}, clause_id);
        if (!inserted && it->second != clause_id)
            throw RestrictionViolatedError("distance matrix: relation between literals " +
                                           std::to_string(lit_a) + " and " + std::to_string(lit_b) +
                                           " is generated by clauses " +
                                           std::to_string(it->second + 1) + " and " +
                                           std::to_string(clause_id + 1));
        dm.entries(a, b) = dm.entries(b, a) = 1.0 + dm.delta;
    };
    for (std::size_t ci = 0; ci < naesat.clauses.size(); ++ci) {
        const auto& cl = naesat.clauses[ci];
        for (std::size_t i = 0; i < cl.size(); ++i) {
            for (std::size_t j = i + 1; j < cl.size(); ++j) {
                mark(cl[i], cl[j], ci);
                mark(-cl[i], -cl[j], ci);
            }
        }
    }
    return dm;
}

double cost_threshold(const CnfFormula& naesat) {
    const int n = naesat.num_vars;
    const int m = static_cast<int>(naesat.clauses.size());
    if (n < 1 || m < 1) throw InvalidParamError("cost_threshold: need at least one variable and clause");
    const double delta = 1.0 / (5.0 * m + 2.0 * n);
    return static_cast<double>(n) - 1.0 + 2.0 * delta * m / static_cast<double>(n);
}

// ---------------------------------------------------------------------------
// Clustering
// ---------------------------------------------------------------------------

double clustering_cost(const Eigen::Ref<const Matrix>& distances,
                       const std::vector<bool>& in_first) {
    const Index N = distances.rows();
    if (in_first.size() != static_cast<std::size_t>(N))
        throw DimensionMismatchError("clustering_cost: partition size mismatch");
    Index n1 = 0;
    for (bool b : in_first) n1 += b ? 1 : 0;
    if (n1 == 0 || n1 == N) throw EmptyClusterError("clustering_cost: both clusters must be nonempty");

    double sum1 = 0.0, sum2 = 0.0;
    for (Index i = 0; i < N; ++i)
        for (Index j = 0; j < N; ++j) {
            if (in_first[static_cast<std::size_t>(i)] && in_first[static_cast<std::size_t>(j)])
                sum1 += distances(i, j);
            else if (!in_first[static_cast<std::size_t>(i)] && !in_first[static_cast<std::size_t>(j)])
                sum2 += distances(i, j);
        }
    return sum1 / (2.0 * static_cast<double>(n1)) + sum2 / (2.0 * static_cast<double>(N - n1));
}

Clustering2 assignment_to_clustering(const DistanceMatrix& dm, const CnfFormula& naesat,
                                     const std::vector<bool>& assignment) {
    if (!naesat_check(naesat, assignment))
        throw NotNaeSatisfyingError("assignment_to_clustering: not a not-all-equal satisfying assignment");
    Clustering2 out;
    out.in_first.assign(static_cast<std::size_t>(dm.size()), false);
    for (int v = 1; v <= dm.num_vars; ++v) {
        const bool val = assignment[static_cast<std::size_t>(v) - 1];
        out.in_first[static_cast<std::size_t>(dm.literal_index(v))] = val;
        out.in_first[static_cast<std::size_t>(dm.literal_index(-v))] = !val;
    }
    out.cost = clustering_cost(dm.entries, out.in_first);
    return out;
}

Clustering2 brute_force_2clustering(const Eigen::Ref<const Matrix>& distances) {
    const Index N = distances.rows();
    if (distances.cols() != N) throw InvalidParamError("brute_force_2clustering: matrix must be square");
    if (N < 2) throw InvalidParamError("brute_force_2clustering: need at least 2 points");
    if (N > 24) throw TooLargeError("brute_force_2clustering: enumeration capped at 24 points");

    const Vector row_total = distances.rowwise().sum();
    Vector sum_to_first = Vector::Zero(N);
    double sum1 = 0.0;
    double sum2 = distances.sum();
    Index n1 = 0;
    std::vector<bool> in1(static_cast<std::size_t>(N), false);

    double best = std::numeric_limits<double>::infinity();
    std::uint64_t best_gray = 0;

    const std::uint64_t steps = (1ULL << (N - 1)) - 1;
    for (std::uint64_t i = 1; i <= steps; ++i) {
        const Index p = static_cast<Index>(std::countr_zero(i)) + 1;
        if (in1[static_cast<std::size_t>(p)]) {
            sum_to_first -= distances.col(p);
            sum1 -= 2.0 * sum_to_first[p];
            sum2 += 2.0 * (row_total[p] - sum_to_first[p]);
            in1[static_cast<std::size_t>(p)] = false;
            --n1;
        } else {
            sum2 -= 2.0 * (row_total[p] - sum_to_first[p]);
            sum1 += 2.0 * sum_to_first[p];
            sum_to_first += distances.col(p);
            in1[static_cast<std::size_t>(p)] = true;
            ++n1;
        }
        if (n1 == 0) continue;
        const double cost = sum1 / (2.0 * static_cast<double>(n1)) +
                            sum2 / (2.0 * static_cast<double>(N - n1));
        if (cost < best) {
            best = cost;
            best_gray = i ^ (i >> 1);
        }
    }

    Clustering2 out;
    out.in_first.assign(static_cast<std::size_t>(N), false);
    for (Index p = 1; p < N; ++p)
        if ((best_gray >> (p - 1)) & 1ULL) out.in_first[static_cast<std::size_t>(p)] = true;
    // Recompute the winner exactly to shed incremental drift.
    out.cost = clustering_cost(distances, out.in_first);
    return out;
}

// ---------------------------------------------------------------------------
// Euclidean realizability
// ---------------------------------------------------------------------------

namespace {

void require_distance_matrix(const Eigen::Ref<const Matrix>& d) {
    const Index N = d.rows();
    if (d.cols() != N || N < 1) throw InvalidParamError("distance matrix must be square");
    const double scale = std::max(1.0, d.cwiseAbs().maxCoeff());
    if ((d - d.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw NotSymmetricError("distance matrix is not symmetric");
    if (d.diagonal().cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw NonzeroDiagonalError("distance matrix has a nonzero diagonal");
}

Matrix double_centered(const Eigen::Ref<const Matrix>& d, double factor) {
    const Index N = d.rows();
    const Matrix h = Matrix::Identity(N, N) - Matrix::Constant(N, N, 1.0 / static_cast<double>(N));
    return factor * h * d * h;
}

} // namespace

SchoenbergResult schoenberg_check(const Eigen::Ref<const Matrix>& distances) {
    require_distance_matrix(distances);
    Eigen::SelfAdjointEigenSolver<Matrix> es(double_centered(distances, -1.0), Eigen::EigenvaluesOnly);
    SchoenbergResult out;
    out.spectrum = es.eigenvalues().reverse();
    const double scale = out.spectrum.cwiseAbs().maxCoeff();
    out.embeddable = out.spectrum.minCoeff() >= -1e-9 * scale;
    return out;
}

Embedding embed_mds(const Eigen::Ref<const Matrix>& distances) {
    const SchoenbergResult check = schoenberg_check(distances);
    if (!check.embeddable)
        throw NotEmbeddableError("embed_mds: matrix fails the double-centering test");

    const Index N = distances.rows();
    Eigen::SelfAdjointEigenSolver<Matrix> es(double_centered(distances, -0.5));

    Embedding out;
    out.gram_spectrum = es.eigenvalues().reverse();
    out.points = PointSet::Zero(N, N);
    const double lambda_max = std::max(out.gram_spectrum.maxCoeff(), 0.0);
    Index col = 0;
    for (Index i = 0; i < N; ++i) {
        const double lambda = out.gram_spectrum[i];
        if (lambda <= 1e-12 * lambda_max || lambda <= 0.0) break;
        out.points.col(col) = std::sqrt(lambda) * es.eigenvectors().col(N - 1 - i);
        ++col;
    }

    double max_err = 0.0;
    for (Index a = 0; a < N; ++a)
        for (Index b = a + 1; b < N; ++b) {
            const double sq = (out.points.row(a) - out.points.row(b)).squaredNorm();
            max_err = std::max(max_err, std::abs(sq - distances(a, b)));
        }
    out.max_abs_reconstruction_error = max_err;
    if (max_err > 1e-6)
        throw NotEmbeddableError("embed_mds: reconstruction error " + std::to_string(max_err) +
                                 " exceeds 1e-6");
    return out;
}

// ---------------------------------------------------------------------------
// End-to-end pipeline
// ---------------------------------------------------------------------------

ReductionReport end_to_end_reduce(const CnfFormula& input, ReductionEntry entry, bool verify) {
    ReductionReport report;
    report.entry = entry;
    report.input = input;

    const CnfFormula* clauses32 = &input;
    if (entry == ReductionEntry::ThreeSat) {
        ThreeOccurrence three = to_three_occurrence(input);
        report.three_occurrence = std::move(three.formula);
        clauses32 = &*report.three_occurrence;
    }

    if (entry == ReductionEntry::NaeSatStar) {
        report.naesat.formula = input;
        report.naesat.num_source_vars = input.num_vars;
    } else {
        report.naesat = to_naesat_star(*clauses32);
    }

    report.dmatrix = build_distance_matrix(report.naesat.formula);
    report.c_threshold = cost_threshold(report.naesat.formula);
    report.embedding = embed_mds(report.dmatrix.entries);

    if (verify) {
        if (input.num_vars <= 20) {
            const SatSemantics semantics =
                entry == ReductionEntry::NaeSatStar ? SatSemantics::NotAllEqual : SatSemantics::Sat;
            report.oracle_satisfiable = exhaustive_satisfying_assignment(input, semantics).has_value();
        }
        if (report.dmatrix.size() <= 24) {
            const Clustering2 best = brute_force_2clustering(report.dmatrix.entries);
            report.brute_force_cost = best.cost;
            report.verdict_satisfiable = best.cost <= report.c_threshold + 1e-9;
            report.euclidean_brute_force_cost =
                brute_force_kmeans(report.embedding.points, 2).total_cost;
        }
    }
    return report;
}

} // namespace rpquant
