// rpquant: random-projection-tree vector quantization toolkit.
//
// Subcommands: build, encode, eval, gen, curve, kmeans, reduce. All
// randomness flows from --seed; runs echo their resolved configuration to
// stderr. Exit codes: 0 success, 1 usage error, 2 data or validation error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "rpquant/csv.hpp"
#include "rpquant/datagen.hpp"
#include "rpquant/errors.hpp"
#include "rpquant/hardness.hpp"
#include "rpquant/stats.hpp"
#include "rpquant/tree.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace rpquant;

struct GlobalFlags {
    std::uint64_t seed = 0;
    int threads = static_cast<int>(std::thread::hardware_concurrency());
    std::string format = "csv";
};

void add_globals(CLI::App* cmd, GlobalFlags& g) {
    cmd->add_option("--seed", g.seed, "Random seed driving all randomness")->capture_default_str();
    cmd->add_option("--threads", g.threads, "Worker bound for parallel builds")->capture_default_str();
    cmd->add_option("--format", g.format, "Tabular output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
}

/// Echo the resolved configuration, including defaulted values.
void echo_config(const CLI::App& cmd) {
    std::ostringstream out;
    out << "config: " << cmd.get_name();
    for (const auto* opt : cmd.get_options()) {
        if (opt->get_name() == "--help") continue;
        const bool is_flag = opt->get_type_size() == 0;
        std::string value;
        if (is_flag) value = opt->count() ? "true" : "false";
        else if (opt->count()) value = opt->results().front();
        else value = opt->get_default_str();
        out << ' ' << opt->get_name() << '=' << value;
    }
    std::cerr << out.str() << '\n';
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open " + path + " for writing");
    out << text;
}

// --------------------------------------------------------------------------

struct BuildArgs {
    GlobalFlags g;
    std::string input, out;
    bool header = false;
    BuildParams params;
    std::string direction = "gaussian";
    std::string threshold = "median";
    bool shared = false;
    bool no_stats = false;
};

int run_build(const BuildArgs& a) {
    const PointSet points = load_points_csv(a.input, a.header);
    BuildParams params = a.params;
    params.seed = a.g.seed;
    params.threads = std::max(1, a.g.threads);
    params.shared_per_level = a.shared;
    params.keep_stats = !a.no_stats;
    params.direction_kind = a.direction == "sphere" ? DirectionKind::UnitSphere : DirectionKind::Gaussian;
    params.threshold = a.threshold == "mean" ? ThresholdKind::Mean : ThresholdKind::Median;
    const RpTree tree = RpTree::build(points, params);
    write_text_file(a.out, tree.to_json() + "\n");
    std::cerr << "built tree: n=" << tree.n_train() << " dim=" << tree.dim()
              << " leaves=" << tree.leaf_count() << " depth=" << tree.depth() << '\n';
    return 0;
}

struct TreeInputArgs {
    GlobalFlags g;
    std::string tree, input, out;
    bool header = false;
};

int run_encode(const TreeInputArgs& a) {
    const RpTree tree = RpTree::from_json(read_text_file(a.tree));
    const PointSet points = load_points_csv(a.input, a.header);
    std::vector<int> codes;
    codes.reserve(static_cast<std::size_t>(points.rows()));
    for (Index i = 0; i < points.rows(); ++i)
        codes.push_back(tree.route(points.row(i).transpose()).leaf_id);

    std::ostringstream out;
    if (a.g.format == "json") {
        out << json{{"codes", codes}}.dump() << '\n';
    } else {
        out << "leaf_id\n";
        for (int c : codes) out << c << '\n';
    }
    if (a.out.empty()) std::cout << out.str();
    else write_text_file(a.out, out.str());
    return 0;
}

int run_eval(const TreeInputArgs& a) {
    const RpTree tree = RpTree::from_json(read_text_file(a.tree));
    const PointSet points = load_points_csv(a.input, a.header);
    const double error = tree.quantization_error(points);
    const auto report = split_quality_report(tree);

    int distance_splits = 0, violations = 0;
    std::vector<double> decreases;
    for (const auto& e : report) {
        if (e.kind == SplitKind::Distance) {
            ++distance_splits;
            if (e.deltas_exact && !e.distance_bound_ok) ++violations;
        } else {
            decreases.push_back(e.rel_avg_diameter_decrease);
        }
    }
    const double median_decrease = decreases.empty() ? 0.0 : quantile(decreases, 0.5);

    if (a.g.format == "json") {
        json splits = json::array();
        for (const auto& e : report) {
            splits.push_back(json{{"kind", e.kind == SplitKind::Projection  ? "projection"
                                           : e.kind == SplitKind::Distance ? "distance"
                                                                           : "projected_distance"},
                                  {"depth", e.depth},
                                  {"p", e.p},
                                  {"parent_delta_sq", e.parent_delta_sq},
                                  {"weighted_child_delta_sq", e.weighted_child_delta_sq},
                                  {"deltas_exact", e.deltas_exact},
                                  {"distance_bound_ok", e.distance_bound_ok},
                                  {"rel_avg_diameter_decrease", e.rel_avg_diameter_decrease}});
        }
        std::cout << json{{"quantization_error", error},
                          {"splits", report.size()},
                          {"distance_splits", distance_splits},
                          {"distance_bound_violations", violations},
                          {"median_projection_decrease", median_decrease},
                          {"split_report", splits}}
                         .dump()
                  << '\n';
    } else {
        std::cout << "quantization_error," << format_double(error) << '\n';
        std::cout << "splits," << report.size() << '\n';
        std::cout << "distance_splits," << distance_splits << '\n';
        std::cout << "distance_bound_violations," << violations << '\n';
        std::cout << "median_projection_decrease," << format_double(median_decrease) << '\n';
    }
    return 0;
}

struct GenArgs {
    GlobalFlags g;
    std::string kind = "subspace";
    Index d = 2, D = 10, n = 1000;
    double noise = 0.0;
    std::string out;
};

int run_gen(const GenArgs& a) {
    ManifoldSpec spec;
    spec.kind = a.kind == "sphere"      ? ManifoldKind::Sphere
                : a.kind == "swissroll" ? ManifoldKind::SwissRoll
                                        : ManifoldKind::LinearSubspace;
    spec.d = a.d;
    spec.D = a.D;
    spec.n = a.n;
    spec.noise_sigma = a.noise;
    spec.seed = a.g.seed;
    save_points_csv(a.out, generate(spec));
    std::cerr << "wrote " << a.n << " points to " << a.out << '\n';
    return 0;
}

struct CurveArgs {
    GlobalFlags g;
    std::string input, out;
    bool header = false;
    int levels = 10, trees = 8;
    double c = 10.0;
    Index min_size = 10;
};

int run_curve(const CurveArgs& a) {
    const PointSet points = load_points_csv(a.input, a.header);
    BuildParams params;
    params.c = a.c;
    params.min_size = a.min_size;
    params.seed = a.g.seed;
    params.threads = std::max(1, a.g.threads);
    const ErrorCurve curve = error_vs_k(points, a.levels, a.trees, params);

    std::ostringstream out;
    if (a.g.format == "json") {
        out << json{{"k", curve.k}, {"error", curve.error}, {"slope", curve.slope}}.dump() << '\n';
    } else {
        out << "k,error\n";
        for (std::size_t i = 0; i < curve.k.size(); ++i)
            out << format_double(curve.k[i]) << ',' << format_double(curve.error[i]) << '\n';
    }
    if (a.out.empty()) std::cout << out.str();
    else write_text_file(a.out, out.str());
    std::cerr << "slope=" << format_double(curve.slope) << '\n';
    return 0;
}

struct KMeansArgs {
    GlobalFlags g;
    std::string input;
    bool header = false;
    Index k = 2;
    int iters = 100;
};

int run_kmeans(const KMeansArgs& a) {
    const PointSet points = load_points_csv(a.input, a.header);
    SplitRng rng(a.g.seed);
    const KMeansResult res = lloyd_kmeans(points, a.k, a.iters, rng);
    if (a.g.format == "json") {
        std::cout << json{{"k", a.k},
                          {"iterations", res.iterations},
                          {"cost", res.cost},
                          {"total_cost", res.cost * static_cast<double>(points.rows())}}
                         .dump()
                  << '\n';
    } else {
        std::cout << "k,iterations,cost\n"
                  << a.k << ',' << res.iterations << ',' << format_double(res.cost) << '\n';
    }
    return 0;
}

struct ReduceArgs {
    GlobalFlags g;
    std::string cnf, out_dir;
    std::string entry = "3sat";
    bool verify = false;
};

int run_reduce(const ReduceArgs& a) {
    const CnfFormula input = parse_dimacs(read_text_file(a.cnf));
    const ReductionEntry entry = a.entry == "naesat"      ? ReductionEntry::NaeSatStar
                                 : a.entry == "clauses32" ? ReductionEntry::ClauseMix32
                                                          : ReductionEntry::ThreeSat;
    const ReductionReport report = end_to_end_reduce(input, entry, a.verify);

    std::filesystem::create_directories(a.out_dir);
    save_points_csv(a.out_dir + "/distance.csv", report.dmatrix.entries);
    save_points_csv(a.out_dir + "/embedding.csv", report.embedding.points);

    json j{{"n", report.dmatrix.num_vars},
           {"m", report.dmatrix.num_clauses},
           {"delta", report.dmatrix.delta},
           {"Delta", report.dmatrix.delta_big},
           {"c_phi", report.c_threshold},
           {"entry", a.entry},
           {"single_flag_chain_omitted", report.naesat.single_flag_chain_omitted},
           {"flag_chain_padded", report.naesat.flag_chain_padded},
           {"max_abs_reconstruction_error", report.embedding.max_abs_reconstruction_error}};
    if (report.brute_force_cost) j["brute_force_cost"] = *report.brute_force_cost;
    if (report.verdict_satisfiable) j["verdict"] = *report.verdict_satisfiable ? "SAT" : "UNSAT";
    if (report.oracle_satisfiable) j["oracle"] = *report.oracle_satisfiable ? "SAT" : "UNSAT";
    if (report.euclidean_brute_force_cost)
        j["euclidean_brute_force_cost"] = *report.euclidean_brute_force_cost;

    write_text_file(a.out_dir + "/report.json", j.dump() + "\n");
    std::cout << j.dump() << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"random projection tree vector quantization toolkit"};
    app.require_subcommand(1);

    BuildArgs build_args;
    auto* build = app.add_subcommand("build", "build a tree from a CSV point set");
    build->add_option("--input", build_args.input, "input points, CSV")->required();
    build->add_flag("--header", build_args.header, "skip one header line");
    build->add_option("--c", build_args.params.c, "diameter ratio branch constant (> 4)")
        ->capture_default_str();
    build->add_option("--min-size", build_args.params.min_size, "stop splitting below this size")
        ->capture_default_str();
    build->add_option("--max-levels", build_args.params.max_levels, "depth cap (-1 = auto)")
        ->capture_default_str();
    build->add_flag("--shared-per-level", build_args.shared, "one direction per level");
    build->add_option("--direction", build_args.direction, "direction kind")
        ->check(CLI::IsMember({"gaussian", "sphere"}))
        ->capture_default_str();
    build->add_option("--threshold", build_args.threshold, "split threshold statistic")
        ->check(CLI::IsMember({"median", "mean"}))
        ->capture_default_str();
    build->add_flag("--no-stats", build_args.no_stats, "drop per-cell statistics");
    build->add_option("--out", build_args.out, "output tree JSON path")->required();
    add_globals(build, build_args.g);

    TreeInputArgs encode_args;
    auto* encode = app.add_subcommand("encode", "route points to leaf codes");
    encode->add_option("--tree", encode_args.tree, "tree JSON path")->required();
    encode->add_option("--input", encode_args.input, "input points, CSV")->required();
    encode->add_flag("--header", encode_args.header, "skip one header line");
    encode->add_option("--out", encode_args.out, "output codes CSV (stdout when omitted)");
    add_globals(encode, encode_args.g);

    TreeInputArgs eval_args;
    auto* eval = app.add_subcommand("eval", "quantization error and split report");
    eval->add_option("--tree", eval_args.tree, "tree JSON path")->required();
    eval->add_option("--input", eval_args.input, "input points, CSV")->required();
    eval->add_flag("--header", eval_args.header, "skip one header line");
    add_globals(eval, eval_args.g);

    GenArgs gen_args;
    auto* gen = app.add_subcommand("gen", "generate synthetic manifold data");
    gen->add_option("--kind", gen_args.kind, "manifold kind")
        ->check(CLI::IsMember({"subspace", "sphere", "swissroll"}))
        ->capture_default_str();
    gen->add_option("--d", gen_args.d, "intrinsic dimension")->capture_default_str();
    gen->add_option("--D", gen_args.D, "ambient dimension")->capture_default_str();
    gen->add_option("--n", gen_args.n, "number of points")->capture_default_str();
    gen->add_option("--noise", gen_args.noise, "isotropic noise sigma")->capture_default_str();
    gen->add_option("--out", gen_args.out, "output CSV path")->required();
    add_globals(gen, gen_args.g);

    CurveArgs curve_args;
    auto* curve = app.add_subcommand("curve", "training error versus codebook size");
    curve->add_option("--input", curve_args.input, "input points, CSV")->required();
    curve->add_flag("--header", curve_args.header, "skip one header line");
    curve->add_option("--levels", curve_args.levels, "depth cuts to evaluate")->capture_default_str();
    curve->add_option("--trees", curve_args.trees, "independent trees to average")
        ->capture_default_str();
    curve->add_option("--c", curve_args.c, "branch constant")->capture_default_str();
    curve->add_option("--min-size", curve_args.min_size, "stop splitting below this size")
        ->capture_default_str();
    curve->add_option("--out", curve_args.out, "output CSV (stdout when omitted)");
    add_globals(curve, curve_args.g);

    KMeansArgs kmeans_args;
    auto* kmeans = app.add_subcommand("kmeans", "Lloyd iterations baseline");
    kmeans->add_option("--input", kmeans_args.input, "input points, CSV")->required();
    kmeans->add_flag("--header", kmeans_args.header, "skip one header line");
    kmeans->add_option("--k", kmeans_args.k, "number of centers")->required();
    kmeans->add_option("--iters", kmeans_args.iters, "iteration cap")->capture_default_str();
    add_globals(kmeans, kmeans_args.g);

    ReduceArgs reduce_args;
    auto* reduce = app.add_subcommand("reduce", "CNF to 2-means distance matrix pipeline");
    reduce->add_option("--cnf", reduce_args.cnf, "input DIMACS CNF")->required();
    reduce->add_option("--out-dir", reduce_args.out_dir, "output directory")->required();
    reduce->add_option("--entry", reduce_args.entry, "pipeline entry stage")
        ->check(CLI::IsMember({"3sat", "clauses32", "naesat"}))
        ->capture_default_str();
    reduce->add_flag("--verify", reduce_args.verify, "run exhaustive oracles when small enough");
    add_globals(reduce, reduce_args.g);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (build->parsed()) {
            echo_config(*build);
            return run_build(build_args);
        }
        if (encode->parsed()) {
            echo_config(*encode);
            return run_encode(encode_args);
        }
        if (eval->parsed()) {
            echo_config(*eval);
            return run_eval(eval_args);
        }
        if (gen->parsed()) {
            echo_config(*gen);
            return run_gen(gen_args);
        }
        if (curve->parsed()) {
            echo_config(*curve);
            return run_curve(curve_args);
        }
        if (kmeans->parsed()) {
            echo_config(*kmeans);
            return run_kmeans(kmeans_args);
        }
        if (reduce->parsed()) {
            echo_config(*reduce);
            return run_reduce(reduce_args);
        }
    } catch (const rpquant::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}
