#include "pflow/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>

#include "pflow/flow_solve.hpp"
#include "pflow/generators.hpp"
#include "pflow/graph.hpp"
#include "pflow/json_io.hpp"
#include "pflow/metric_props.hpp"
#include "pflow/sparsify.hpp"
#include "pflow/transforms.hpp"

namespace pflow::cli {

using pflow::json::json;

namespace {

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Common {
    std::string format = "json";
    bool json_flag = false;
    double tol = 1e-8;
    std::uint64_t seed = 1;
};

struct Result {
    json body;
    std::string schema;
    int code = kOk;
    std::vector<std::vector<std::string>> table;  // csv rows, header first; empty = flatten
    std::optional<WeightedGraph> graph;             // text output prints the edge list
};

std::string scalar_text(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

void flatten(const json& j, const std::string& key, std::vector<std::pair<std::string, std::string>>& out) {
    if (j.is_object()) {
        for (auto& [k, v] : j.items()) flatten(v, key.empty() ? k : key + "." + k, out);
        return;
    }
    if (j.is_array()) {
        bool scalars = std::all_of(j.begin(), j.end(), [](const json& x) { return x.is_primitive(); });
        if (scalars) {
            std::string s;
            for (const auto& x : j) s += (s.empty() ? "" : " ") + scalar_text(x);
            out.emplace_back(key, s);
            return;
        }
        for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], key + "[" + std::to_string(i) + "]", out);
        return;
    }
    out.emplace_back(key, scalar_text(j));
}

std::string csv_cell(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += (c == '"') ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
}

void emit(const Result& r, const Common& c, std::ostream& out) {
    json full = pflow::json::with_schema(r.schema, r.body);
    if (c.json_flag || c.format == "json") {
        out << pflow::json::dump(full);
        return;
    }
    if (c.format == "csv") {
        if (!r.table.empty()) {
            for (const auto& row : r.table) {
                for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_cell(row[i]);
                out << "\n";
            }
            return;
        }
        std::vector<std::pair<std::string, std::string>> kv;
        flatten(full, "", kv);
        out << "key,value\n";
        for (auto& [k, v] : kv)
            if (k != "graph.edge_list") out << csv_cell(k) << "," << csv_cell(v) << "\n";
        return;
    }
    if (r.graph) {
        out << serialize_graph(*r.graph);
        return;
    }
    std::vector<std::pair<std::string, std::string>> kv;
    flatten(full, "", kv);
    for (auto& [k, v] : kv) out << k << ": " << v << "\n";
}

std::string fmt(double x) { return scalar_text(pflow::json::num(x)); }

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"json", "csv", "text"}));
    sub->add_flag("--json", c.json_flag, "Shorthand for --format json");
    sub->add_option("--tol", c.tol, "Solver relative duality-gap tolerance, in (0, 1e-2]");
    sub->add_option("--seed", c.seed, "64-bit seed for every random choice");
}

SolveOptions solve_options(const Common& c) {
    if (!(c.tol > 0.0 && c.tol <= 1e-2)) throw UsageError("--tol must lie in (0, 1e-2]");
    SolveOptions o;
    o.tol = c.tol;
    return o;
}

PNormParam p_param(const std::string& text, std::ostream& err) { return PNormParam(parse_p(text, err)); }

std::vector<std::string> row(std::initializer_list<std::string> xs) { return xs; }

}  // namespace

double parse_p(const std::string& text, std::ostream& err) {
    std::string t = text;
    std::transform(t.begin(), t.end(), t.begin(), [](unsigned char ch) { return std::tolower(ch); });
    if (t == "inf" || t == "infinity" || t == "+inf") return std::numeric_limits<double>::infinity();
    double v = 0.0;
    std::size_t used = 0;
    try {
        v = std::stod(t, &used);
    } catch (const std::exception&) {
        throw UsageError("cannot parse p from '" + text + "'");
    }
    if (used != t.size()) throw UsageError("cannot parse p from '" + text + "'");
    if (std::isnan(v) || v < 1.0) throw UsageError("p must lie in [1, inf]");
    if (std::isfinite(v) && v > kInfinityThreshold) {
        err << "warning: p = " << text << " exceeds 1e6 and is treated as inf\n";
        return std::numeric_limits<double>::infinity();
    }
    return v;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"p-norm flow metrics on weighted graphs: distances, structural checks, reductions, sparsifiers"};
    app.require_subcommand(1);
    app.footer(
        "Graph files: first line 'n m', then m lines 'tail head weight' with 0-based vertices; '#' starts a "
        "comment.\nEvery JSON report has a top-level \"schema\" field \"pflow.<name>/1\"; floats carry 12 "
        "significant digits; non-finite values are the strings \"inf\" / \"nan\".\nExit status: 0 success or "
        "verdict true, 1 verdict false, 2 usage or input error, 3 solver failure.");

    Common c;
    std::string graph_path, graph2_path, p_text = "2", rule, exponent_text, kind, out_path;
    std::vector<int> pair, edge_pair;
    std::vector<std::string> ps_text{"1", "1.5", "2", "3", "5", "inf"};
    int vertex = -1, k = 4, n = 0, pairs = 500, steps = 41;
    double eps = 0.25, oversample = 1.0, check_tol = -1.0, alpha = 1.0, beta = 1.0, expander_c = 8.0;
    bool matrices = false, all = false, do_verify = false, grid = false;
    std::optional<double> verify_eps;

    auto graph_opt = [&](CLI::App* s) { s->add_option("--graph", graph_path, "Graph file")->required(); };
    auto p_opt = [&](CLI::App* s, bool required) {
        auto* o = s->add_option("--p", p_text, "Norm parameter in [1, inf]; 'inf' accepted");
        if (required) o->required();
    };

    auto* dist = app.add_subcommand("dist", "d_p between one pair, with duality certificate");
    graph_opt(dist);
    p_opt(dist, true);
    dist->add_option("--pair", pair, "Source and target")->expected(2)->required();
    dist->footer("JSON pflow.dist/1: {pair, p, value, primal, dual, rel_gap, kkt_residual, iterations, method}");

    auto* allp = app.add_subcommand("all-pairs", "d_p for every pair");
    graph_opt(allp);
    p_opt(allp, true);
    allp->footer("JSON pflow.all-pairs/1: {n, p, gap_bound, values[n][n]}. CSV: the matrix.");

    auto* foster = app.add_subcommand("foster", "Generalised Foster sum with its bracket");
    graph_opt(foster);
    p_opt(foster, true);
    foster->add_option("--check-tol", check_tol, "Slack on the bracket (default 1e-6)");
    foster->footer(
        "JSON pflow.foster/1: {p, form, sum, lower_bound, upper_bound, max_edge_term, edge_bound_ok, verdict}");

    auto* pstrong = app.add_subcommand("p-strong", "Check d^r(x,y) <= d^r(x,z) + d^r(z,y) over triples");
    graph_opt(pstrong);
    p_opt(pstrong, true);
    pstrong->add_option("--exponent", exponent_text, "Exponent r (default p; 'inf' = ultrametric)");
    pstrong->add_option("--check-tol", check_tol, "Relative slack (default 1e-7)");
    pstrong->footer(
        "JSON pflow.p-strong/1: {exponent, triples_checked, exhaustive, violation_count, worst_excess, "
        "violations[{x,y,z,lhs,rhs}], verdict}");

    auto* mono = app.add_subcommand("monotonicity", "d_p across p: monotonicity, sandwich, q-powered, scaling");
    graph_opt(mono);
    mono->add_option("--pair", pair, "Source and target")->expected(2)->required();
    mono->add_option("--ps", ps_text, "Values of p")->delimiter(',');
    mono->add_option("--check-tol", check_tol, "Relative slack (default 1e-6)");
    mono->footer(
        "JSON pflow.monotonicity/1: {ps, values, nonincreasing, edge_count_sandwich, q_powered, weight_scaling, "
        "failures, verdict}. CSV: p,value.");

    auto* commute = app.add_subcommand("commute", "Commute time versus 2 w(E) R_eff");
    graph_opt(commute);
    commute->add_flag("--matrices", matrices, "Include hitting, commute and resistance matrices");
    commute->add_option("--check-tol", check_tol, "Relative tolerance (default 1e-8)");
    commute->footer("JSON pflow.commute/1: {total_weight, max_mismatch, verdict[, hitting, commute, resistance]}");

    auto* reduce = app.add_subcommand("reduce", "Apply one d_p-preserving reduction");
    graph_opt(reduce);
    p_opt(reduce, false);
    reduce->add_option("--rule", rule, "deg2 | parallel | wye-delta")
        ->required()
        ->check(CLI::IsMember({"deg2", "parallel", "wye-delta"}));
    reduce->add_option("--vertex", vertex, "Vertex for deg2 / wye-delta");
    reduce->add_option("--edges", edge_pair, "Two parallel edge indices for parallel")->expected(2);
    reduce->add_option("--out", out_path, "Also write the reduced graph here");
    reduce->footer(
        "JSON pflow.reduce/1: {rule, removed_vertices, removed_edges, created, vertex_map, graph{n, m, edges, "
        "edge_list}}. Text: the reduced graph in edge-list format.");

    auto* obstr = app.add_subcommand("obstruction", "Two-graph test for a local Y-Delta rule at p");
    p_opt(obstr, true);
    obstr->footer(
        "JSON pflow.obstruction/1: {p, alpha1, alpha2, gap, equal, checks{...}}. Exit 0 when both graphs force the "
        "same triangle weight, 1 when they differ, 3 when the solver cross-checks fail.");

    auto* smesh = app.add_subcommand("star-mesh", "Cut-constraint system for a p = inf star-mesh rule");
    smesh->add_option("--k", k, "Star size, 2..20")->required();
    smesh->footer(
        "JSON pflow.star-mesh/1: {k, feasible, residual, weights, worst_cut{side, required, achieved}}. Exit 0 "
        "feasible, 1 infeasible.");

    auto* sparsify = app.add_subcommand("sparsify", "d_p sparsifier by importance sampling or Gomory-Hu tree");
    graph_opt(sparsify);
    p_opt(sparsify, true);
    sparsify->add_option("--eps", eps, "Target relative error in (0, 1)");
    sparsify->add_option("--oversample", oversample, "Multiplier on the oversampling factor");
    sparsify->add_option("--out", out_path, "Also write the sparsifier here");
    sparsify->add_flag("--verify", do_verify, "Measure the error against the input");
    sparsify->add_option("--pairs", pairs, "Sampled pairs for --verify when n > 30");
    sparsify->footer(
        "JSON pflow.sparsify/1: {p, eps, seed, used_seed, attempts, method, samples, oversample, "
        "oversample_multiplier, score_sum, kept_bridges, edge_count, graph{...}[, verify{...}]}. Text: the "
        "sparsifier in edge-list format.");

    auto* verify = app.add_subcommand("verify", "Max relative d_p error of a second graph against the first");
    graph_opt(verify);
    verify->add_option("--against", graph2_path, "Candidate graph on the same vertex set")->required();
    p_opt(verify, true);
    verify->add_option("--pairs", pairs, "Sampled pairs when n > 30");
    verify->add_flag("--all", all, "Check every pair");
    verify->add_option("--eps", verify_eps, "Exit 1 when the error exceeds this");
    verify->footer("JSON pflow.verify/1: {max_rel_error, worst_pair, pairs, exhaustive[, eps, verdict]}");

    auto* exper = app.add_subcommand("experiment", "Resistance-sparsifier lower-bound experiments");
    exper->add_option("kind", kind, "clique-ratio | symmetric-family | expander-sparsifier | lower-bound-union")
        ->required()
        ->check(CLI::IsMember({"clique-ratio", "symmetric-family", "expander-sparsifier", "lower-bound-union"}));
    exper->add_option("--graph", graph_path, "Graph for clique-ratio (default: unit K_n minus an edge)");
    exper->add_option("--n", n, "Vertex count");
    exper->add_option("--eps", eps, "Accuracy for expander-sparsifier and lower-bound-union");
    exper->add_option("--alpha", alpha, "symmetric-family weight on edges at s or t");
    exper->add_option("--beta", beta, "symmetric-family weight elsewhere");
    exper->add_flag("--grid", grid, "symmetric-family over n = 5..N (N = --n, default 40) and beta/alpha in [0.01, 100]");
    exper->add_option("--steps", steps, "Grid points for beta/alpha");
    exper->add_option("--c", expander_c, "Degree constant: d = ceil(c / eps)");
    exper->footer(
        "JSON pflow.clique-ratio/1: {ratio{max_r, min_r, ratio, bound, bound_name, verdict}, degree_conditions{...}}\n"
        "JSON pflow.symmetric-family/1: single {n, alpha, beta, r_st, r_a, r_b, solved, max_mismatch, foster, "
        "ratio, ok, hitting, ratio_exceeds_10n} or grid {cases, failures, min_margin, worst, verdict}; CSV rows "
        "n,gamma,r_st,r_a,r_b,ratio\n"
        "JSON pflow.expander-sparsifier/1: {n, eps, degree, weight, edge_count, used_seed, max_rel_error, "
        "resistance_ratio, verdict}\n"
        "JSON pflow.lower-bound-union/1: {n, eps, cliques, clique_size, vertices, intra_edges, edges_tested, "
        "exhaustive, sensitive, disconnecting, min_change, verdict}");

    for (auto* s : {dist, allp, foster, pstrong, mono, commute, reduce, obstr, smesh, sparsify, verify, exper})
        add_common(s, c);

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        Result r;
        SolveOptions opts = solve_options(c);
        if (*dist) {
            WeightedGraph g = read_graph_file(graph_path);
            DemandPair d(pair[0], pair[1]);
            check_pair(g, d);
            FlowSolution sol = solve(g, d, p_param(p_text, err), opts);
            r.schema = "dist";
            r.body = pflow::json::to_json(sol.report);
            r.body["pair"] = {pair[0], pair[1]};
        } else if (*allp) {
            WeightedGraph g = read_graph_file(graph_path);
            DistanceMatrix m = all_pairs(g, p_param(p_text, err), opts);
            r.schema = "all-pairs";
            r.body = pflow::json::to_json(m);
            for (int i = 0; i < m.n; ++i) {
                std::vector<std::string> line;
                for (int j = 0; j < m.n; ++j) line.push_back(fmt(m(i, j)));
                r.table.push_back(line);
            }
        } else if (*foster) {
            WeightedGraph g = read_graph_file(graph_path);
            FosterReport f = foster_sum(g, p_param(p_text, err), opts, check_tol > 0 ? check_tol : 1e-6);
            r.schema = "foster";
            r.body = pflow::json::to_json(f);
            r.code = f.verdict ? kOk : kVerdictFalse;
        } else if (*pstrong) {
            WeightedGraph g = read_graph_file(graph_path);
            PNormParam p = p_param(p_text, err);
            std::optional<double> ex;
            if (!exponent_text.empty()) ex = parse_p(exponent_text, err);
            DistanceMatrix m = all_pairs(g, p, opts);
            PStrongReport rep = check_p_strong(m, check_tol > 0 ? check_tol : 1e-7, ex, c.seed);
            r.schema = "p-strong";
            r.body = pflow::json::to_json(rep);
            r.code = rep.ok() ? kOk : kVerdictFalse;
        } else if (*mono) {
            WeightedGraph g = read_graph_file(graph_path);
            DemandPair d(pair[0], pair[1]);
            check_pair(g, d);
            std::vector<PNormParam> ps;
            for (const auto& t : ps_text) ps.emplace_back(parse_p(t, err));
            MonotonicityReport rep = check_monotonicity(g, d, ps, check_tol > 0 ? check_tol : 1e-6, opts);
            r.schema = "monotonicity";
            r.body = pflow::json::to_json(rep);
            r.table.push_back(row({"p", "value"}));
            for (std::size_t i = 0; i < rep.ps.size(); ++i) r.table.push_back(row({fmt(rep.ps[i]), fmt(rep.values[i])}));
            r.code = rep.ok() ? kOk : kVerdictFalse;
        } else if (*commute) {
            WeightedGraph g = read_graph_file(graph_path);
            CommuteReport rep = commute_check(g, check_tol > 0 ? check_tol : 1e-8);
            r.schema = "commute";
            r.body = pflow::json::to_json(rep, matrices);
            r.code = rep.ok ? kOk : kVerdictFalse;
        } else if (*reduce) {
            WeightedGraph g = read_graph_file(graph_path);
            PNormParam p = p_param(p_text, err);
            TransformResult t;
            if (rule == "deg2") {
                if (vertex < 0) throw UsageError("deg2 needs --vertex");
                t = reduce_degree2(g, vertex, p);
            } else if (rule == "parallel") {
                if (edge_pair.size() != 2) throw UsageError("parallel needs --edges e1 e2");
                t = merge_parallel(g, edge_pair[0], edge_pair[1], p);
            } else {
                if (vertex < 0) throw UsageError("wye-delta needs --vertex");
                if (!p.is_two()) throw UsageError("wye-delta is exact only at p = 2");
                t = wye_delta_p2(g, vertex);
            }
            r.schema = "reduce";
            r.body = pflow::json::to_json(t);
            r.body["p"] = pflow::json::p_value(p);
            r.graph = t.graph_after;
        } else if (*obstr) {
            ObstructionReport rep = wye_delta_obstruction(p_param(p_text, err), opts);
            r.schema = "obstruction";
            r.body = pflow::json::to_json(rep);
            r.code = !rep.checks_ok ? kSolverFailure : (rep.equal ? kOk : kVerdictFalse);
        } else if (*smesh) {
            StarMeshReport rep = star_mesh_cut_system(k);
            r.schema = "star-mesh";
            r.body = pflow::json::to_json(rep);
            r.code = rep.feasible ? kOk : kVerdictFalse;
        } else if (*sparsify) {
            WeightedGraph g = read_graph_file(graph_path);
            PNormParam p = p_param(p_text, err);
            SparsifierResult s = build_sparsifier(g, p, eps, c.seed, oversample);
            r.schema = "sparsify";
            r.body = pflow::json::to_json(s);
            if (do_verify) {
                VerifyReport v = verify_sparsifier(g, s.graph_after, p, {false, pairs, c.seed}, opts);
                r.body["verify"] = pflow::json::to_json(v);
                r.body["verify"]["verdict"] = v.max_rel_error <= eps;
                if (v.max_rel_error > eps) r.code = kVerdictFalse;
            }
            r.graph = s.graph_after;
        } else if (*verify) {
            WeightedGraph g = read_graph_file(graph_path);
            WeightedGraph h = read_graph_file(graph2_path);
            VerifyReport v = verify_sparsifier(g, h, p_param(p_text, err), {all, pairs, c.seed}, opts);
            r.schema = "verify";
            r.body = pflow::json::to_json(v);
            if (verify_eps) {
                r.body["eps"] = pflow::json::num(*verify_eps);
                r.body["verdict"] = v.max_rel_error <= *verify_eps;
                if (v.max_rel_error > *verify_eps) r.code = kVerdictFalse;
            }
        } else if (*exper) {
            r.schema = kind;
            if (kind == "clique-ratio") {
                WeightedGraph g = graph_path.empty() ? gen::clique_minus_edge(n > 0 ? n : 5, 1.0, 1.0)
                                                     : read_graph_file(graph_path);
                RatioReport rr = resistance_ratio(g);
                DegreeConditionReport dc = degree_condition_check(g);
                r.body = {{"n", g.n()}, {"ratio", pflow::json::to_json(rr)}, {"degree_conditions", pflow::json::to_json(dc)}};
                r.code = (rr.verdict && dc.verdict) ? kOk : kVerdictFalse;
            } else if (kind == "symmetric-family") {
                if (grid) {
                    int nmax = n > 0 ? n : 40;
                    if (nmax < 5) throw UsageError("--n must be at least 5");
                    if (steps < 2) throw UsageError("--steps must be at least 2");
                    int cases = 0, failures = 0;
                    double min_margin = std::numeric_limits<double>::infinity();
                    json worst;
                    r.table.push_back(row({"n", "gamma", "r_st", "r_a", "r_b", "ratio"}));
                    for (int nn = 5; nn <= nmax; ++nn)
                        for (int i = 0; i < steps; ++i) {
                            double gamma = std::pow(10.0, -2.0 + 4.0 * i / (steps - 1));
                            SymmetricFamilyReport s = symmetric_family(nn, 1.0, gamma);
                            double margin = (s.ratio - 1.0) * 10.0 * nn;  // > 1 iff ratio > 1 + 1/(10n)
                            ++cases;
                            if (!s.ok || margin <= 1.0) ++failures;
                            if (margin < min_margin) {
                                min_margin = margin;
                                worst = {{"n", nn}, {"gamma", pflow::json::num(gamma)}, {"ratio", pflow::json::num(s.ratio)}};
                            }
                            r.table.push_back(row({std::to_string(nn), fmt(gamma), fmt(s.r_st), fmt(s.r_a), fmt(s.r_b), fmt(s.ratio)}));
                        }
                    r.body = {{"cases", cases},
                              {"failures", failures},
                              {"min_margin", pflow::json::num(min_margin)},
                              {"worst", worst},
                              {"verdict", failures == 0}};
                    r.code = failures == 0 ? kOk : kVerdictFalse;
                } else {
                    int nn = n > 0 ? n : 5;
                    SymmetricFamilyReport s = symmetric_family(nn, alpha, beta);
                    SymmetricHitting h = symmetric_family_hitting(nn, alpha, beta);
                    bool exceeds = s.ratio > 1.0 + 1.0 / (10.0 * nn);
                    r.body = pflow::json::to_json(s);
                    r.body["hitting"] = {{"h_st", pflow::json::num(h.h0)},
                                         {"h_xs", pflow::json::num(h.h1)},
                                         {"h_sx", pflow::json::num(h.h2)},
                                         {"h_xy", pflow::json::num(h.h3)}};
                    r.body["ratio_exceeds_10n"] = exceeds;
                    r.code = !s.ok ? kSolverFailure : (exceeds ? kOk : kVerdictFalse);
                }
            } else if (kind == "expander-sparsifier") {
                ExpanderReport e = expander_clique_sparsifier(n > 0 ? n : 64, eps, c.seed, expander_c);
                r.body = pflow::json::to_json(e);
                r.code = e.verdict ? kOk : kVerdictFalse;
            } else {
                UnionLowerBoundReport u = lower_bound_union(n > 0 ? n : 40, eps);
                r.body = pflow::json::to_json(u);
                r.code = u.verdict ? kOk : kVerdictFalse;
            }
        }
        if (!out_path.empty() && r.graph) {
            std::ofstream f(out_path);
            if (!f) throw UsageError("cannot write " + out_path);
            f << serialize_graph(*r.graph);
        }
        emit(r, c, out);
        return r.code;
    } catch (const SolverError& e) {
        err << "solver failure: " << e.what() << " (achieved gap " << e.achieved_gap() << ")\n";
        return kSolverFailure;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return kUsage;
    } catch (const pflow::ParseError& e) {
        err << "input error: " << e.what() << "\n";
        return kUsage;
    } catch (const GraphError& e) {
        err << "input error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::invalid_argument& e) {
        err << "usage error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::out_of_range& e) {
        err << "usage error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        err << "failure: " << e.what() << "\n";
        return kSolverFailure;
    }
}

}  // namespace pflow::cli
