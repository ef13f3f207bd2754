#include "pflow/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace pflow::json {

json num(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return std::strtod(buf, nullptr);
}

json p_value(const PNormParam& p) { return num(p.p); }

json matrix(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(num(m(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

json with_schema(const std::string& name, json body) {
    json out = json::object();
    out["schema"] = "pflow." + name + "/1";
    for (auto& [k, v] : body.items()) out[k] = v;
    return out;
}

namespace {

json graph_json(const WeightedGraph& g) {
    json edges = json::array();
    for (const auto& e : g.edges()) edges.push_back({e.tail, e.head, num(e.weight)});
    return {{"n", g.n()}, {"m", g.m()}, {"edges", edges}, {"edge_list", serialize_graph(g)}};
}

}  // namespace

json to_json(const SolveReport& r) {
    return {{"p", p_value(r.p)},          {"value", num(r.value())},
            {"primal", num(r.primal)},    {"dual", num(r.dual)},
            {"rel_gap", num(r.rel_gap)},  {"kkt_residual", num(r.kkt_residual)},
            {"iterations", r.iterations}, {"method", r.method}};
}

json to_json(const DistanceMatrix& m) {
    return {{"n", m.n}, {"p", p_value(m.p)}, {"gap_bound", num(m.gap_bound)}, {"values", matrix(m.values)}};
}

json to_json(const FosterReport& r) {
    return {{"p", p_value(r.p)},
            {"form", r.form},
            {"sum", num(r.sum)},
            {"lower_bound", num(r.lower_bound)},
            {"upper_bound", num(r.upper_bound)},
            {"max_edge_term", num(r.max_edge_term)},
            {"edge_bound_ok", r.edge_bound_ok},
            {"verdict", r.verdict}};
}

json to_json(const PStrongReport& r) {
    json v = json::array();
    for (const auto& x : r.violations)
        v.push_back({{"x", x.x}, {"y", x.y}, {"z", x.z}, {"lhs", num(x.lhs)}, {"rhs", num(x.rhs)}});
    return {{"exponent", num(r.exponent)},
            {"triples_checked", r.triples_checked},
            {"exhaustive", r.exhaustive},
            {"violation_count", r.violation_count},
            {"worst_excess", num(r.worst_excess)},
            {"violations", v},
            {"verdict", r.ok()}};
}

json to_json(const MonotonicityReport& r) {
    json ps = json::array(), vals = json::array();
    for (double p : r.ps) ps.push_back(num(p));
    for (double v : r.values) vals.push_back(num(v));
    return {{"ps", ps},
            {"values", vals},
            {"nonincreasing", r.nonincreasing},
            {"edge_count_sandwich", r.edge_count_sandwich},
            {"q_powered", r.q_powered},
            {"weight_scaling", r.weight_scaling},
            {"failures", r.failures},
            {"verdict", r.ok()}};
}

json to_json(const LambdaBoundReport& r) {
    return {{"p", p_value(r.p)},
            {"exact", r.exact},
            {"lambda", num(r.lambda)},
            {"bound", num(r.bound)},
            {"max_distance", num(r.max_distance)},
            {"bound_holds", r.bound_holds},
            {"identity_error", num(r.identity_error)},
            {"samples", r.samples}};
}

json to_json(const CommuteReport& r, bool with_matrices) {
    json j = {{"total_weight", num(r.total_weight)}, {"max_mismatch", num(r.max_mismatch)}, {"verdict", r.ok}};
    if (with_matrices) {
        j["hitting"] = matrix(r.hitting);
        j["commute"] = matrix(r.commute);
        j["resistance"] = matrix(r.resistance);
    }
    return j;
}

json to_json(const TransformResult& r) {
    json created = json::array();
    for (const auto& e : r.created) created.push_back({e.tail, e.head, num(e.weight)});
    return {{"rule", r.rule},
            {"removed_vertices", r.removed_vertices},
            {"removed_edges", r.removed_edges},
            {"created", created},
            {"vertex_map", r.vertex_map},
            {"graph", graph_json(r.graph_after)}};
}

json to_json(const ObstructionReport& r) {
    return {{"p", p_value(r.p)},
            {"alpha1", num(r.alpha1)},
            {"alpha2", num(r.alpha2)},
            {"gap", num(r.gap)},
            {"equal", r.equal},
            {"checks",
             {{"g1_star", num(r.g1_star)},
              {"g1_star_closed", num(r.g1_star_closed)},
              {"g1_triangle", num(r.g1_triangle)},
              {"g2_star", num(r.g2_star)},
              {"g2_star_closed", num(r.g2_star_closed)},
              {"g2_triangle", num(r.g2_triangle)},
              {"g2_sensitivity", num(r.g2_sensitivity)},
              {"max_error", num(r.max_check_error)},
              {"ok", r.checks_ok}}}};
}

json to_json(const StarMeshReport& r) {
    return {{"k", r.k},
            {"feasible", r.feasible},
            {"residual", num(r.residual)},
            {"weights", matrix(r.weights)},
            {"worst_cut", {{"side", r.violated}, {"required", num(r.required)}, {"achieved", num(r.achieved)}}}};
}

json to_json(const SamplingScores& s) {
    json tau = json::array();
    for (double t : s.tau) tau.push_back(num(t));
    return {{"mode", to_string(s.mode)},     {"sum", num(s.sum)},
            {"oversample", num(s.oversample)}, {"iterations", s.iterations},
            {"last_change", num(s.last_change)}, {"tau", tau}};
}

json to_json(const SparsifierResult& r) {
    return {{"p", p_value(r.p)},
            {"eps", num(r.eps)},
            {"seed", r.seed},
            {"used_seed", r.used_seed},
            {"attempts", r.attempts},
            {"method", r.gomory_hu ? "gomory-hu" : "importance-sampling"},
            {"samples", r.samples},
            {"oversample", num(r.oversample)},
            {"oversample_multiplier", num(r.multiplier)},
            {"score_sum", num(r.score_sum)},
            {"kept_bridges", r.kept_bridges},
            {"edge_count", r.edge_count},
            {"graph", graph_json(r.graph_after)}};
}

json to_json(const VerifyReport& r) {
    return {{"max_rel_error", num(r.max_rel_error)},
            {"worst_pair", {r.worst_s, r.worst_t}},
            {"pairs", r.pairs},
            {"exhaustive", r.exhaustive}};
}

json to_json(const RatioReport& r) {
    return {{"max_r", num(r.max_r)},   {"min_r", num(r.min_r)},           {"ratio", num(r.ratio)},
            {"bound", num(r.bound)},   {"bound_name", r.bound_name},       {"verdict", r.verdict}};
}

json to_json(const SymmetricFamilyReport& r) {
    return {{"n", r.n},
            {"alpha", num(r.alpha)},
            {"beta", num(r.beta)},
            {"r_st", num(r.r_st)},
            {"r_a", num(r.r_a)},
            {"r_b", num(r.r_b)},
            {"solved", {num(r.solved_st), num(r.solved_a), num(r.solved_b)}},
            {"max_mismatch", num(r.max_mismatch)},
            {"foster", num(r.foster)},
            {"ratio", num(r.ratio)},
            {"ok", r.ok}};
}

json to_json(const DegreeConditionReport& r) {
    return {{"n", r.n},
            {"complete", r.complete},
            {"avg_degree", num(r.avg_degree)},
            {"conditions",
             {{"min_degree", r.min_degree},
              {"pair_sum", r.pair_sum},
              {"regular", r.regular},
              {"equal_weighted_degrees", r.equal_weighted_degrees},
              {"equal_weights", r.equal_weights},
              {"covariance", r.covariance},
              {"e_form", r.e_form}}},
            {"applicable", r.applicable},
            {"ratio", num(r.ratio)},
            {"bound", num(r.bound)},
            {"verdict", r.verdict}};
}

json to_json(const ExpanderReport& r) {
    return {{"n", r.n},
            {"eps", num(r.eps)},
            {"degree", r.degree},
            {"weight", num(r.weight)},
            {"edge_count", r.edge_count},
            {"used_seed", r.used_seed},
            {"max_rel_error", num(r.max_rel_error)},
            {"resistance_ratio", to_json(r.ratio)},
            {"verdict", r.verdict}};
}

json to_json(const UnionLowerBoundReport& r) {
    return {{"n", r.n},
            {"eps", num(r.eps)},
            {"cliques", r.cliques},
            {"clique_size", r.clique_size},
            {"vertices", r.vertices},
            {"intra_edges", r.intra_edges},
            {"edges_tested", r.edges_tested},
            {"exhaustive", r.exhaustive},
            {"sensitive", r.sensitive},
            {"disconnecting", r.disconnecting},
            {"min_change", num(r.min_change)},
            {"verdict", r.verdict}};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace pflow::json
