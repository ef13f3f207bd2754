// One PASS/FAIL line per acceptance criterion; exits nonzero if any criterion fails.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <mutex>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "pflow/flow_solve.hpp"
#include "pflow/generators.hpp"
#include "pflow/metric_props.hpp"
#include "pflow/parallel.hpp"
#include "pflow/sparsify.hpp"
#include "pflow/transforms.hpp"

using namespace pflow;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// Shared corpus for criteria 2, 3, 5 and 9: connected, n <= 10, weights in [0.1, 10].
const std::vector<WeightedGraph>& corpus() {
    static const std::vector<WeightedGraph> c = oracle::random_corpus(200, 20240601, 10);
    return c;
}

std::vector<std::pair<int, int>> pairs_of(int n) {
    std::vector<std::pair<int, int>> out;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) out.emplace_back(i, j);
    return out;
}

// Running max that several workers can feed.
struct Worst {
    std::mutex mu;
    double value = 0.0;
    std::string where;
    void feed(double v, const std::string& w) {
        std::lock_guard<std::mutex> lock(mu);
        if (!(v <= value)) {
            value = v;
            where = w;
        }
    }
};

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void criterion(int id, double limit_s, const std::function<Outcome()>& body) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool in_time = secs < limit_s;
    bool ok = o.pass && in_time;
    if (!ok) ++failures;
    std::printf("criterion %d: %s  %s  [%.2fs, limit %.0fs%s]\n", id, ok ? "PASS" : "FAIL", o.detail.c_str(), secs,
                limit_s, in_time ? "" : ", TOO SLOW");
    std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

Outcome golden_values() {
    double worst_path = 0.0, worst_clique = 0.0;
    WeightedGraph path = gen::path(3);
    for (double p : {1.5, 2.0, 3.0, 5.0})
        worst_path = std::max(worst_path, rel(d_p(path, DemandPair(0, 2), PNormParam(p)).value(), std::pow(2.0, 1.0 / p)));
    for (int n : {4, 8, 16}) {
        WeightedGraph k = gen::complete(n);
        for (auto [s, t] : pairs_of(n))
            worst_clique = std::max(worst_clique,
                                    std::abs(d_p(k, DemandPair(s, t), PNormParam(2)).value() - std::sqrt(2.0 / n)));
    }
    return {worst_path <= 1e-7 && worst_clique <= 1e-9,
            "path 2^(1/p) max rel err " + fmt("%.2e", worst_path) + ", K_n sqrt(2/n) max err " + fmt("%.2e", worst_clique)};
}

Outcome duality_certificates() {
    Worst gap, kkt;
    std::atomic<long> solves{0};
    const auto& gs = corpus();
    parallel_for(static_cast<int>(gs.size()), [&](int i) {
        const auto& g = gs[i];
        for (auto [s, t] : pairs_of(g.n()))
            for (double p : {1.25, 1.5, 2.0, 3.0, 5.0}) {
                SolveReport r = d_p(g, DemandPair(s, t), PNormParam(p));
                std::string where = "graph " + std::to_string(i) + " p=" + fmt("%g", p);
                gap.feed(r.rel_gap, where);
                kkt.feed(r.kkt_residual, where);
                ++solves;
            }
    });
    return {gap.value <= 1e-8 && kkt.value <= 1e-6,
            std::to_string(solves.load()) + " solves, max rel_gap " + fmt("%.2e", gap.value) + ", max kkt " +
                fmt("%.2e", kkt.value) + (gap.value > 1e-8 ? " at " + gap.where : "") +
                (kkt.value > 1e-6 ? " at " + kkt.where : "")};
}

Outcome oracle_equivalence() {
    const double eps = 0.25;
    Worst bracket, d2, dinf;
    const auto& gs = corpus();
    parallel_for(static_cast<int>(gs.size()), [&](int i) {
        const auto& g = gs[i];
        const double m = g.m();
        const int p_big = static_cast<int>(std::ceil(4.0 / eps * std::log(g.n())));
        for (auto [s, t] : pairs_of(g.n())) {
            DemandPair d(s, t);
            std::string where = "graph " + std::to_string(i);
            // |E|^(1/p - 1) d_1 <= d_p <= d_1
            double d1 = shortest_path_d1(g, d);
            const double p = 1.01;
            double v = solve_dual(g, d, PNormParam(p)).report.value();
            double lo = std::pow(m, 1.0 / p - 1.0) * d1;
            bracket.feed(std::max({0.0, v / d1 - 1.0, lo / v - 1.0}), where);

            double general = solve_dual(g, d, PNormParam(2)).report.value();
            d2.feed(rel(general, resistance_d2(g, d)), where);

            double inf = mincut_dinf(g, d);
            double big = solve_dual(g, d, PNormParam(p_big)).report.value();
            dinf.feed(std::max({0.0, inf / big - 1.0 - 1e-9, big / ((1.0 + eps) * inf) - 1.0}), where);
        }
    });
    bool ok = bracket.value <= 1e-9 && d2.value <= 1e-6 && dinf.value <= 0.0;
    return {ok, "p=1.01 bracket excess " + fmt("%.2e", bracket.value) + ", general vs resistance rel err " +
                    fmt("%.2e", d2.value) + ", d_inf <= d_p <= 1.25 d_inf excess " + fmt("%.2e", dinf.value)};
}

Outcome p_strong_suite() {
    WeightedGraph path = gen::path(3);
    int at_p = 0, over = 0;
    for (double p : {1.5, 2.0, 3.0, 5.0}) {
        DistanceMatrix m = all_pairs(path, PNormParam(p));
        at_p += check_p_strong(m, 1e-9).violation_count;
        over += check_p_strong(m, 1e-9, p + 0.5).violation_count > 0 ? 1 : 0;
    }
    std::atomic<int> corpus_violations{0};
    const auto& gs = corpus();
    parallel_for(60, [&](int i) {
        for (PNormParam p : {PNormParam(1.25), PNormParam(1.5), PNormParam(2), PNormParam(3), PNormParam(5),
                             PNormParam::infinity()})
            corpus_violations += check_p_strong(all_pairs(gs[i], p), 1e-7).violation_count;
    });
    bool ok = at_p == 0 && over == 4 && corpus_violations == 0;
    return {ok, "path: " + std::to_string(at_p) + " violations at p, violated at p+0.5 for " + std::to_string(over) +
                    "/4 values of p; 60-graph corpus violations " + std::to_string(corpus_violations.load())};
}

Outcome foster_suite() {
    std::mt19937_64 rng(77);
    double tree_err = 0.0;
    for (int i = 0; i < 20; ++i) {
        WeightedGraph tree = gen::random_tree(3 + i % 8, 0.1, 10, rng);
        for (PNormParam p : {PNormParam(1.5), PNormParam(2), PNormParam(3), PNormParam::infinity()})
            tree_err = std::max(tree_err, std::abs(foster_sum(tree, p).sum - (tree.n() - 1)));
    }
    double cycle_err = 0.0;
    for (int n : {4, 5, 7, 10, 16}) cycle_err = std::max(cycle_err, rel(foster_sum(gen::cycle(n), PNormParam(1000)).sum, n / 2.0));
    std::atomic<int> bad{0};
    const auto& gs = corpus();
    parallel_for(static_cast<int>(gs.size()), [&](int i) {
        for (PNormParam p : {PNormParam(1), PNormParam(1.5), PNormParam(2), PNormParam(3), PNormParam::infinity()})
            if (!foster_sum(gs[i], p).verdict) ++bad;
    });
    bool ok = tree_err <= 1e-8 && cycle_err <= 0.02 && bad == 0;
    return {ok, "tree |sum-(n-1)| " + fmt("%.2e", tree_err) + ", cycle p=1000 rel dev from n/2 " + fmt("%.4f", cycle_err) +
                    ", corpus false verdicts " + std::to_string(bad.load())};
}

double surviving_change(const WeightedGraph& before, const TransformResult& t, const PNormParam& p) {
    DistanceMatrix a = all_pairs(before, p), b = all_pairs(t.graph_after, p);
    double worst = 0.0;
    for (auto [i, j] : pairs_of(before.n())) {
        int x = t.vertex_map[i], y = t.vertex_map[j];
        if (x >= 0 && y >= 0) worst = std::max(worst, rel(b(x, y), a(i, j)));
    }
    return worst;
}

Outcome transform_exactness() {
    const std::vector<PNormParam> ps{PNormParam(1), PNormParam(1.5), PNormParam(2), PNormParam(3), PNormParam(5),
                                     PNormParam::infinity()};
    Worst red, wye;
    const auto& gs = corpus();
    std::atomic<int> deg2_sites{0}, wye_sites{0};
    parallel_for(static_cast<int>(gs.size()), [&](int i) {
        const auto& g = gs[i];
        auto adj = g.adjacency();
        std::mt19937_64 rng(1000 + i);
        for (int v = 0; v < g.n(); ++v) {
            std::vector<int> nb;
            for (auto [u, e] : adj[v]) nb.push_back(u);
            std::sort(nb.begin(), nb.end());
            bool distinct = std::unique(nb.begin(), nb.end()) == nb.end();
            if (nb.size() == 2 && distinct) {
                ++deg2_sites;
                for (const auto& p : ps) red.feed(surviving_change(g, reduce_degree2(g, v, p), p), "deg2");
            }
            if (nb.size() == 3 && distinct) {
                ++wye_sites;
                wye.feed(surviving_change(g, wye_delta_p2(g, v), PNormParam(2)), "wye");
            }
        }
        auto es = g.edges();
        int e1 = std::uniform_int_distribution<int>(0, g.m() - 1)(rng);
        const Edge base = es[e1];
        es.push_back({base.head, base.tail, std::uniform_real_distribution<double>(0.1, 10)(rng)});
        WeightedGraph h(g.n(), es);
        for (const auto& p : ps) red.feed(surviving_change(h, merge_parallel(h, e1, h.m() - 1, p), p), "parallel");
    });
    ObstructionReport o3 = wye_delta_obstruction(PNormParam(3)), o2 = wye_delta_obstruction(PNormParam(2));
    bool star_ok = true;
    for (int k = 2; k <= 8; ++k) star_ok = star_ok && star_mesh_cut_system(k).feasible == (k <= 3);
    bool ok = red.value <= 1e-6 && wye.value <= 1e-8 && std::abs(o3.gap - 0.029) <= 0.001 && o2.gap <= 1e-12 &&
              o3.checks_ok && o2.checks_ok && star_ok && deg2_sites > 0 && wye_sites > 0;
    return {ok, "deg2/parallel max change " + fmt("%.2e", red.value) + " (" + std::to_string(deg2_sites.load()) +
                    " deg2 sites), wye-delta d_2 change " + fmt("%.2e", wye.value) + " (" +
                    std::to_string(wye_sites.load()) + " sites), obstruction gap p=3 " + fmt("%.6f", o3.gap) +
                    " p=2 " + fmt("%.1e", o2.gap) + ", star-mesh feasible iff k<=3: " + (star_ok ? "yes" : "no")};
}

Outcome lower_bounds() {
    double cube = resistance_ratio(gen::hypercube(3)).ratio;
    double k5e = resistance_ratio(gen::clique_minus_edge(5, 1, 1)).ratio;
    int grid_fail = 0, grid_cases = 0;
    double min_margin = std::numeric_limits<double>::infinity();
    for (int n = 5; n <= 40; ++n)
        for (int i = 0; i <= 80; ++i) {
            double beta = std::pow(10.0, -2.0 + 4.0 * i / 80.0);
            SymmetricFamilyReport r = symmetric_family(n, 1.0, beta);
            ++grid_cases;
            if (!(r.ratio > 1.0 + 1.0 / (10.0 * n)) || !r.ok) ++grid_fail;
            min_margin = std::min(min_margin, (r.ratio - 1.0) * 10.0 * n);
        }
    int union_fail = 0, union_cases = 0;
    for (int n = 4; n <= 40; n += 4)
        for (double eps : {0.05, 0.1, 0.25, 0.5}) {
            UnionLowerBoundReport u = lower_bound_union(n, eps);
            ++union_cases;
            // every one of the ~n/(2 sqrt eps) clique edges is individually necessary
            if (!u.verdict || u.sensitive != u.edges_tested) ++union_fail;
        }
    bool ok = cube >= 1.0 + 1.0 / 14.0 && grid_fail == 0 && std::abs(k5e - 5.0 / 3.0) <= 1e-9 && union_fail == 0;
    return {ok, "Q3 ratio " + fmt("%.6f", cube) + ", K5-e ratio " + fmt("%.12f", k5e) + ", symmetric grid " +
                    std::to_string(grid_cases - grid_fail) + "/" + std::to_string(grid_cases) +
                    " above 1+1/(10n) (min (ratio-1)10n " + fmt("%.3f", min_margin) + "), clique unions " +
                    std::to_string(union_cases - union_fail) + "/" + std::to_string(union_cases) + " fully sensitive"};
}

Outcome sparsifier_behaviour() {
    WeightedGraph k50 = gen::complete(50);
    const PNormParam p(3);
    DistanceMatrix reference = all_pairs(k50, p);
    std::vector<double> errors(10);
    std::vector<int> sizes(10);
    for (int seed = 1; seed <= 10; ++seed) {
        SparsifierResult r = build_sparsifier(k50, p, 0.25, seed);
        sizes[seed - 1] = r.edge_count;
        errors[seed - 1] = verify_sparsifier(reference, r.graph_after, PairSampling{true}).max_rel_error;
    }
    int within = 0;
    double worst = 0.0;
    for (double e : errors) {
        within += e <= 0.25;
        worst = std::max(worst, e);
    }

    // cut-tree branch on K_50 at p = inf and on a weighted graph at p above 4 ln n / eps
    SparsifierResult gh = build_sparsifier(k50, PNormParam::infinity(), 0.25, 1);
    double gh_err = verify_sparsifier(k50, gh.graph_after, PNormParam::infinity(), PairSampling{true}).max_rel_error;
    std::mt19937_64 rng(5);
    WeightedGraph w = gen::random_connected(30, 0.3, 0.1, 10, rng);
    SparsifierResult gh2 = build_sparsifier(w, PNormParam::infinity(), 0.25, 1);
    double gh2_err = verify_sparsifier(w, gh2.graph_after, PNormParam::infinity(), PairSampling{true}).max_rel_error;
    bool gh_ok = gh.gomory_hu && gh.edge_count == 49 && gh_err <= 1e-12 && gh2.gomory_hu && gh2.edge_count == 29 &&
                 gh2_err <= 1e-12;
    return {within >= 8 && gh_ok,
            "K_50 p=3 eps=0.25: " + std::to_string(within) + "/10 seeds within eps (worst " + fmt("%.4f", worst) +
                ", ~" + std::to_string(sizes[0]) + " of 1225 edges kept); cut tree " + std::to_string(gh.edge_count) +
                " edges err " + fmt("%.1e", gh_err) + ", weighted n=30 " + std::to_string(gh2.edge_count) + " edges err " +
                fmt("%.1e", gh2_err)};
}

Outcome commute_identity() {
    Worst mismatch;
    const auto& gs = corpus();
    parallel_for(static_cast<int>(gs.size()), [&](int i) {
        mismatch.feed(commute_check(gs[i]).max_mismatch, "graph " + std::to_string(i));
    });
    return {mismatch.value <= 1e-8, "max rel mismatch C vs 2w(E)R over " + std::to_string(gs.size()) + " graphs " +
                                        fmt("%.2e", mismatch.value)};
}

}  // namespace

int main() {
    criterion(1, 1, golden_values);
    criterion(2, 120, duality_certificates);
    criterion(3, 120, oracle_equivalence);
    criterion(4, 60, p_strong_suite);
    criterion(5, 120, foster_suite);
    criterion(6, 120, transform_exactness);
    criterion(7, 180, lower_bounds);
    criterion(8, 600, sparsifier_behaviour);
    criterion(9, 60, commute_identity);
    std::printf("%d of 9 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
