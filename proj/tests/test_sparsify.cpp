#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <tuple>

#include "oracles.hpp"
#include "pflow/generators.hpp"
#include "pflow/metric_props.hpp"
#include "pflow/sparsify.hpp"

using namespace pflow;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

std::vector<Edge> sorted_edges(const WeightedGraph& g) {
    std::vector<Edge> es;
    for (const auto& e : g.edges()) es.push_back({std::min(e.tail, e.head), std::max(e.tail, e.head), e.weight});
    std::sort(es.begin(), es.end(), [](const Edge& a, const Edge& b) {
        return std::tie(a.tail, a.head, a.weight) < std::tie(b.tail, b.head, b.weight);
    });
    return es;
}

// Min cut between s and t read off a tree: the lightest edge on the tree path.
double tree_path_min(const WeightedGraph& tree, int s, int t) {
    auto adj = tree.adjacency();
    std::vector<double> best(tree.n(), -1.0);
    std::vector<int> stack{s};
    best[s] = std::numeric_limits<double>::infinity();
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (auto [u, e] : adj[v])
            if (best[u] < 0) {
                best[u] = std::min(best[v], tree.edge(e).weight);
                stack.push_back(u);
            }
    }
    return best[t];
}

}  // namespace

TEST_CASE("leverage scores: trees, cliques, parallel pairs") {
    std::mt19937_64 rng(4);
    WeightedGraph tree = gen::random_tree(11, 0.2, 5, rng);
    for (PNormParam p : {PNormParam(2), PNormParam(3), PNormParam(1.5)}) {
        SamplingScores s = sampling_scores(tree, p, default_score_mode(p));
        for (double t : s.tau) CHECK(std::abs(t - 1.0) <= 1e-9);
        CHECK(std::abs(s.sum - 10.0) <= 1e-8);
    }
    for (int n : {4, 7, 12}) {
        SamplingScores s = sampling_scores(gen::complete(n), PNormParam(2), ScoreMode::ExactQ2);
        for (double t : s.tau) CHECK(t == doctest::Approx(2.0 / n).epsilon(1e-10));
    }
    WeightedGraph twin(2, {{0, 1, 1.0}, {1, 0, 1.0}});
    for (PNormParam p : {PNormParam(2), PNormParam(3)}) {
        SamplingScores s = sampling_scores(twin, p, default_score_mode(p));
        CHECK(s.tau[0] == doctest::Approx(0.5));
        CHECK(s.tau[1] == doctest::Approx(0.5));
    }
}

TEST_CASE("score sums and the Lewis fixed point") {
    for (const auto& g : oracle::random_corpus(20, 17, 10)) {
        SamplingScores s2 = sampling_scores(g, PNormParam(2), ScoreMode::ExactQ2);
        CHECK(std::abs(s2.sum - (g.n() - 1)) <= 1e-6);
        Eigen::MatrixXd R = oracle::pinv_resistance(g, 2.0);
        for (int e = 0; e < g.m(); ++e) {
            const auto& ed = g.edge(e);
            CHECK(std::abs(s2.tau[e] - ed.weight * ed.weight * R(ed.tail, ed.head)) <= 1e-9);
        }

        for (double p : {3.0, 1.5}) {
            const double q = PNormParam(p).q;
            SamplingScores s = sampling_scores(g, PNormParam(p), ScoreMode::LewisIterative);
            CHECK(s.mode == ScoreMode::LewisIterative);
            CHECK(s.last_change <= 1e-4);
            CHECK(std::abs(s.sum - (g.n() - 1)) <= 1e-3 * (g.n() - 1));
            // tau_e = (w_e^2 R(e))^(q/2) with conductances w^2 tau^(1 - 2/q)
            std::vector<Edge> es;
            for (int e = 0; e < g.m(); ++e) {
                const auto& ed = g.edge(e);
                es.push_back({ed.tail, ed.head, ed.weight * std::pow(s.tau[e], 0.5 - 1.0 / q)});
            }
            Eigen::MatrixXd Rq = oracle::pinv_resistance(WeightedGraph(g.n(), es), 2.0);
            for (int e = 0; e < g.m(); ++e) {
                const auto& ed = g.edge(e);
                double fixed = std::pow(ed.weight * ed.weight * Rq(ed.tail, ed.head), q / 2.0);
                CHECK(rel(fixed, s.tau[e]) <= 1e-3);
            }
        }
    }
}

TEST_CASE("score mode validation") {
    WeightedGraph g = gen::complete(5);
    CHECK_THROWS_AS(sampling_scores(g, PNormParam(3), ScoreMode::ExactQ2), std::invalid_argument);
    CHECK_THROWS(sampling_scores(g, PNormParam(1), ScoreMode::LewisIterative));
    CHECK_THROWS(sampling_scores(g, PNormParam::infinity(), ScoreMode::LewisIterative));
    CHECK(parse_score_mode("exact-q2") == ScoreMode::ExactQ2);
    CHECK(parse_score_mode("lewis-iterative") == ScoreMode::LewisIterative);
    CHECK_THROWS(parse_score_mode("exact"));
    CHECK(default_score_mode(PNormParam(2)) == ScoreMode::ExactQ2);
    CHECK(default_score_mode(PNormParam(3)) == ScoreMode::LewisIterative);
}

TEST_CASE("oversampling factor") {
    CHECK(oversample_factor(50, 0.25, 1.5) == doctest::Approx(235.68501339949967).epsilon(1e-12));
    CHECK(oversample_factor(50, 0.25, 3.0) == doctest::Approx(39268.274263114145).epsilon(1e-12));
    CHECK(oversample_factor(10, 0.1, 1.0) == doctest::Approx(230.25850929940458).epsilon(1e-12));
    CHECK(oversample_factor(50, 0.1, 1.5) > oversample_factor(50, 0.25, 1.5));
}

TEST_CASE("gomory-hu trees") {
    std::mt19937_64 rng(21);
    for (int i = 0; i < 10; ++i) {
        WeightedGraph tree = gen::random_tree(6 + i, 0.1, 10, rng);
        CHECK(sorted_edges(gomory_hu(tree)) == sorted_edges(tree));
    }
    WeightedGraph k4 = gomory_hu(gen::complete(4)), k3 = gomory_hu(gen::complete(3));
    CHECK(k4.m() == 3);
    for (const auto& e : k4.edges()) CHECK(e.weight == doctest::Approx(3.0));
    for (const auto& e : k3.edges()) CHECK(e.weight == doctest::Approx(2.0));
    for (const auto& g : oracle::random_corpus(25, 33, 9)) {
        WeightedGraph t = gomory_hu(g);
        CHECK(t.m() == g.n() - 1);
        for (int s = 0; s < g.n(); ++s)
            for (int u = s + 1; u < g.n(); ++u)
                CHECK(rel(tree_path_min(t, s, u), oracle::brute_min_cut(g, s, u)) <= 1e-9);
    }
}

TEST_CASE("sparsifier: trees come back unchanged") {
    std::mt19937_64 rng(8);
    for (int i = 0; i < 6; ++i) {
        WeightedGraph tree = gen::random_tree(8 + 3 * i, 0.1, 10, rng);
        for (double p : {2.0, 3.0, 1.5}) {
            SparsifierResult r = build_sparsifier(tree, PNormParam(p), 0.25, 5);
            CHECK(sorted_edges(r.graph_after) == sorted_edges(tree));
            CHECK(r.kept_bridges == tree.m());
        }
    }
}

TEST_CASE("sparsifier: large p takes the cut tree") {
    std::mt19937_64 rng(13);
    WeightedGraph g = gen::random_connected(12, 0.5, 0.5, 4, rng);
    SparsifierResult r = build_sparsifier(g, PNormParam::infinity(), 0.3, 1);
    CHECK(r.gomory_hu);
    CHECK(r.edge_count == 11);
    CHECK(verify_sparsifier(g, r.graph_after, PNormParam::infinity()).max_rel_error <= 1e-9);

    // 4 ln(12) / 0.3 = 33.1
    SparsifierResult big = build_sparsifier(g, PNormParam(40), 0.3, 1);
    CHECK(big.gomory_hu);
    SparsifierResult small = build_sparsifier(g, PNormParam(30), 0.3, 1);
    CHECK_FALSE(small.gomory_hu);
}

TEST_CASE("sparsifier: K_20 at p = 3 stays within eps") {
    WeightedGraph k20 = gen::complete(20);
    SparsifierResult r = build_sparsifier(k20, PNormParam(3), 0.25, 7);
    CHECK_FALSE(r.gomory_hu);
    CHECK(r.edge_count <= k20.m());
    VerifyReport v = verify_sparsifier(k20, r.graph_after, PNormParam(3));
    CHECK(v.exhaustive);
    CHECK(v.pairs == 190);
    CHECK(v.max_rel_error <= 0.25);

    SparsifierResult again = build_sparsifier(k20, PNormParam(3), 0.25, 7);
    CHECK(sorted_edges(again.graph_after) == sorted_edges(r.graph_after));
    CHECK(again.used_seed == r.used_seed);
}

TEST_CASE("sparsifier argument validation") {
    WeightedGraph g = gen::complete(6);
    CHECK_THROWS(build_sparsifier(g, PNormParam(4.0 / 3.0), 0.25, 1));
    CHECK_THROWS(build_sparsifier(g, PNormParam(1.2), 0.25, 1));
    CHECK_THROWS(build_sparsifier(g, PNormParam(3), 0.0, 1));
    CHECK_THROWS(build_sparsifier(g, PNormParam(3), 1.0, 1));
    CHECK_NOTHROW(build_sparsifier(g, PNormParam(1.34), 0.5, 1));
}

TEST_CASE("verify: identity and uniform scaling") {
    std::mt19937_64 rng(3);
    WeightedGraph g = gen::random_connected(9, 0.4, 0.5, 3, rng);
    std::vector<Edge> doubled;
    for (const auto& e : g.edges()) doubled.push_back({e.tail, e.head, 2.0 * e.weight});
    WeightedGraph h(g.n(), doubled);
    for (PNormParam p : {PNormParam(1.5), PNormParam(2), PNormParam(3), PNormParam::infinity()}) {
        VerifyReport same = verify_sparsifier(g, g, p);
        CHECK(same.max_rel_error <= 1e-9);
        CHECK(same.pairs == 36);
        VerifyReport half = verify_sparsifier(g, h, p);
        CHECK(std::abs(half.max_rel_error - 0.5) <= 1e-7);
    }
    CHECK_THROWS(verify_sparsifier(g, gen::complete(5), PNormParam(2)));
}

TEST_CASE("resistance ratio examples") {
    for (int n : {3, 5, 9}) {
        RatioReport r = resistance_ratio(gen::complete(n));
        CHECK(r.ratio == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(r.verdict);
    }
    RatioReport k5e = resistance_ratio(gen::clique_minus_edge(5, 1, 1));
    CHECK(std::abs(k5e.ratio - 5.0 / 3.0) <= 1e-9);
    CHECK(k5e.bound == doctest::Approx(1.0 + 1.0 / 8.0));
    CHECK(k5e.verdict);
    RatioReport cube = resistance_ratio(gen::hypercube(3));
    CHECK(std::abs(cube.ratio - 10.0 / 7.0) <= 1e-9);
    CHECK(cube.ratio >= 1.0 + 1.0 / 14.0);
    CHECK(cube.verdict);
}

TEST_CASE("resistance ratio against the pseudoinverse") {
    for (const auto& g : oracle::random_corpus(60, 91, 10)) {
        RatioReport r = resistance_ratio(g);
        Eigen::MatrixXd R = oracle::pinv_resistance(g, 1.0);
        double hi = 0.0, lo = std::numeric_limits<double>::infinity();
        for (int i = 0; i < g.n(); ++i)
            for (int j = i + 1; j < g.n(); ++j) {
                hi = std::max(hi, R(i, j));
                lo = std::min(lo, R(i, j));
            }
        CHECK(rel(r.ratio, hi / lo) <= 1e-9);
        CHECK(r.verdict);
        CHECK(r.ratio >= r.bound * (1 - 1e-12));
    }
}

TEST_CASE("symmetric family closed forms") {
    SymmetricFamilyReport u = symmetric_family(5, 1, 1);
    CHECK(u.r_st == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(u.r_a == doctest::Approx(7.0 / 15.0).epsilon(1e-12));
    CHECK(u.r_b == doctest::Approx(2.0 / 5.0).epsilon(1e-12));
    CHECK(u.foster == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(u.ok);

    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> wd(0.1, 10);
    std::uniform_int_distribution<int> nd(5, 14);
    for (int i = 0; i < 50; ++i) {
        int n = nd(rng);
        double a = wd(rng), b = wd(rng);
        SymmetricFamilyReport r = symmetric_family(n, a, b);
        Eigen::MatrixXd R = oracle::pinv_resistance(gen::clique_minus_edge(n, a, b), 1.0);
        CHECK(rel(r.r_st, R(0, 1)) <= 1e-9);
        CHECK(rel(r.r_a, R(0, 2)) <= 1e-9);
        CHECK(rel(r.r_b, R(2, 3)) <= 1e-9);
        CHECK(r.ok);
        CHECK(r.ratio > 1.0 + 1.0 / (10.0 * n));
    }
    CHECK_THROWS(symmetric_family(4, 1, 1));
}

TEST_CASE("symmetric family over a weight grid") {
    for (int n : {5, 8, 13, 21, 40}) {
        double worst = std::numeric_limits<double>::infinity();
        for (int i = 0; i <= 40; ++i) {
            double beta = std::pow(10.0, -2.0 + 4.0 * i / 40.0);
            worst = std::min(worst, symmetric_family(n, 1.0, beta).ratio);
        }
        CHECK(worst > 1.0 + 1.0 / (10.0 * n));
    }
}

TEST_CASE("degree conditions") {
    std::mt19937_64 rng(44);
    for (int i = 0; i < 60; ++i) {
        int n = 2 * (3 + i % 6);
        WeightedGraph g = gen::random_regular(n, 3, rng);
        DegreeConditionReport r = degree_condition_check(g);
        CHECK(r.regular);
        CHECK(r.equal_weighted_degrees);
        CHECK(r.applicable);
        CHECK(r.verdict);
        CHECK(r.ratio >= r.bound - 1e-9);
    }
    for (const auto& g : oracle::random_corpus(200, 45, 10)) {
        DegreeConditionReport r = degree_condition_check(g);
        CHECK(r.verdict);
    }
    for (const auto& g : oracle::random_corpus(100, 46, 9)) {
        std::vector<Edge> unit;
        for (const auto& e : g.edges()) unit.push_back({e.tail, e.head, 1.0});
        DegreeConditionReport r = degree_condition_check(WeightedGraph(g.n(), unit));
        CHECK(r.verdict);
    }
    DegreeConditionReport k = degree_condition_check(gen::complete(7));
    CHECK(k.complete);
    CHECK_FALSE(k.regular);
    CHECK(k.ratio == doctest::Approx(1.0));
}

TEST_CASE("expander sparsifier of the clique") {
    ExpanderReport r = expander_clique_sparsifier(64, 0.5, 1);
    CHECK(r.degree == 16);
    CHECK(r.edge_count == 512);
    CHECK(r.weight == doctest::Approx(4.0));
    CHECK(r.verdict);
    CHECK(r.max_rel_error <= 0.5);
    CHECK(r.ratio.ratio > 1.0 + 1.0 / (2.0 * 63.0));
    for (int d : r.graph.degrees()) CHECK(d == 16);

    Eigen::MatrixXd R = oracle::pinv_resistance(r.graph, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 64; ++i)
        for (int j = i + 1; j < 64; ++j) worst = std::max(worst, std::abs(R(i, j) - 2.0 / 64) / (2.0 / 64));
    CHECK(std::abs(worst - r.max_rel_error) <= 1e-9);
    CHECK_THROWS(expander_clique_sparsifier(63, 0.5, 1));
}

TEST_CASE("lower bound on a union of cliques") {
    for (int n : {8, 20, 40}) {
        for (double eps : {0.25, 0.5}) {
            UnionLowerBoundReport r = lower_bound_union(n, eps);
            CHECK(r.clique_size == 2);
            CHECK(r.cliques == static_cast<int>(std::ceil(std::sqrt(eps) * n)));
            CHECK(r.intra_edges == r.cliques);
            CHECK(r.disconnecting == r.edges_tested);
            CHECK(r.sensitive == r.edges_tested);
            CHECK(r.verdict);
        }
    }
    // k = 5: removing a clique edge lifts its resistance from 2/5 to 2/3
    // the 1e-9 links between cliques cost about five digits in the resistances
    UnionLowerBoundReport r = lower_bound_union(80, 0.05);
    CHECK(r.clique_size == 5);
    CHECK(r.cliques == 18);
    CHECK(r.vertices == 90);
    CHECK(r.intra_edges == 180);
    CHECK_FALSE(r.exhaustive);
    CHECK(r.edges_tested == 30);
    CHECK(r.disconnecting == 0);
    CHECK(std::abs(r.min_change - 2.0 / 3.0) <= 1e-4);
    CHECK(r.verdict);
    UnionLowerBoundReport small = lower_bound_union(40, 0.05);
    CHECK(small.exhaustive);
    CHECK(small.intra_edges == 90);
    CHECK(small.edges_tested == small.intra_edges);
    CHECK(small.verdict);
}
