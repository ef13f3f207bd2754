#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pflow/flow_solve.hpp"
#include "pflow/graph.hpp"
#include "pflow/metric_props.hpp"

namespace pflow {

enum class ScoreMode { ExactQ2, LewisIterative };

ScoreMode parse_score_mode(const std::string& s);
std::string to_string(ScoreMode m);

struct SamplingScores {
    std::vector<double> tau;
    double sum = 0.0;
    double oversample = 0.0;  // g(n, eps, q) when attached to a sparsifier run, else 0
    ScoreMode mode = ScoreMode::ExactQ2;
    int iterations = 0;
    double last_change = 0.0;  // max relative change in the final fixed-point sweep
};

// Leverage scores of W B (q = 2) or l_q Lewis weights by fixed-point iteration (q != 2).
SamplingScores sampling_scores(const WeightedGraph& g, const PNormParam& p, ScoreMode mode);
// Default mode for p: exact leverage scores at q = 2, Lewis weights elsewhere.
ScoreMode default_score_mode(const PNormParam& p);

// Oversampling factor with leading constant 1; inner logarithms clamped at 1.
double oversample_factor(int n, double eps, double q);

struct SparsifierResult {
    WeightedGraph graph_after;
    int edge_count = 0;
    std::uint64_t seed = 0;       // requested seed
    std::uint64_t used_seed = 0;  // seed of the accepted draw
    int attempts = 0;
    double eps = 0.0;
    PNormParam p;
    bool gomory_hu = false;
    long long samples = 0;        // N
    double oversample = 0.0;      // g(n, eps, q)
    double multiplier = 1.0;      // user oversample multiplier
    double score_sum = 0.0;
    int kept_bridges = 0;         // full-score edges carried over unsampled
};

// p >= 4 log(n) / eps: Gomory-Hu tree. Otherwise importance sampling with replacement;
// edges of score 1 (bridges) are kept as they are.
SparsifierResult build_sparsifier(const WeightedGraph& g, const PNormParam& p, double eps, std::uint64_t seed,
                                  double multiplier = 1.0);

// Gusfield's cut tree from n - 1 max-flows: every tree edge induces a minimum cut of g.
WeightedGraph gomory_hu(const WeightedGraph& g);

struct PairSampling {
    bool all = false;        // force all pairs
    int count = 500;         // sampled pairs when not exhaustive
    std::uint64_t seed = 1;
};

struct VerifyReport {
    double max_rel_error = 0.0;
    int worst_s = -1, worst_t = -1;
    int pairs = 0;
    bool exhaustive = false;
};

// Max over pairs of |d_G'(s,t) - d_G(s,t)| / d_G(s,t); all pairs when n <= 30.
VerifyReport verify_sparsifier(const WeightedGraph& g, const WeightedGraph& h, const PNormParam& p,
                               const PairSampling& pairs = {}, const SolveOptions& opts = {});
// Same, against a precomputed all-pairs matrix for g.
VerifyReport verify_sparsifier(const DistanceMatrix& reference, const WeightedGraph& h,
                               const PairSampling& pairs = {}, const SolveOptions& opts = {});

// Effective resistances here use the weights themselves as conductances.
Eigen::MatrixXd plain_resistances(const WeightedGraph& g);

struct RatioReport {
    double max_r = 0.0, min_r = 0.0, ratio = 1.0;
    double bound = 1.0;  // 1 + 1/(n^2 - 4n + 3) for non-complete graphs with n >= 4, else 1
    std::string bound_name;
    bool verdict = true;
};

RatioReport resistance_ratio(const WeightedGraph& g);

struct SymmetricFamilyReport {
    int n = 0;
    double alpha = 0.0, beta = 0.0;
    double r_st = 0.0, r_a = 0.0, r_b = 0.0;                 // closed forms
    double solved_st = 0.0, solved_a = 0.0, solved_b = 0.0;  // Laplacian solves
    double max_mismatch = 0.0;
    double foster = 0.0;  // 2(n-2) alpha R_A + C(n-2,2) beta R_B
    double ratio = 0.0;   // max / min of the three
    bool ok = false;      // mismatch <= 1e-9 and foster = n - 1 to 1e-9
};

// K_n minus {s,t}; edges touching s or t weigh alpha, the rest beta. A = (s,x), B = (x,y).
SymmetricFamilyReport symmetric_family(int n, double alpha, double beta);

struct DegreeConditionReport {
    int n = 0;
    bool complete = false;
    double avg_degree = 0.0;  // D_w = 2 w(E) / n
    bool min_degree = false;  // some deg_w(v) <= D_w/2 (1 + 1/2n)
    bool pair_sum = false;    // some deg_w(s) + deg_w(t) + 2w(st) <= 2 D_w (1 + 1/2n)
    bool regular = false;
    bool equal_weighted_degrees = false;
    bool equal_weights = false;
    bool covariance = false;  // sum deg_w N >= 4 m w(E) / n, with m < C(n,2)
    bool e_form = false;      // sum deg_w N <= 4 m w(E) / n - 2 w(E)
    bool applicable = false;
    double ratio = 0.0;
    double bound = 0.0;       // 1 + 1/(2(n-1))
    bool verdict = true;      // ratio >= bound - tol whenever applicable
};

DegreeConditionReport degree_condition_check(const WeightedGraph& g, double tol = 1e-9);

struct ExpanderReport {
    int n = 0;
    double eps = 0.0;
    int degree = 0;
    double weight = 0.0;
    int edge_count = 0;
    std::uint64_t used_seed = 0;
    double max_rel_error = 0.0;  // max |R - 2/n| / (2/n)
    RatioReport ratio;
    bool verdict = false;        // max_rel_error <= eps
    WeightedGraph graph;
};

ExpanderReport expander_clique_sparsifier(int n, double eps, std::uint64_t seed, double c = 8.0);

struct UnionLowerBoundReport {
    int n = 0;
    double eps = 0.0;
    int cliques = 0, clique_size = 0, vertices = 0;
    int intra_edges = 0;          // edges any eps-resistance sparsifier of this graph must keep
    int edges_tested = 0;
    bool exhaustive = false;
    int sensitive = 0;            // removals changing some R by more than eps/4
    int disconnecting = 0;        // removals that disconnect (infinite change)
    double min_change = 0.0;      // smallest max-relative change over removals (inf if all disconnect)
    bool verdict = false;         // every intra-clique removal is sensitive
};

UnionLowerBoundReport lower_bound_union(int n, double eps);

}  // namespace pflow
