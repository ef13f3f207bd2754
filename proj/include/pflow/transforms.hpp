#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "pflow/flow_solve.hpp"
#include "pflow/graph.hpp"

namespace pflow {

struct TransformResult {
    WeightedGraph graph_after;
    std::string rule;
    std::vector<int> removed_vertices;  // indices in the input graph
    std::vector<int> removed_edges;     // indices in the input graph
    std::vector<Edge> created;          // endpoints in the output graph's numbering
    std::vector<int> vertex_map;        // input vertex -> output vertex, -1 if removed
};

// Two edges in series: (alpha^-p + beta^-p)^(-1/p), min at p = inf.
double series_weight(double alpha, double beta, const PNormParam& p);
// Two edges in parallel: (alpha^q + beta^q)^(1/q), max at p = 1.
double parallel_weight(double alpha, double beta, const PNormParam& p);

TransformResult reduce_degree2(const WeightedGraph& g, int x, const PNormParam& p);
TransformResult merge_parallel(const WeightedGraph& g, int e1, int e2, const PNormParam& p);
// Replaces a degree-3 star by the d_2-preserving triangle; new edges parallel to
// existing ones are merged at once with the p = 2 parallel rule.
TransformResult wye_delta_p2(const WeightedGraph& g, int r);

struct ObstructionReport {
    PNormParam p;
    double alpha1 = 0.0;  // forced by the unit 3-star
    double alpha2 = 0.0;  // forced by the star with b, c tied together
    double gap = 0.0;
    bool equal = false;   // gap <= 1e-9
    // Solver cross-checks of the dual values (d-bar^q) that force alpha1 and alpha2.
    double g1_star = 0.0, g1_star_closed = 0.0, g1_triangle = 0.0;
    double g2_star = 0.0, g2_star_closed = 0.0, g2_triangle = 0.0;
    double g2_sensitivity = 0.0;  // change when the tie weight doubles from 1e9 to 2e9
    double max_check_error = 0.0;
    bool checks_ok = false;
};

inline constexpr double kTieWeight = 1e9;

// Unit 3-star on {r=0, a=1, b=2, c=3} plus vertex v=4 joined to b and c with weight tie.
WeightedGraph obstruction_g2(double tie = kTieWeight);
ObstructionReport wye_delta_obstruction(const PNormParam& p, const SolveOptions& opts = {});

struct StarMeshReport {
    int k = 0;
    bool feasible = false;
    Eigen::MatrixXd weights;     // clique weights on the k leaves (NNLS solution)
    double residual = 0.0;       // ||A x - b||_2 over all bipartitions
    std::vector<int> violated;   // leaves on one side of the worst bipartition
    double required = 0.0;       // its required crossing weight, min(|S|, k - |S|)
    double achieved = 0.0;       // crossing weight under the NNLS solution
};

// Does a nonnegative clique on the k leaves of a unit star reproduce every leaf min-cut?
StarMeshReport star_mesh_cut_system(int k);

// Lawson-Hanson NNLS on the normal equations: min ||Ax - b|| with x >= 0, given A^T A and A^T b.
Eigen::VectorXd nnls_normal(const Eigen::MatrixXd& AtA, const Eigen::VectorXd& Atb, int max_iter = 1000);

}  // namespace pflow
