#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pflow/flow_solve.hpp"
#include "pflow/graph.hpp"

namespace pflow {

struct DistanceMatrix {
    int n = 0;
    PNormParam p;
    Eigen::MatrixXd values;
    double gap_bound = 0.0;  // worst rel_gap over the entries

    double operator()(int i, int j) const { return values(i, j); }
};

// One independent solve per unordered pair; spread over hardware threads when available.
DistanceMatrix all_pairs(const WeightedGraph& g, const PNormParam& p, const SolveOptions& opts = {});

struct FosterReport {
    PNormParam p;
    std::string form;          // "sum" for p > 1, "max" for the p = 1 limit
    double sum = 0.0;          // sum of (w d_p)^q, or max of w d_1 in the "max" form
    double lower_bound = 0.0;
    double upper_bound = 0.0;
    double max_edge_term = 0.0;  // max over edges of (w d_p)^q
    bool edge_bound_ok = false;
    bool verdict = false;
};

FosterReport foster_sum(const WeightedGraph& g, const PNormParam& p, const SolveOptions& opts = {},
                        double tol = 1e-6);

struct Violation {
    int x, y, z;
    double lhs, rhs;
};

struct PStrongReport {
    double exponent = 0.0;
    long long triples_checked = 0;
    bool exhaustive = true;
    long long violation_count = 0;
    double worst_excess = 0.0;        // max of (lhs - rhs) / max(lhs, rhs)
    std::vector<Violation> violations;  // first 1000 only
    bool ok() const { return violation_count == 0; }
};

// d(x,y)^r <= d(x,z)^r + d(z,y)^r with r = exponent (default m.p); r = inf is the ultrametric form.
PStrongReport check_p_strong(const DistanceMatrix& m, double tol, std::optional<double> exponent = std::nullopt,
                             std::uint64_t seed = 1);

struct MonotonicityReport {
    std::vector<double> ps;
    std::vector<double> values;  // d_p for each p
    bool nonincreasing = true;
    bool edge_count_sandwich = true;
    bool q_powered = true;
    bool weight_scaling = true;
    std::vector<std::string> failures;
    bool ok() const { return nonincreasing && edge_count_sandwich && q_powered && weight_scaling; }
};

MonotonicityReport check_monotonicity(const WeightedGraph& g, const DemandPair& d, const std::vector<PNormParam>& ps,
                                      double tol = 1e-6, const SolveOptions& opts = {});

struct LambdaBoundReport {
    PNormParam p;
    bool exact = false;           // q = 2: lambda_2 computed exactly and the bound asserted
    double lambda = 0.0;          // exact lambda_2, or the smallest sampled Rayleigh quotient
    double bound = 0.0;           // (2 / lambda)^(1/q)
    double max_distance = 0.0;    // only when exact
    bool bound_holds = true;      // only asserted when exact
    double identity_error = 0.0;  // max |<phi, L_q phi> - ||W B phi||_q^q| / scale over the samples
    int samples = 0;
};

// (L_q phi)_x = sum over edges xy of w^q (phi_x - phi_y) |phi_x - phi_y|^(q-2)
Eigen::VectorXd q_laplacian_apply(const WeightedGraph& g, const Eigen::VectorXd& phi, double q);

LambdaBoundReport lambda_bound_report(const WeightedGraph& g, const PNormParam& p, int samples = 200,
                                      std::uint64_t seed = 1);

struct CommuteReport {
    Eigen::MatrixXd hitting;     // hitting(u, v): expected steps from u to first reach v
    Eigen::MatrixXd commute;
    Eigen::MatrixXd resistance;  // unsquared weights as conductances
    double total_weight = 0.0;
    double max_mismatch = 0.0;   // max relative |C - 2 w(E) R|
    bool ok = false;
};

CommuteReport commute_check(const WeightedGraph& g, double tol = 1e-8);

// Closed-form hitting times on K_n minus {s,t} with weights alpha (touching s or t) and beta.
struct SymmetricHitting {
    double h0, h1, h2, h3;  // h(s,t), h(x,s), h(s,x), h(x,y)
};
SymmetricHitting symmetric_family_hitting(int n, double alpha, double beta);

}  // namespace pflow
