#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pflow/graph.hpp"

namespace pflow {

struct FlowAssignment {
    DemandPair demand;
    std::vector<double> values;
};

struct PotentialAssignment {
    std::vector<double> values;
};

struct SolveReport {
    double primal = 0.0;        // ||W^-1 f||_p of a feasible unit flow: upper bound on d_p
    double dual = 0.0;          // (phi_s - phi_t) / ||W B phi||_q: lower bound on d_p
    double rel_gap = 0.0;
    double kkt_residual = 0.0;
    int iterations = 0;
    PNormParam p;
    std::string method;

    double value() const { return dual; }
};

struct SolveOptions {
    double tol = 1e-8;
    int max_iterations = 10000;
    // Keep iterating past tol until the KKT residual reaches this, unless progress stalls.
    double kkt_target = 1e-9;
};

struct FlowSolution {
    FlowAssignment flow;
    PotentialAssignment potentials;  // normalised so that phi_s - phi_t = 1
    SolveReport report;
};

class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, FlowSolution best)
        : std::runtime_error(what), best_(std::move(best)) {}
    const FlowSolution& best() const { return best_; }
    double achieved_gap() const { return best_.report.rel_gap; }

private:
    FlowSolution best_;
};

double flow_cost(const WeightedGraph& g, std::span<const double> f, const PNormParam& p);
double flow_cost(const WeightedGraph& g, const FlowAssignment& f, const PNormParam& p);
// ||W B phi||_q.
double dual_cost(const WeightedGraph& g, std::span<const double> phi, const PNormParam& p);

// f(xy) = w^q (phi_x - phi_y) |phi_x - phi_y|^(q-2), unnormalised.
std::vector<double> kkt_flow_from_potentials(const WeightedGraph& g, std::span<const double> phi,
                                             const PNormParam& p);

struct KktReport {
    double edge_residual = 0.0;
    double feasibility_residual = 0.0;
    double residual = 0.0;
    bool optimal = false;
};

// phi in the scaling phi_s - phi_t = d_p^p, where phi_x - phi_y = f|f|^(p-2) / w^p holds exactly.
KktReport kkt_check(const WeightedGraph& g, const FlowAssignment& f, std::span<const double> phi,
                    const PNormParam& p, double tol);

// Rescales potentials with phi_s - phi_t = 1 to the scaling kkt_check expects.
std::vector<double> kkt_scaled_potentials(const FlowSolution& sol);

double shortest_path_d1(const WeightedGraph& g, const DemandPair& d);
// Returns d_2 itself, the square root of the resistance under conductances w^2.
double resistance_d2(const WeightedGraph& g, const DemandPair& d);
double mincut_dinf(const WeightedGraph& g, const DemandPair& d);

// Finite 1 < p < inf. Both return a certified (flow, potentials) pair. Newton runs on
// whichever side of the duality has exponent >= 2.
FlowSolution solve_dual(const WeightedGraph& g, const DemandPair& d, const PNormParam& p,
                        const SolveOptions& opts = {});
FlowSolution solve_primal(const WeightedGraph& g, const DemandPair& d, const PNormParam& p,
                          const SolveOptions& opts = {});

// Dispatches p = 1, 2, inf to the combinatorial / linear solvers, everything else to Newton.
FlowSolution solve(const WeightedGraph& g, const DemandPair& d, const PNormParam& p,
                   const SolveOptions& opts = {});
SolveReport d_p(const WeightedGraph& g, const DemandPair& d, const PNormParam& p,
                const SolveOptions& opts = {});

}  // namespace pflow
