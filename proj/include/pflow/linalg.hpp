#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <memory>
#include <span>
#include <vector>

#include "pflow/graph.hpp"

namespace pflow::linalg {

struct Conductance {
    int a;
    int b;
    double c;
};

// c_e = w_e^power for every edge of g.
std::vector<Conductance> conductances(const WeightedGraph& g, double power);

Eigen::MatrixXd dense_laplacian(int n, std::span<const Conductance> edges);

// Grounded Laplacian factorisation. Dense LDLT for small n, sparse LDLT above.
class LaplacianSolver {
public:
    // ground < 0 picks the vertex of largest conductance degree.
    LaplacianSolver(int n, std::span<const Conductance> edges, int ground = -1);

    // Returns x with x[ground] = 0 satisfying L x = b on every row but the ground row.
    Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
    // Potentials driving a unit current from s to t, grounded.
    Eigen::VectorXd unit_potentials(int s, int t) const;
    double resistance(int s, int t) const;
    int n() const { return n_; }
    int ground() const { return ground_; }

private:
    int n_;
    int ground_;
    int pivot_;  // vertex eliminated in the factorisation
    Eigen::LDLT<Eigen::MatrixXd> dense_;
    std::shared_ptr<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>> sparse_;
    bool use_dense_;
};

// Moore-Penrose pseudoinverse of a connected Laplacian.
Eigen::MatrixXd pseudoinverse(int n, std::span<const Conductance> edges);
// All-pairs effective resistance from the pseudoinverse.
Eigen::MatrixXd resistance_matrix(int n, std::span<const Conductance> edges);

}  // namespace pflow::linalg
