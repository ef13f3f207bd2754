#include "pflow/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pflow::linalg {

namespace {
constexpr int kDenseLimit = 400;
}

std::vector<Conductance> conductances(const WeightedGraph& g, double power) {
    std::vector<Conductance> out;
    out.reserve(g.edges().size());
    for (const auto& e : g.edges())
        out.push_back({e.tail, e.head, power == 1.0 ? e.weight : std::pow(e.weight, power)});
    return out;
}

Eigen::MatrixXd dense_laplacian(int n, std::span<const Conductance> edges) {
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
    for (const auto& e : edges) {
        L(e.a, e.a) += e.c;
        L(e.b, e.b) += e.c;
        L(e.a, e.b) -= e.c;
        L(e.b, e.a) -= e.c;
    }
    return L;
}

namespace {

// Grounding the heaviest vertex eliminates the largest conductances first, which keeps
// the reduced system usable when conductances span many orders of magnitude.
int heaviest_vertex(int n, std::span<const Conductance> edges) {
    std::vector<double> deg(std::max(n, 0), 0.0);
    for (const auto& e : edges) {
        deg[e.a] += e.c;
        deg[e.b] += e.c;
    }
    return n > 0 ? static_cast<int>(std::max_element(deg.begin(), deg.end()) - deg.begin()) : 0;
}

}  // namespace

LaplacianSolver::LaplacianSolver(int n, std::span<const Conductance> edges, int ground)
    : n_(n), use_dense_(n <= kDenseLimit) {
    if (n < 2) throw std::invalid_argument("Laplacian solve needs at least two vertices");
    pivot_ = heaviest_vertex(n, edges);
    ground_ = ground < 0 ? pivot_ : ground;
    auto idx = [&](int v) { return v < pivot_ ? v : v - 1; };
    if (use_dense_) {
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n - 1, n - 1);
        for (const auto& e : edges) {
            bool ga = e.a == pivot_, gb = e.b == pivot_;
            if (!ga) A(idx(e.a), idx(e.a)) += e.c;
            if (!gb) A(idx(e.b), idx(e.b)) += e.c;
            if (!ga && !gb) {
                A(idx(e.a), idx(e.b)) -= e.c;
                A(idx(e.b), idx(e.a)) -= e.c;
            }
        }
        dense_.compute(A);
        if (dense_.info() != Eigen::Success) throw std::runtime_error("Laplacian factorisation failed");
    } else {
        std::vector<Eigen::Triplet<double>> trips;
        trips.reserve(edges.size() * 4);
        for (const auto& e : edges) {
            bool ga = e.a == pivot_, gb = e.b == pivot_;
            if (!ga) trips.emplace_back(idx(e.a), idx(e.a), e.c);
            if (!gb) trips.emplace_back(idx(e.b), idx(e.b), e.c);
            if (!ga && !gb) {
                trips.emplace_back(idx(e.a), idx(e.b), -e.c);
                trips.emplace_back(idx(e.b), idx(e.a), -e.c);
            }
        }
        Eigen::SparseMatrix<double> A(n - 1, n - 1);
        A.setFromTriplets(trips.begin(), trips.end());
        sparse_ = std::make_shared<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>>(A);
        if (sparse_->info() != Eigen::Success) throw std::runtime_error("Laplacian factorisation failed");
    }
}

Eigen::VectorXd LaplacianSolver::solve(const Eigen::VectorXd& b) const {
    // The ground row is dropped, so rebalance b there and the full system is consistent.
    Eigen::VectorXd bb = b;
    bb(ground_) -= bb.sum();
    Eigen::VectorXd r(n_ - 1);
    for (int v = 0, k = 0; v < n_; ++v)
        if (v != pivot_) r(k++) = bb(v);
    Eigen::VectorXd y = use_dense_ ? Eigen::VectorXd(dense_.solve(r)) : Eigen::VectorXd(sparse_->solve(r));
    Eigen::VectorXd x(n_);
    for (int v = 0, k = 0; v < n_; ++v) x(v) = v == pivot_ ? 0.0 : y(k++);
    if (ground_ != pivot_) x.array() -= x(ground_);
    x(ground_) = 0.0;
    return x;
}

Eigen::VectorXd LaplacianSolver::unit_potentials(int s, int t) const {
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n_);
    b(s) = 1.0;
    b(t) = -1.0;
    return solve(b);
}

double LaplacianSolver::resistance(int s, int t) const {
    auto x = unit_potentials(s, t);
    return x(s) - x(t);
}

Eigen::MatrixXd pseudoinverse(int n, std::span<const Conductance> edges) {
    Eigen::MatrixXd L = dense_laplacian(n, edges);
    Eigen::MatrixXd J = Eigen::MatrixXd::Constant(n, n, 1.0 / n);
    Eigen::LLT<Eigen::MatrixXd> llt(L + J);
    if (llt.info() != Eigen::Success) throw std::runtime_error("Laplacian is not connected");
    Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(n, n));
    return inv - J;
}

Eigen::MatrixXd resistance_matrix(int n, std::span<const Conductance> edges) {
    Eigen::MatrixXd P = pseudoinverse(n, edges);
    Eigen::MatrixXd R(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) R(i, j) = i == j ? 0.0 : P(i, i) + P(j, j) - 2.0 * P(i, j);
    return R;
}

}  // namespace pflow::linalg
