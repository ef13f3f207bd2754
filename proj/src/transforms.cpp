#include "pflow/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pflow/generators.hpp"

namespace pflow {

namespace {

// Removes one vertex and renumbers the rest; edges touching it must already be gone.
std::vector<int> drop_vertex_map(int n, int x) {
    std::vector<int> map(n);
    for (int v = 0, k = 0; v < n; ++v) map[v] = v == x ? -1 : k++;
    return map;
}

std::vector<int> incident(const WeightedGraph& g, int x) {
    std::vector<int> out;
    for (int i = 0; i < g.m(); ++i)
        if (g.edge(i).tail == x || g.edge(i).head == x) out.push_back(i);
    return out;
}

int other_end(const Edge& e, int x) { return e.tail == x ? e.head : e.tail; }

void check_vertex(const WeightedGraph& g, int x) {
    if (x < 0 || x >= g.n()) throw std::invalid_argument("vertex out of range");
}

}  // namespace

double series_weight(double alpha, double beta, const PNormParam& p) {
    double lo = std::min(alpha, beta), hi = std::max(alpha, beta);
    if (p.is_infinite()) return lo;
    return lo * std::pow(1.0 + std::pow(lo / hi, p.p), -1.0 / p.p);
}

double parallel_weight(double alpha, double beta, const PNormParam& p) {
    double lo = std::min(alpha, beta), hi = std::max(alpha, beta);
    if (p.is_one()) return hi;
    return hi * std::pow(1.0 + std::pow(lo / hi, p.q), 1.0 / p.q);
}

TransformResult reduce_degree2(const WeightedGraph& g, int x, const PNormParam& p) {
    check_vertex(g, x);
    auto inc = incident(g, x);
    if (inc.size() != 2) throw std::invalid_argument("vertex " + std::to_string(x) + " does not have degree 2");
    const Edge& e1 = g.edge(inc[0]);
    const Edge& e2 = g.edge(inc[1]);
    int a = other_end(e1, x), b = other_end(e2, x);
    if (a == b) throw std::invalid_argument("both edges lead to the same neighbour; merge them with merge_parallel");
    TransformResult res;
    res.rule = "deg2";
    res.removed_vertices = {x};
    res.removed_edges = inc;
    res.vertex_map = drop_vertex_map(g.n(), x);
    std::vector<Edge> es;
    for (int i = 0; i < g.m(); ++i) {
        if (i == inc[0] || i == inc[1]) continue;
        const auto& e = g.edge(i);
        es.push_back({res.vertex_map[e.tail], res.vertex_map[e.head], e.weight});
    }
    Edge made{res.vertex_map[a], res.vertex_map[b], series_weight(e1.weight, e2.weight, p)};
    es.push_back(made);
    res.created = {made};
    res.graph_after = WeightedGraph(g.n() - 1, std::move(es));
    return res;
}

TransformResult merge_parallel(const WeightedGraph& g, int e1, int e2, const PNormParam& p) {
    if (e1 < 0 || e2 < 0 || e1 >= g.m() || e2 >= g.m() || e1 == e2) throw std::invalid_argument("edge index out of range");
    const Edge& a = g.edge(e1);
    const Edge& b = g.edge(e2);
    bool same = (a.tail == b.tail && a.head == b.head) || (a.tail == b.head && a.head == b.tail);
    if (!same) throw std::invalid_argument("edges are not parallel");
    TransformResult res;
    res.rule = "parallel";
    res.removed_edges = {e1, e2};
    res.vertex_map.resize(g.n());
    for (int v = 0; v < g.n(); ++v) res.vertex_map[v] = v;
    int keep = std::min(e1, e2);
    Edge made{a.tail, a.head, parallel_weight(a.weight, b.weight, p)};
    std::vector<Edge> es;
    for (int i = 0; i < g.m(); ++i) {
        if (i == keep)
            es.push_back(made);
        else if (i != e1 && i != e2)
            es.push_back(g.edge(i));
    }
    res.created = {made};
    res.graph_after = WeightedGraph(g.n(), std::move(es));
    return res;
}

TransformResult wye_delta_p2(const WeightedGraph& g, int r) {
    check_vertex(g, r);
    auto inc = incident(g, r);
    if (inc.size() != 3) throw std::invalid_argument("vertex " + std::to_string(r) + " does not have degree 3");
    int nb[3];
    double w[3];
    for (int k = 0; k < 3; ++k) {
        nb[k] = other_end(g.edge(inc[k]), r);
        w[k] = g.edge(inc[k]).weight;
    }
    if (nb[0] == nb[1] || nb[1] == nb[2] || nb[0] == nb[2]) throw std::invalid_argument("star neighbours must be distinct");
    TransformResult res;
    res.rule = "wye-delta";
    res.removed_vertices = {r};
    res.removed_edges = inc;
    res.vertex_map = drop_vertex_map(g.n(), r);
    std::vector<Edge> es;
    for (int i = 0; i < g.m(); ++i) {
        if (std::find(inc.begin(), inc.end(), i) != inc.end()) continue;
        const auto& e = g.edge(i);
        es.push_back({res.vertex_map[e.tail], res.vertex_map[e.head], e.weight});
    }
    // Star conductances w^2 map to triangle conductances c_i c_j / sum c; weights are their roots.
    double norm = std::sqrt(w[0] * w[0] + w[1] * w[1] + w[2] * w[2]);
    const PNormParam two(2.0);
    for (int k = 0; k < 3; ++k) {
        int i = (k + 1) % 3, j = (k + 2) % 3;
        int u = res.vertex_map[nb[i]], v = res.vertex_map[nb[j]];
        double wt = w[i] * w[j] / norm;
        auto it = std::find_if(es.begin(), es.end(), [&](const Edge& e) {
            return (e.tail == u && e.head == v) || (e.tail == v && e.head == u);
        });
        if (it != es.end()) {
            it->weight = parallel_weight(it->weight, wt, two);
            res.created.push_back(*it);
        } else {
            es.push_back({u, v, wt});
            res.created.push_back(es.back());
        }
    }
    res.graph_after = WeightedGraph(g.n() - 1, std::move(es));
    return res;
}

WeightedGraph obstruction_g2(double tie) {
    return WeightedGraph(5, {{0, 1, 1.0}, {0, 2, 1.0}, {0, 3, 1.0}, {4, 2, tie}, {4, 3, tie}});
}

ObstructionReport wye_delta_obstruction(const PNormParam& p, const SolveOptions& opts) {
    if (p.is_one() || p.is_infinite()) throw std::invalid_argument("obstruction needs finite p > 1");
    ObstructionReport rep;
    rep.p = p;
    const double q = p.q;
    rep.alpha1 = std::pow(1.0 + std::pow(2.0, q - 1.0), -1.0 / q);
    rep.alpha2 = std::pow(std::pow(2.0, 1.0 / (q - 1.0)) + 1.0, -1.0 / p.p);
    rep.gap = std::abs(rep.alpha1 - rep.alpha2);
    rep.equal = rep.gap <= 1e-9;

    // d-bar(a,b)^q = d_p(a,b)^-q between leaves a=1 and b=2.
    auto dbar_q = [&](const WeightedGraph& g, int a, int b) {
        return std::pow(solve(g, DemandPair(a, b), p, opts).report.value(), -q);
    };
    auto rel = [](double x, double y) { return std::abs(x - y) / std::abs(y); };

    rep.g1_star = dbar_q(gen::star(3), 1, 2);
    rep.g1_star_closed = std::pow(2.0, 1.0 - q);
    double a1 = rep.alpha1;
    rep.g1_triangle = dbar_q(WeightedGraph(3, {{0, 1, a1}, {1, 2, a1}, {0, 2, a1}}), 0, 1);

    rep.g2_star = dbar_q(obstruction_g2(), 1, 2);
    rep.g2_star_closed = 2.0 * std::pow(std::pow(2.0, 1.0 / (q - 1.0)) + 1.0, 1.0 - q);
    rep.g2_sensitivity = rel(dbar_q(obstruction_g2(2.0 * kTieWeight), 1, 2), rep.g2_star);
    double a2 = rep.alpha2;
    WeightedGraph g2_delta(4, {{0, 1, a2}, {1, 2, a2}, {0, 2, a2}, {3, 1, kTieWeight}, {3, 2, kTieWeight}});
    rep.g2_triangle = dbar_q(g2_delta, 0, 1);

    rep.max_check_error = std::max({rel(rep.g1_star, rep.g1_star_closed), rel(rep.g1_triangle, rep.g1_star_closed),
                                    rel(rep.g2_star, rep.g2_star_closed), rel(rep.g2_triangle, rep.g2_star_closed)});
    rep.checks_ok = rep.max_check_error <= 1e-6 && rep.g2_sensitivity <= 1e-6;
    return rep;
}

Eigen::VectorXd nnls_normal(const Eigen::MatrixXd& AtA, const Eigen::VectorXd& Atb, int max_iter) {
    const int n = static_cast<int>(Atb.size());
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    std::vector<char> passive(n, 0);
    const double tol = 1e-12 * std::max(1.0, AtA.diagonal().maxCoeff()) * std::max(1.0, Atb.cwiseAbs().maxCoeff());
    auto solve_passive = [&]() {
        std::vector<int> idx;
        for (int i = 0; i < n; ++i)
            if (passive[i]) idx.push_back(i);
        Eigen::VectorXd s = Eigen::VectorXd::Zero(n);
        if (idx.empty()) return s;
        Eigen::MatrixXd G(idx.size(), idx.size());
        Eigen::VectorXd r(idx.size());
        for (std::size_t a = 0; a < idx.size(); ++a) {
            r(a) = Atb(idx[a]);
            for (std::size_t b = 0; b < idx.size(); ++b) G(a, b) = AtA(idx[a], idx[b]);
        }
        Eigen::VectorXd z = G.completeOrthogonalDecomposition().solve(r);
        for (std::size_t a = 0; a < idx.size(); ++a) s(idx[a]) = z(a);
        return s;
    };
    for (int outer = 0; outer < max_iter; ++outer) {
        Eigen::VectorXd grad = Atb - AtA * x;
        int j = -1;
        double best = tol;
        for (int i = 0; i < n; ++i)
            if (!passive[i] && grad(i) > best) {
                best = grad(i);
                j = i;
            }
        if (j < 0) break;
        passive[j] = 1;
        while (true) {
            Eigen::VectorXd s = solve_passive();
            double alpha = 1.0;
            bool clipped = false;
            for (int i = 0; i < n; ++i)
                if (passive[i] && s(i) <= 0.0) {
                    clipped = true;
                    alpha = std::min(alpha, x(i) / (x(i) - s(i)));
                }
            if (!clipped) {
                x = s;
                break;
            }
            x += alpha * (s - x);
            for (int i = 0; i < n; ++i)
                if (passive[i] && x(i) <= 1e-15) {
                    passive[i] = 0;
                    x(i) = 0.0;
                }
        }
    }
    return x;
}

StarMeshReport star_mesh_cut_system(int k) {
    if (k < 2 || k > 20) throw std::invalid_argument("k must lie in [2, 20]");
    StarMeshReport rep;
    rep.k = k;
    std::vector<std::pair<int, int>> cols;
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) cols.emplace_back(i, j);
    const int nc = static_cast<int>(cols.size());
    // Bipartitions S containing leaf 0, S != all leaves.
    const unsigned long long count = 1ull << (k - 1);
    auto side = [&](unsigned long long mask, int leaf) { return leaf == 0 || ((mask >> (leaf - 1)) & 1ull); };
    auto row = [&](unsigned long long mask, Eigen::VectorXd& a, double& b) {
        int size = 0;
        for (int leaf = 0; leaf < k; ++leaf) size += side(mask, leaf);
        b = std::min(size, k - size);
        for (int c = 0; c < nc; ++c) a(c) = side(mask, cols[c].first) != side(mask, cols[c].second) ? 1.0 : 0.0;
    };
    Eigen::MatrixXd AtA = Eigen::MatrixXd::Zero(nc, nc);
    Eigen::VectorXd Atb = Eigen::VectorXd::Zero(nc);
    Eigen::VectorXd a(nc);
    double b;
    for (unsigned long long mask = 0; mask + 1 < count; ++mask) {
        row(mask, a, b);
        AtA.selfadjointView<Eigen::Lower>().rankUpdate(a);
        Atb += b * a;
    }
    AtA = AtA.selfadjointView<Eigen::Lower>();
    Eigen::VectorXd x = nnls_normal(AtA, Atb);

    double sq = 0.0, worst = -1.0;
    for (unsigned long long mask = 0; mask + 1 < count; ++mask) {
        row(mask, a, b);
        double got = a.dot(x);
        double err = std::abs(got - b);
        sq += err * err;
        if (err > worst) {
            worst = err;
            rep.violated.clear();
            for (int leaf = 0; leaf < k; ++leaf)
                if (side(mask, leaf)) rep.violated.push_back(leaf);
            rep.required = b;
            rep.achieved = got;
        }
    }
    rep.residual = std::sqrt(sq);
    rep.feasible = rep.residual <= 1e-9;
    rep.weights = Eigen::MatrixXd::Zero(k, k);
    for (int c = 0; c < nc; ++c) rep.weights(cols[c].first, cols[c].second) = rep.weights(cols[c].second, cols[c].first) = x(c);
    if (rep.feasible) rep.violated.clear();
    return rep;
}

}  // namespace pflow
