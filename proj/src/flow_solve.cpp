#include "pflow/flow_solve.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <queue>

#include "pflow/linalg.hpp"
#include "pflow/maxflow.hpp"

namespace pflow {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// sign(x) |x|^(r-1)
double psi(double x, double r) {
    if (x == 0.0) return 0.0;
    return std::copysign(std::pow(std::abs(x), r - 1.0), x);
}

struct SpanningTree {
    std::vector<int> parent;
    std::vector<int> parent_edge;
    std::vector<int> order;  // root first, every vertex after its parent
};

// Maximum-weight spanning tree: residual demand is routed over heavy edges, where it costs least.
SpanningTree heavy_tree(const WeightedGraph& g, int root) {
    int n = g.n();
    auto adj = g.adjacency();
    SpanningTree tr{std::vector<int>(n, -1), std::vector<int>(n, -1), {}};
    std::vector<char> done(n, 0);
    using Item = std::tuple<double, int, int, int>;  // weight, vertex, parent, edge
    std::priority_queue<Item> pq;
    pq.push({kInf, root, -1, -1});
    while (!pq.empty()) {
        auto [w, x, par, e] = pq.top();
        pq.pop();
        if (done[x]) continue;
        done[x] = 1;
        tr.parent[x] = par;
        tr.parent_edge[x] = e;
        tr.order.push_back(x);
        for (auto [y, id] : adj[x])
            if (!done[y]) pq.push({g.edge(id).weight, y, x, id});
    }
    return tr;
}

// Adds a tree-supported correction so that divergence(f) = chi_t - chi_s exactly (up to rounding).
void repair_feasibility(const WeightedGraph& g, const SpanningTree& tr, const DemandPair& d,
                        std::vector<double>& f) {
    auto div = divergence(g, f);
    std::vector<double> need(div.size());
    for (std::size_t x = 0; x < div.size(); ++x) need[x] = -div[x];
    need[d.target] += 1.0;
    need[d.source] -= 1.0;
    for (std::size_t k = tr.order.size(); k-- > 1;) {
        int x = tr.order[k];
        int e = tr.parent_edge[x];
        if (g.edge(e).tail == x)
            f[e] -= need[x];
        else
            f[e] += need[x];
        need[tr.parent[x]] += need[x];
        need[x] = 0.0;
    }
}

void normalise_potentials(std::vector<double>& phi, const DemandPair& d) {
    double gap = phi[d.source] - phi[d.target];
    double base = phi[d.target];
    for (double& v : phi) v = (v - base) / gap;
}

// Potentials from a flow by integrating phi_x - phi_y = psi_p(f) / w^p down a spanning tree.
std::vector<double> integrate_potentials(const WeightedGraph& g, const SpanningTree& tr, std::span<const double> f,
                                         double r) {
    std::vector<double> phi(g.n(), 0.0);
    double M = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) M = std::max(M, std::abs(f[i]) / g.edges()[i].weight);
    if (M == 0.0) return phi;
    for (std::size_t k = 1; k < tr.order.size(); ++k) {
        int x = tr.order[k];
        int e = tr.parent_edge[x];
        const auto& ed = g.edge(e);
        double b = f[e] / ed.weight / M;
        double dlt = b == 0.0 ? 0.0 : std::copysign(std::pow(std::abs(b), r - 1.0) / ed.weight, b);
        // dlt = phi_tail - phi_head, up to a global positive factor.
        phi[x] = ed.tail == x ? phi[tr.parent[x]] + dlt : phi[tr.parent[x]] - dlt;
    }
    return phi;
}

double infeasibility(const WeightedGraph& g, const DemandPair& d, std::span<const double> f) {
    auto div = divergence(g, f);
    div[d.target] -= 1.0;
    div[d.source] += 1.0;
    double r = 0.0;
    for (double v : div) r = std::max(r, std::abs(v));
    return r;
}

FlowSolution make_solution(const WeightedGraph& g, const DemandPair& d, const PNormParam& p,
                           std::vector<double> f, std::vector<double> phi, int iterations,
                           const std::string& method) {
    FlowSolution sol{FlowAssignment{d, std::move(f)}, PotentialAssignment{std::move(phi)}, {}};
    auto& r = sol.report;
    r.p = p;
    r.method = method;
    r.iterations = iterations;
    r.primal = flow_cost(g, sol.flow, p);
    double dc = dual_cost(g, sol.potentials.values, p);
    r.dual = dc > 0.0 ? 1.0 / dc : kInf;
    r.rel_gap = (r.primal - r.dual) / r.dual;
    if (!p.is_one() && !p.is_infinite())
        r.kkt_residual = kkt_check(g, sol.flow, kkt_scaled_potentials(sol), p, 0.0).residual;
    else
        r.kkt_residual = infeasibility(g, d, sol.flow.values);
    return sol;
}

// Solves a symmetric positive definite system given as triplets, dense for small sizes.
Eigen::VectorXd spd_solve(int dim, const std::vector<Eigen::Triplet<double>>& trips, const Eigen::VectorXd& rhs) {
    if (dim <= 400) {
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(dim, dim);
        for (const auto& t : trips) A(t.row(), t.col()) += t.value();
        Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
        return ldlt.solve(rhs);
    }
    Eigen::SparseMatrix<double> A(dim, dim);
    A.setFromTriplets(trips.begin(), trips.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(A);
    return ldlt.solve(rhs);
}

void check_finite_p(const PNormParam& p) {
    if (p.is_one() || p.is_infinite()) throw std::invalid_argument("Newton path requires finite p > 1");
}

bool better(const FlowSolution& a, const std::optional<FlowSolution>& best) {
    if (!best) return true;
    if (a.report.rel_gap != best->report.rel_gap) return a.report.rel_gap < best->report.rel_gap;
    return a.report.kkt_residual < best->report.kkt_residual;
}

// Stops the iteration once the gap is met and the KKT residual has stopped improving.
struct Progress {
    std::optional<FlowSolution> best;
    int since_improvement = 0;

    // Returns true when the solver should stop.
    bool offer(FlowSolution cur, const SolveOptions& opts) {
        bool done = cur.report.rel_gap <= opts.tol && cur.report.kkt_residual <= opts.kkt_target;
        if (better(cur, best)) {
            bool real = !best || cur.report.rel_gap < 0.5 * best->report.rel_gap ||
                        cur.report.kkt_residual < 0.5 * best->report.kkt_residual;
            best = std::move(cur);
            if (real) since_improvement = 0;
        }
        ++since_improvement;
        return done || (best->report.rel_gap <= opts.tol && since_improvement > 20);
    }
};

FlowSolution finish(std::optional<FlowSolution> best, const SolveOptions& opts, int iterations) {
    best->report.iterations = iterations;
    if (!(best->report.rel_gap <= opts.tol))
        throw SolverError("p-norm solver did not reach the requested duality gap", *best);
    return *best;
}

// Damped Newton on F(phi) = sum (w |phi_u - phi_v|)^q with phi_s = 1, phi_t = 0. Used for q >= 2.
FlowSolution newton_on_potentials(const WeightedGraph& g, const DemandPair& d, const PNormParam& p,
                                  const SolveOptions& opts) {
    const int n = g.n();
    const double q = p.q;
    const auto& es = g.edges();
    const int s = d.source, t = d.target;
    auto tree = heavy_tree(g, t);

    std::vector<int> idx(n, -1);
    int nf = 0;
    for (int v = 0; v < n; ++v)
        if (v != s && v != t) idx[v] = nf++;

    // Conductances w^p make the start exact on trees and on parallel bundles.
    double wmax = 0.0;
    for (const auto& e : es) wmax = std::max(wmax, e.weight);
    linalg::LaplacianSolver start(n, linalg::conductances(g.scaled(1.0 / wmax), p.p), t);
    Eigen::VectorXd x0 = start.unit_potentials(s, t);
    std::vector<double> phi(x0.data(), x0.data() + n);
    normalise_potentials(phi, d);

    Progress prog;
    std::vector<double> a(es.size()), diff(es.size());
    auto scaled_objective = [&](const std::vector<double>& ph, double M) {
        double acc = 0.0;
        for (std::size_t i = 0; i < es.size(); ++i)
            acc += std::pow(es[i].weight * std::abs(ph[es[i].tail] - ph[es[i].head]) / M, q);
        return acc;
    };

    int it = 0;
    for (; it <= opts.max_iterations; ++it) {
        double M = 0.0;
        for (std::size_t i = 0; i < es.size(); ++i) {
            diff[i] = phi[es[i].tail] - phi[es[i].head];
            a[i] = es[i].weight * std::abs(diff[i]);
            M = std::max(M, a[i]);
        }
        // Certificate: KKT flow, rescaled to unit outflow at s, then made exactly feasible.
        std::vector<double> f(es.size());
        for (std::size_t i = 0; i < es.size(); ++i)
            f[i] = a[i] == 0.0 ? 0.0 : std::copysign(es[i].weight * std::pow(a[i] / M, q - 1.0), diff[i]);
        double out = -divergence(g, f)[s];
        if (out > 0.0 && std::isfinite(out)) {
            for (double& v : f) v /= out;
            repair_feasibility(g, tree, d, f);
            if (infeasibility(g, d, f) <= 1e-9 && prog.offer(make_solution(g, d, p, std::move(f), phi, it, "newton-potentials"), opts)) break;
        }
        if (nf == 0) break;

        Eigen::VectorXd grad = Eigen::VectorXd::Zero(nf);
        std::vector<Eigen::Triplet<double>> trips;
        trips.reserve(es.size() * 4 + nf);
        Eigen::VectorXd diag = Eigen::VectorXd::Zero(nf);
        for (std::size_t i = 0; i < es.size(); ++i) {
            double wm = es[i].weight / M;
            double r = a[i] / M;
            double ge = r == 0.0 ? 0.0 : std::copysign(q * std::pow(r, q - 1.0) * wm, diff[i]);
            double c = q * (q - 1.0) * (q == 2.0 ? 1.0 : std::pow(r, q - 2.0)) * wm * wm;
            int u = idx[es[i].tail], v = idx[es[i].head];
            if (u >= 0) {
                grad(u) += ge;
                diag(u) += c;
            }
            if (v >= 0) {
                grad(v) -= ge;
                diag(v) += c;
            }
            if (u >= 0 && v >= 0 && c > 0.0) {
                trips.emplace_back(u, v, -c);
                trips.emplace_back(v, u, -c);
            }
        }
        double mu = 1e-12 * std::max(diag.maxCoeff(), std::numeric_limits<double>::min());
        for (int k = 0; k < nf; ++k) trips.emplace_back(k, k, diag(k) + mu);
        Eigen::VectorXd step = spd_solve(nf, trips, -grad);
        double slope = grad.dot(step);
        if (!(slope < 0.0)) break;

        double f0 = scaled_objective(phi, M);
        std::vector<double> trial(phi);
        double alpha = 1.0;
        bool moved = false;
        while (alpha > 1e-16) {
            for (int v = 0; v < n; ++v)
                if (idx[v] >= 0) trial[v] = phi[v] + alpha * step(idx[v]);
            if (scaled_objective(trial, M) <= f0 + 1e-4 * alpha * slope) {
                moved = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!moved) {
            // Below the objective's rounding floor: take the pure Newton step, which still
            // reduces the first-order residual.
            if (-slope > 1e-12 * f0) break;
            for (int v = 0; v < n; ++v)
                if (idx[v] >= 0) trial[v] = phi[v] + step(idx[v]);
        }
        phi.swap(trial);
    }
    if (!prog.best) throw SolverError("p-norm solver produced no certificate", make_solution(g, d, p, std::vector<double>(es.size(), 0.0), phi, it, "newton-potentials"));
    return finish(std::move(prog.best), opts, it);
}

// Damped Newton on G(f) = sum (|f_e| / w_e)^p over unit s-t flows. Used for p > 2.
FlowSolution newton_on_flow(const WeightedGraph& g, const DemandPair& d, const PNormParam& p,
                            const SolveOptions& opts) {
    const int n = g.n();
    const double r = p.p;
    const auto& es = g.edges();
    const int s = d.source, t = d.target;
    auto tree = heavy_tree(g, t);

    // Conductances w^q make the start exact on trees and on parallel bundles.
    double wmax = 0.0;
    for (const auto& e : es) wmax = std::max(wmax, e.weight);
    auto cond0 = linalg::conductances(g.scaled(1.0 / wmax), r / (r - 1.0));
    linalg::LaplacianSolver start(n, cond0, t);
    Eigen::VectorXd x0 = start.unit_potentials(s, t);
    std::vector<double> f(es.size());
    for (std::size_t i = 0; i < es.size(); ++i) f[i] = cond0[i].c * (x0(es[i].tail) - x0(es[i].head));
    repair_feasibility(g, tree, d, f);

    auto scaled_objective = [&](const std::vector<double>& fl, double M) {
        double acc = 0.0;
        for (std::size_t i = 0; i < es.size(); ++i) acc += std::pow(std::abs(fl[i]) / es[i].weight / M, r);
        return acc;
    };

    Progress prog;
    std::vector<double> ge(es.size()), he(es.size());
    std::vector<linalg::Conductance> cond(es.size());
    int it = 0;
    for (; it <= opts.max_iterations; ++it) {
        double M = 0.0;
        for (std::size_t i = 0; i < es.size(); ++i) M = std::max(M, std::abs(f[i]) / es[i].weight);
        double hmax = 0.0;
        for (std::size_t i = 0; i < es.size(); ++i) {
            double w = es[i].weight;
            double b = std::abs(f[i]) / w / M;
            ge[i] = b == 0.0 ? 0.0 : std::copysign(r * std::pow(b, r - 1.0) / (w * M), f[i]);
            he[i] = r * (r - 1.0) * std::pow(b, r - 2.0) / (w * M * w * M);
            hmax = std::max(hmax, he[i]);
        }
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
        for (std::size_t i = 0; i < es.size(); ++i) {
            he[i] = std::max(he[i], 1e-10 * hmax);
            cond[i] = {es[i].tail, es[i].head, 1.0 / he[i]};
            rhs(es[i].tail) += ge[i] / he[i];
            rhs(es[i].head) -= ge[i] / he[i];
        }
        linalg::LaplacianSolver lap(n, cond, t);
        Eigen::VectorXd nu = lap.solve(rhs);
        // Floored curvatures make the factorisation lose digits; refine against the
        // edge-wise residual, which is computed from differences and stays accurate.
        for (int sweep = 0; sweep < 3; ++sweep) {
            Eigen::VectorXd res = rhs;
            for (const auto& c : cond) {
                double fl = c.c * (nu(c.a) - nu(c.b));
                res(c.a) -= fl;
                res(c.b) += fl;
            }
            res(t) = 0.0;
            nu += lap.solve(res);
        }

        // Two dual candidates: the Newton multipliers and the tree integral of the KKT identity.
        bool stop = false;
        std::vector<double> phi(nu.data(), nu.data() + n);
        for (int pass = 0; pass < 2 && !stop; ++pass) {
            if (pass == 1) phi = integrate_potentials(g, tree, f, r);
            if (!(phi[s] - phi[t] > 0.0)) continue;
            normalise_potentials(phi, d);
            stop = prog.offer(make_solution(g, d, p, f, phi, it, "newton-flow"), opts);
        }
        if (stop) break;

        std::vector<double> step(es.size());
        double slope = 0.0;
        for (std::size_t i = 0; i < es.size(); ++i) {
            step[i] = (nu(es[i].tail) - nu(es[i].head) - ge[i]) / he[i];
            slope += ge[i] * step[i];
        }
        if (!(slope < 0.0)) break;
        double f0 = scaled_objective(f, M);
        std::vector<double> trial(f);
        double alpha = 1.0;
        bool moved = false;
        while (alpha > 1e-16) {
            for (std::size_t i = 0; i < es.size(); ++i) trial[i] = f[i] + alpha * step[i];
            if (scaled_objective(trial, M) <= f0 + 1e-4 * alpha * slope) {
                moved = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!moved) {
            if (-slope > 1e-12 * f0) break;
            for (std::size_t i = 0; i < es.size(); ++i) trial[i] = f[i] + step[i];
        }
        f.swap(trial);
        repair_feasibility(g, tree, d, f);
    }
    if (!prog.best) throw SolverError("p-norm solver produced no certificate", make_solution(g, d, p, f, std::vector<double>(n, 0.0), it, "newton-flow"));
    return finish(std::move(prog.best), opts, it);
}

FlowSolution solve_general(const WeightedGraph& g, const DemandPair& d, const PNormParam& p,
                           const SolveOptions& opts) {
    check_pair(g, d);
    check_finite_p(p);
    return p.p <= 2.0 ? newton_on_potentials(g, d, p, opts) : newton_on_flow(g, d, p, opts);
}

// Dijkstra from t under lengths 1/w; returns distances and the first edge on a shortest path to t.
std::pair<std::vector<double>, std::vector<int>> dijkstra_to(const WeightedGraph& g, int t) {
    auto adj = g.adjacency();
    std::vector<double> dist(g.n(), kInf);
    std::vector<int> via(g.n(), -1);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    dist[t] = 0.0;
    pq.push({0.0, t});
    while (!pq.empty()) {
        auto [dx, x] = pq.top();
        pq.pop();
        if (dx > dist[x]) continue;
        for (auto [y, id] : adj[x]) {
            double nd = dx + 1.0 / g.edge(id).weight;
            if (nd < dist[y]) {
                dist[y] = nd;
                via[y] = id;
                pq.push({nd, y});
            }
        }
    }
    return {dist, via};
}

FlowSolution solve_d1(const WeightedGraph& g, const DemandPair& d) {
    auto [dist, via] = dijkstra_to(g, d.target);
    std::vector<double> f(g.edges().size(), 0.0);
    for (int x = d.source; x != d.target;) {
        const auto& e = g.edge(via[x]);
        bool forward = e.tail == x;
        f[via[x]] += forward ? 1.0 : -1.0;
        x = forward ? e.head : e.tail;
    }
    normalise_potentials(dist, d);
    return make_solution(g, d, PNormParam(1.0), std::move(f), std::move(dist), 0, "dijkstra");
}

FlowSolution solve_d2(const WeightedGraph& g, const DemandPair& d) {
    linalg::LaplacianSolver lap(g.n(), linalg::conductances(g, 2.0), d.target);
    Eigen::VectorXd x = lap.unit_potentials(d.source, d.target);
    std::vector<double> f(g.edges().size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        const auto& e = g.edges()[i];
        f[i] = e.weight * e.weight * (x(e.tail) - x(e.head));
    }
    repair_feasibility(g, heavy_tree(g, d.target), d, f);
    std::vector<double> phi(x.data(), x.data() + g.n());
    normalise_potentials(phi, d);
    return make_solution(g, d, PNormParam(2.0), std::move(f), std::move(phi), 1, "laplacian");
}

FlowSolution solve_dinf(const WeightedGraph& g, const DemandPair& d) {
    auto mf = max_flow(g, d.source, d.target);
    std::vector<double> f = mf.flow;
    double value = -divergence(g, f)[d.source];
    for (double& v : f) v /= value;
    repair_feasibility(g, heavy_tree(g, d.target), d, f);
    std::vector<double> phi(g.n());
    for (int v = 0; v < g.n(); ++v) phi[v] = mf.source_side[v] ? 1.0 : 0.0;
    return make_solution(g, d, PNormParam::infinity(), std::move(f), std::move(phi), 0, "maxflow");
}

}  // namespace

double flow_cost(const WeightedGraph& g, std::span<const double> f, const PNormParam& p) {
    if (static_cast<int>(f.size()) != g.m()) throw std::invalid_argument("flow length does not match edge count");
    std::vector<double> r(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) r[i] = f[i] / g.edges()[i].weight;
    return lp_norm(r, p.p);
}

double flow_cost(const WeightedGraph& g, const FlowAssignment& f, const PNormParam& p) {
    return flow_cost(g, std::span<const double>(f.values), p);
}

double dual_cost(const WeightedGraph& g, std::span<const double> phi, const PNormParam& p) {
    return lp_norm(potential_edge_costs(g, phi), p.q);
}

std::vector<double> kkt_flow_from_potentials(const WeightedGraph& g, std::span<const double> phi,
                                             const PNormParam& p) {
    check_finite_p(p);
    if (static_cast<int>(phi.size()) != g.n()) throw std::invalid_argument("potential length does not match vertex count");
    std::vector<double> f;
    f.reserve(g.edges().size());
    for (const auto& e : g.edges()) {
        double dlt = phi[e.tail] - phi[e.head];
        f.push_back(std::pow(e.weight, p.q) * psi(dlt, p.q));
    }
    return f;
}

KktReport kkt_check(const WeightedGraph& g, const FlowAssignment& f, std::span<const double> phi,
                    const PNormParam& p, double tol) {
    check_finite_p(p);
    const auto& es = g.edges();
    KktReport rep;
    rep.feasibility_residual = infeasibility(g, f.demand, f.values);
    // Compare in whichever direction the map is well conditioned.
    std::vector<double> lhs(es.size()), rhs(es.size());
    for (std::size_t i = 0; i < es.size(); ++i) {
        double w = es[i].weight;
        double dlt = phi[es[i].tail] - phi[es[i].head];
        double fe = f.values[i];
        if (p.p >= 2.0) {
            lhs[i] = dlt;
            rhs[i] = fe == 0.0 ? 0.0 : std::copysign(std::pow(std::abs(fe) / w, p.p - 1.0) / w, fe);
        } else {
            lhs[i] = fe;
            rhs[i] = dlt == 0.0 ? 0.0 : std::copysign(w * std::pow(w * std::abs(dlt), p.q - 1.0), dlt);
        }
    }
    double scale = 0.0, err = 0.0;
    for (std::size_t i = 0; i < es.size(); ++i) {
        scale = std::max({scale, std::abs(lhs[i]), std::abs(rhs[i])});
        err = std::max(err, std::abs(lhs[i] - rhs[i]));
    }
    rep.edge_residual = scale > 0.0 ? err / scale : 0.0;
    rep.residual = std::max(rep.edge_residual, rep.feasibility_residual);
    rep.optimal = rep.edge_residual <= tol && rep.feasibility_residual <= tol;
    return rep;
}

std::vector<double> kkt_scaled_potentials(const FlowSolution& sol) {
    double c = std::pow(sol.report.dual, sol.report.p.p);
    auto phi = sol.potentials.values;
    for (double& v : phi) v *= c;
    return phi;
}

double shortest_path_d1(const WeightedGraph& g, const DemandPair& d) {
    check_pair(g, d);
    return dijkstra_to(g, d.target).first[d.source];
}

double resistance_d2(const WeightedGraph& g, const DemandPair& d) {
    check_pair(g, d);
    linalg::LaplacianSolver lap(g.n(), linalg::conductances(g, 2.0), d.target);
    return std::sqrt(lap.resistance(d.source, d.target));
}

double mincut_dinf(const WeightedGraph& g, const DemandPair& d) {
    check_pair(g, d);
    return 1.0 / max_flow(g, d.source, d.target).value;
}

FlowSolution solve_dual(const WeightedGraph& g, const DemandPair& d, const PNormParam& p, const SolveOptions& opts) {
    return solve_general(g, d, p, opts);
}

FlowSolution solve_primal(const WeightedGraph& g, const DemandPair& d, const PNormParam& p, const SolveOptions& opts) {
    return solve_general(g, d, p, opts);
}

FlowSolution solve(const WeightedGraph& g, const DemandPair& d, const PNormParam& p, const SolveOptions& opts) {
    check_pair(g, d);
    if (p.is_one()) return solve_d1(g, d);
    if (p.is_infinite()) return solve_dinf(g, d);
    if (p.is_two()) return solve_d2(g, d);
    return solve_general(g, d, p, opts);
}

SolveReport d_p(const WeightedGraph& g, const DemandPair& d, const PNormParam& p, const SolveOptions& opts) {
    return solve(g, d, p, opts).report;
}

}  // namespace pflow
