#include "pflow/maxflow.hpp"

#include <algorithm>
#include <limits>
#include <queue>

namespace pflow {

namespace {

struct Arc {
    int to;
    double cap;
};

class Dinic {
public:
    Dinic(int n, double eps) : adj_(static_cast<std::size_t>(n)), level_(n), it_(n), eps_(eps) {}

    // Undirected edge as a pair of arcs sharing residual capacity.
    int add_undirected(int a, int b, double c) {
        int id = static_cast<int>(arcs_.size());
        arcs_.push_back({b, c});
        adj_[a].push_back(id);
        arcs_.push_back({a, c});
        adj_[b].push_back(id + 1);
        return id;
    }

    double run(int s, int t) {
        double total = 0.0;
        while (bfs(s, t)) {
            std::fill(it_.begin(), it_.end(), 0);
            while (true) {
                double f = dfs(s, t, std::numeric_limits<double>::infinity());
                if (f <= eps_) break;
                total += f;
            }
        }
        return total;
    }

    std::vector<char> reachable(int s) const {
        std::vector<char> seen(adj_.size(), 0);
        std::vector<int> stack{s};
        seen[s] = 1;
        while (!stack.empty()) {
            int x = stack.back();
            stack.pop_back();
            for (int id : adj_[x]) {
                const auto& a = arcs_[id];
                if (a.cap > eps_ && !seen[a.to]) {
                    seen[a.to] = 1;
                    stack.push_back(a.to);
                }
            }
        }
        return seen;
    }

    double residual(int id) const { return arcs_[id].cap; }

private:
    bool bfs(int s, int t) {
        std::fill(level_.begin(), level_.end(), -1);
        std::queue<int> qu;
        level_[s] = 0;
        qu.push(s);
        while (!qu.empty()) {
            int x = qu.front();
            qu.pop();
            for (int id : adj_[x]) {
                const auto& a = arcs_[id];
                if (a.cap > eps_ && level_[a.to] < 0) {
                    level_[a.to] = level_[x] + 1;
                    qu.push(a.to);
                }
            }
        }
        return level_[t] >= 0;
    }

    double dfs(int x, int t, double pushed) {
        if (x == t) return pushed;
        for (int& i = it_[x]; i < static_cast<int>(adj_[x].size()); ++i) {
            int id = adj_[x][i];
            auto& a = arcs_[id];
            if (a.cap <= eps_ || level_[a.to] != level_[x] + 1) continue;
            double got = dfs(a.to, t, std::min(pushed, a.cap));
            if (got > eps_) {
                a.cap -= got;
                arcs_[id ^ 1].cap += got;
                return got;
            }
        }
        return 0.0;
    }

    std::vector<Arc> arcs_;
    std::vector<std::vector<int>> adj_;
    std::vector<int> level_;
    std::vector<int> it_;
    double eps_;
};

}  // namespace

MaxFlowResult max_flow(const WeightedGraph& g, int s, int t) {
    double wmax = 0.0;
    for (const auto& e : g.edges()) wmax = std::max(wmax, e.weight);
    Dinic d(g.n(), wmax * 1e-14);
    std::vector<int> ids;
    ids.reserve(g.edges().size());
    for (const auto& e : g.edges()) ids.push_back(d.add_undirected(e.tail, e.head, e.weight));
    MaxFlowResult r;
    r.value = d.run(s, t);
    r.flow.resize(g.edges().size());
    for (std::size_t i = 0; i < ids.size(); ++i) {
        // Forward arc started at w; its residual fell by the net tail->head flow.
        r.flow[i] = (g.edges()[i].weight - d.residual(ids[i]));
    }
    r.source_side = d.reachable(s);
    // Cut value is exact given the side; prefer it to the accumulated sum.
    double cut = 0.0;
    for (const auto& e : g.edges())
        if (r.source_side[e.tail] != r.source_side[e.head]) cut += e.weight;
    r.value = cut;
    return r;
}

}  // namespace pflow
