#include "pflow/generators.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace pflow::gen {

WeightedGraph complete(int n, double w) {
    std::vector<Edge> es;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) es.push_back({i, j, w});
    return WeightedGraph(n, std::move(es));
}

WeightedGraph path(int n, double w) {
    std::vector<Edge> es;
    for (int i = 0; i + 1 < n; ++i) es.push_back({i, i + 1, w});
    return WeightedGraph(n, std::move(es));
}

WeightedGraph cycle(int n, double w) {
    std::vector<Edge> es;
    for (int i = 0; i < n; ++i) es.push_back({i, (i + 1) % n, w});
    return WeightedGraph(n, std::move(es));
}

WeightedGraph star(int leaves, double w) {
    std::vector<Edge> es;
    for (int i = 1; i <= leaves; ++i) es.push_back({0, i, w});
    return WeightedGraph(leaves + 1, std::move(es));
}

WeightedGraph hypercube(int dim) {
    int n = 1 << dim;
    std::vector<Edge> es;
    for (int v = 0; v < n; ++v)
        for (int b = 0; b < dim; ++b) {
            int u = v ^ (1 << b);
            if (v < u) es.push_back({v, u, 1.0});
        }
    return WeightedGraph(n, std::move(es));
}

WeightedGraph clique_minus_edge(int n, double alpha, double beta) {
    std::vector<Edge> es;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            if (i == 0 && j == 1) continue;
            es.push_back({i, j, (i <= 1 || j <= 1) ? alpha : beta});
        }
    return WeightedGraph(n, std::move(es));
}

namespace {

double draw_weight(double wlo, double whi, std::mt19937_64& rng) {
    if (wlo == whi) return wlo;
    std::uniform_real_distribution<double> u(std::log(wlo), std::log(whi));
    return std::exp(u(rng));
}

// Random labelled tree: attach each vertex of a random permutation to an earlier one.
std::vector<Edge> tree_edges(int n, double wlo, double whi, std::mt19937_64& rng) {
    std::vector<int> order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<Edge> es;
    for (int i = 1; i < n; ++i) {
        std::uniform_int_distribution<int> pick(0, i - 1);
        int a = order[pick(rng)], b = order[i];
        if (rng() & 1) std::swap(a, b);
        es.push_back({a, b, draw_weight(wlo, whi, rng)});
    }
    return es;
}

}  // namespace

WeightedGraph random_tree(int n, double wlo, double whi, std::mt19937_64& rng) {
    return WeightedGraph(n, tree_edges(n, wlo, whi, rng));
}

WeightedGraph random_connected(int n, double extra_p, double wlo, double whi, std::mt19937_64& rng) {
    auto es = tree_edges(n, wlo, whi, rng);
    std::set<std::pair<int, int>> used;
    for (const auto& e : es) used.insert({std::min(e.tail, e.head), std::max(e.tail, e.head)});
    std::bernoulli_distribution coin(extra_p);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            if (used.count({i, j}) || !coin(rng)) continue;
            es.push_back({i, j, draw_weight(wlo, whi, rng)});
        }
    return WeightedGraph(n, std::move(es));
}

WeightedGraph random_regular(int n, int k, std::mt19937_64& rng) {
    if (k < 1 || k >= n || (n * k) % 2 != 0) throw GraphError("no simple k-regular graph with these parameters");
    for (int attempt = 0; attempt < 10000; ++attempt) {
        std::vector<int> stubs;
        for (int v = 0; v < n; ++v)
            for (int j = 0; j < k; ++j) stubs.push_back(v);
        std::shuffle(stubs.begin(), stubs.end(), rng);
        std::set<std::pair<int, int>> used;
        std::vector<Edge> es;
        bool ok = true;
        for (std::size_t i = 0; i < stubs.size(); i += 2) {
            int a = std::min(stubs[i], stubs[i + 1]), b = std::max(stubs[i], stubs[i + 1]);
            if (a == b || !used.insert({a, b}).second) {
                ok = false;
                break;
            }
            es.push_back({a, b, 1.0});
        }
        if (ok && is_connected(n, es)) return WeightedGraph(n, std::move(es));
    }
    throw GraphError("random regular generation failed");
}

}  // namespace pflow::gen
