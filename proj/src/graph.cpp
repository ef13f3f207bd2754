#include "pflow/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

namespace pflow {

namespace {

struct DisjointSets {
    std::vector<int> parent;
    explicit DisjointSets(int n) : parent(static_cast<std::size_t>(n)) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    int find(int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[a] = b;
        return true;
    }
};

// First vertex not in the component of vertex 0, or -1.
int first_unreached(int n, std::span<const Edge> edges) {
    DisjointSets ds(n);
    for (const auto& e : edges) ds.unite(e.tail, e.head);
    for (int v = 1; v < n; ++v)
        if (ds.find(v) != ds.find(0)) return v;
    return -1;
}

void validate_edge(int n, const Edge& e) {
    if (e.tail < 0 || e.tail >= n || e.head < 0 || e.head >= n)
        throw GraphError("edge endpoint out of range");
    if (e.tail == e.head) throw GraphError("self-loop at vertex " + std::to_string(e.tail));
    if (!(e.weight > 0.0) || !std::isfinite(e.weight))
        throw GraphError("edge weight must be positive and finite");
}

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
        if (j > i) out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

template <class T>
bool parse_number(std::string_view tok, T& out) {
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), out);
    return res.ec == std::errc() && res.ptr == tok.data() + tok.size();
}

}  // namespace

bool is_connected(int n, std::span<const Edge> edges) {
    if (n <= 1) return true;
    return first_unreached(n, edges) < 0;
}

WeightedGraph::WeightedGraph(int n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
    if (n < 1) throw GraphError("graph needs at least one vertex");
    for (const auto& e : edges_) validate_edge(n, e);
    int v = n > 1 ? first_unreached(n, edges_) : -1;
    if (v >= 0) throw GraphError("graph is disconnected: vertex " + std::to_string(v) + " unreachable");
}

double WeightedGraph::total_weight() const {
    double s = 0.0;
    for (const auto& e : edges_) s += e.weight;
    return s;
}

std::vector<double> WeightedGraph::weighted_degrees() const {
    std::vector<double> d(static_cast<std::size_t>(n_), 0.0);
    for (const auto& e : edges_) {
        d[e.tail] += e.weight;
        d[e.head] += e.weight;
    }
    return d;
}

std::vector<int> WeightedGraph::degrees() const {
    std::vector<int> d(static_cast<std::size_t>(n_), 0);
    for (const auto& e : edges_) {
        ++d[e.tail];
        ++d[e.head];
    }
    return d;
}

std::vector<std::vector<std::pair<int, int>>> WeightedGraph::adjacency() const {
    std::vector<std::vector<std::pair<int, int>>> adj(static_cast<std::size_t>(n_));
    for (int i = 0; i < m(); ++i) {
        adj[edges_[i].tail].emplace_back(edges_[i].head, i);
        adj[edges_[i].head].emplace_back(edges_[i].tail, i);
    }
    return adj;
}

WeightedGraph WeightedGraph::scaled(double c) const {
    auto es = edges_;
    for (auto& e : es) e.weight *= c;
    return WeightedGraph(n_, std::move(es));
}

DemandPair::DemandPair(int s, int t) : source(s), target(t) {
    if (s == t) throw GraphError("demand pair needs distinct endpoints");
    if (s < 0 || t < 0) throw GraphError("demand pair vertex out of range");
}

void check_pair(const WeightedGraph& g, const DemandPair& d) {
    if (d.source >= g.n() || d.target >= g.n()) throw GraphError("demand pair vertex out of range");
}

PNormParam::PNormParam(double p_value) {
    if (std::isnan(p_value) || p_value < 1.0) throw std::invalid_argument("p must lie in [1, inf]");
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (p_value > kInfinityThreshold) p_value = inf;
    p = p_value;
    if (p == 1.0)
        q = inf;
    else if (p == inf)
        q = 1.0;
    else
        q = p / (p - 1.0);
}

PNormParam PNormParam::infinity() { return PNormParam(std::numeric_limits<double>::infinity()); }

bool PNormParam::is_infinite() const { return std::isinf(p); }

WeightedGraph parse_graph(std::string_view text) {
    int line_no = 0;
    int header_line = 0;
    long long n = -1, m = -1;
    std::vector<Edge> edges;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        std::string_view line = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        auto toks = split_ws(line);
        if (toks.empty() || toks[0].front() == '#') {
            if (nl == text.size()) break;
            continue;
        }
        if (n < 0) {
            if (toks.size() != 2 || !parse_number(toks[0], n) || !parse_number(toks[1], m) || n < 1 || m < 0)
                throw ParseError(line_no, "expected header \"n m\"");
            header_line = line_no;
            edges.reserve(static_cast<std::size_t>(m));
        } else {
            if (static_cast<long long>(edges.size()) >= m)
                throw ParseError(line_no, "more edge lines than declared");
            long long u, v;
            double w;
            if (toks.size() != 3 || !parse_number(toks[0], u) || !parse_number(toks[1], v) || !parse_number(toks[2], w))
                throw ParseError(line_no, "expected edge \"u v w\"");
            if (u < 0 || u >= n || v < 0 || v >= n) throw ParseError(line_no, "vertex out of range");
            if (u == v) throw ParseError(line_no, "self-loop");
            if (!(w > 0.0) || !std::isfinite(w)) throw ParseError(line_no, "weight must be positive and finite");
            edges.push_back(Edge{static_cast<int>(u), static_cast<int>(v), w});
        }
        if (nl == text.size()) break;
    }
    if (n < 0) throw ParseError(line_no, "missing header");
    if (static_cast<long long>(edges.size()) != m)
        throw ParseError(line_no, "expected " + std::to_string(m) + " edges, found " + std::to_string(edges.size()));
    int nn = static_cast<int>(n);
    if (nn > 1) {
        int v = first_unreached(nn, edges);
        if (v >= 0) throw ParseError(header_line, "graph is disconnected: vertex " + std::to_string(v) + " unreachable");
    }
    return WeightedGraph(nn, std::move(edges));
}

WeightedGraph read_graph_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw GraphError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_graph(ss.str());
}

std::string serialize_graph(const WeightedGraph& g) {
    std::string out = std::to_string(g.n()) + " " + std::to_string(g.m()) + "\n";
    char buf[64];
    for (const auto& e : g.edges()) {
        std::snprintf(buf, sizeof buf, "%d %d %.17g\n", e.tail, e.head, e.weight);
        out += buf;
    }
    return out;
}

std::vector<double> divergence(const WeightedGraph& g, std::span<const double> f) {
    if (static_cast<int>(f.size()) != g.m()) throw std::invalid_argument("flow length does not match edge count");
    std::vector<double> out(static_cast<std::size_t>(g.n()), 0.0);
    const auto& es = g.edges();
    for (std::size_t i = 0; i < es.size(); ++i) {
        out[es[i].head] += f[i];
        out[es[i].tail] -= f[i];
    }
    return out;
}

std::vector<double> potential_edge_costs(const WeightedGraph& g, std::span<const double> phi) {
    if (static_cast<int>(phi.size()) != g.n()) throw std::invalid_argument("potential length does not match vertex count");
    std::vector<double> out;
    out.reserve(g.edges().size());
    for (const auto& e : g.edges()) out.push_back(e.weight * (phi[e.tail] - phi[e.head]));
    return out;
}

double lp_norm(std::span<const double> x, double p) {
    double mx = 0.0;
    for (double v : x) mx = std::max(mx, std::abs(v));
    if (mx == 0.0 || std::isinf(p)) return mx;
    double s = 0.0;
    for (double v : x) s += std::pow(std::abs(v) / mx, p);
    return mx * std::pow(s, 1.0 / p);
}

}  // namespace pflow
