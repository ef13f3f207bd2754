#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace pflow {

class GraphError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
public:
    ParseError(int line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

struct Edge {
    int tail = 0;
    int head = 0;
    double weight = 1.0;
    bool operator==(const Edge&) const = default;
};

// Union-find connectivity over a raw edge list. Zero-vertex lists count as connected.
bool is_connected(int n, std::span<const Edge> edges);

// Immutable after construction. Orientation is the stored (tail, head) order.
class WeightedGraph {
public:
    WeightedGraph() = default;
    WeightedGraph(int n, std::vector<Edge> edges);

    int n() const { return n_; }
    int m() const { return static_cast<int>(edges_.size()); }
    const std::vector<Edge>& edges() const { return edges_; }
    const Edge& edge(int e) const { return edges_.at(static_cast<std::size_t>(e)); }

    double total_weight() const;
    std::vector<double> weighted_degrees() const;
    std::vector<int> degrees() const;
    // adjacency()[x] lists (neighbour, edge index).
    std::vector<std::vector<std::pair<int, int>>> adjacency() const;
    // Same graph with every weight multiplied by c.
    WeightedGraph scaled(double c) const;

    bool operator==(const WeightedGraph&) const = default;

private:
    int n_ = 0;
    std::vector<Edge> edges_;
};

struct DemandPair {
    int source;
    int target;
    DemandPair(int s, int t);
};

void check_pair(const WeightedGraph& g, const DemandPair& d);

// p values above this are treated as infinity.
inline constexpr double kInfinityThreshold = 1e6;

struct PNormParam {
    double p = 2.0;
    double q = 2.0;

    PNormParam() = default;
    explicit PNormParam(double p_value);
    static PNormParam infinity();

    bool is_one() const { return p == 1.0; }
    bool is_infinite() const;
    bool is_two() const { return p == 2.0; }
};

WeightedGraph parse_graph(std::string_view text);
WeightedGraph read_graph_file(const std::string& path);
std::string serialize_graph(const WeightedGraph& g);

// Net inflow per vertex: sum over edges entering x minus sum over edges leaving x.
std::vector<double> divergence(const WeightedGraph& g, std::span<const double> f);
// w(e) * (phi_tail - phi_head) per edge.
std::vector<double> potential_edge_costs(const WeightedGraph& g, std::span<const double> phi);

// Overflow-safe l_p norm; p = +inf gives the max norm.
double lp_norm(std::span<const double> x, double p);

}  // namespace pflow
