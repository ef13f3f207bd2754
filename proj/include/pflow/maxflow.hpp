#pragma once

#include <vector>

#include "pflow/graph.hpp"

namespace pflow {

struct MaxFlowResult {
    double value = 0.0;
    std::vector<double> flow;       // per edge of the graph, signed along (tail, head)
    std::vector<char> source_side;  // min-cut side containing s
};

// Dinic on the undirected graph, each edge usable in both directions up to its weight.
MaxFlowResult max_flow(const WeightedGraph& g, int s, int t);

}  // namespace pflow
