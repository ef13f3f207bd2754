#pragma once

#include <cstdint>
#include <random>

#include "pflow/graph.hpp"

namespace pflow::gen {

WeightedGraph complete(int n, double w = 1.0);
WeightedGraph path(int n, double w = 1.0);
WeightedGraph cycle(int n, double w = 1.0);
WeightedGraph star(int leaves, double w = 1.0);  // centre is vertex 0
WeightedGraph hypercube(int dim);
// K_n minus edge {0,1}; edges touching 0 or 1 get alpha, the rest beta.
WeightedGraph clique_minus_edge(int n, double alpha, double beta);

// Random spanning tree plus each remaining pair with probability extra_p; weights log-uniform in [wlo, whi].
WeightedGraph random_connected(int n, double extra_p, double wlo, double whi, std::mt19937_64& rng);
WeightedGraph random_tree(int n, double wlo, double whi, std::mt19937_64& rng);
// Simple k-regular unit graph via the configuration model with restarts.
WeightedGraph random_regular(int n, int k, std::mt19937_64& rng);

}  // namespace pflow::gen
