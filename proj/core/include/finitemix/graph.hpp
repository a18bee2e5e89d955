#pragma once

#include <string>
#include <vector>

#include "finitemix/rational.hpp"

namespace finitemix {

// One weighted edge over 1-based node indices. Undirected edges are stored
// once with u < v; directed edges mean "u sends to v" and keep their order.
struct Edge {
    int u = 0;
    int v = 0;
    Rational weight;

    friend bool operator==(const Edge&, const Edge&) = default;
};

// Edge set of a single communication round. Self-loop mass is implicit:
// to_mixing_matrix assigns each node 1 minus its incident weight.
struct EdgeList {
    int n = 0;
    bool directed = false;
    std::vector<Edge> edges;

    friend bool operator==(const EdgeList&, const EdgeList&) = default;
};

// Finite sequence of rounds applied cyclically. `k` is the declared maximum
// degree, so every node touches at most k peers per round. A length-0
// sequence is valid only in the degenerate n == 1 case.
struct GraphSequence {
    int n = 0;
    int k = 1;
    std::string builder_tag;
    std::vector<EdgeList> graphs;

    friend bool operator==(const GraphSequence&, const GraphSequence&) = default;
};

// Degree = incident edges for undirected rounds; for directed rounds each
// node's degree is max(out-degree, in-degree), peers talked to per direction.
std::vector<int> node_degrees(const EdgeList& g);
int max_degree(const EdgeList& g);
int max_degree(const GraphSequence& seq);

// Sorts edges by (u, v); builder output and serialized files are canonical.
void sort_edges(EdgeList& g);

}  // namespace finitemix
