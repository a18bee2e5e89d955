#include "finitemix/graph.hpp"

#include <algorithm>

namespace finitemix {

std::vector<int> node_degrees(const EdgeList& g) {
    std::vector<int> deg(static_cast<std::size_t>(g.n) + 1, 0);
    if (!g.directed) {
        for (const Edge& e : g.edges) {
            if (e.u >= 1 && e.u <= g.n) ++deg[static_cast<std::size_t>(e.u)];
            if (e.v >= 1 && e.v <= g.n) ++deg[static_cast<std::size_t>(e.v)];
        }
        return deg;
    }
    // a directed node's degree is how many peers it talks to per direction
    std::vector<int> in(deg.size(), 0);
    for (const Edge& e : g.edges) {
        if (e.u >= 1 && e.u <= g.n) ++deg[static_cast<std::size_t>(e.u)];
        if (e.v >= 1 && e.v <= g.n) ++in[static_cast<std::size_t>(e.v)];
    }
    for (std::size_t i = 0; i < deg.size(); ++i) deg[i] = std::max(deg[i], in[i]);
    return deg;
}

int max_degree(const EdgeList& g) {
    const auto deg = node_degrees(g);
    int best = 0;
    for (std::size_t i = 1; i < deg.size(); ++i) best = std::max(best, deg[i]);
    return best;
}

int max_degree(const GraphSequence& seq) {
    int best = 0;
    for (const EdgeList& g : seq.graphs) best = std::max(best, max_degree(g));
    return best;
}

void sort_edges(EdgeList& g) {
    std::sort(g.edges.begin(), g.edges.end(), [](const Edge& a, const Edge& b) {
        if (a.u != b.u) return a.u < b.u;
        return a.v < b.v;
    });
}

}  // namespace finitemix
