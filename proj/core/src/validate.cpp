#include "finitemix/validate.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

#include "finitemix/error.hpp"
#include "finitemix/mixing.hpp"

namespace finitemix {

namespace {

constexpr double kResidualTol = 1e-12;

void check_graph(const GraphSequence& seq, int gi, ValidationReport& report) {
    const EdgeList& g = seq.graphs[static_cast<std::size_t>(gi)];
    auto flag = [&](std::string kind, std::string detail) {
        report.violations.push_back({gi, std::move(kind), std::move(detail)});
    };

    if (g.n != seq.n) {
        flag("NodeCountMismatch",
             "graph has n=" + std::to_string(g.n) + ", sequence has n=" + std::to_string(seq.n));
        return;
    }

    bool edges_clean = true;
    std::set<std::pair<int, int>> seen;
    for (const Edge& e : g.edges) {
        if (e.u < 1 || e.u > g.n || e.v < 1 || e.v > g.n) {
            flag("IndexRange", "edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                                   ") outside 1.." + std::to_string(g.n));
            edges_clean = false;
            continue;
        }
        if (e.u == e.v) {
            flag("SelfLoop", "explicit self-loop on node " + std::to_string(e.u));
            edges_clean = false;
            continue;
        }
        if (!g.directed && e.u > e.v) {
            flag("EdgeOrder", "undirected edge stored as (" + std::to_string(e.u) + "," +
                                  std::to_string(e.v) + "), expected u < v");
        }
        const auto key = g.directed ? std::pair{e.u, e.v} : std::pair{std::min(e.u, e.v), std::max(e.u, e.v)};
        if (!seen.insert(key).second) {
            flag("DuplicateEdge",
                 "edge (" + std::to_string(key.first) + "," + std::to_string(key.second) + ") repeated");
            edges_clean = false;
        }
        const double w = to_double(e.weight);
        if (!(w > 0.0) || w > 1.0) {
            flag("WeightRange", "edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                                    ") has weight " + to_string(e.weight));
            edges_clean = false;
        }
    }

    const auto degrees = node_degrees(g);
    for (int node = 1; node <= g.n; ++node) {
        if (degrees[static_cast<std::size_t>(node)] > seq.k)
            flag("DegreeViolation", "node " + std::to_string(node) + " has degree " +
                                        std::to_string(degrees[static_cast<std::size_t>(node)]) +
                                        " > k=" + std::to_string(seq.k));
    }

    if (!edges_clean) return;

    try {
        const MixingMatrix w = to_mixing_matrix(g);
        std::vector<double> row_sum(static_cast<std::size_t>(w.n()), 0.0);
        std::vector<double> col_sum(static_cast<std::size_t>(w.n()), 0.0);
        for (int i = 0; i < w.n(); ++i)
            for (const auto& entry : w.row(i)) {
                row_sum[static_cast<std::size_t>(i)] += entry.value;
                col_sum[static_cast<std::size_t>(entry.col)] += entry.value;
            }
        for (int i = 0; i < w.n(); ++i) {
            if (std::abs(row_sum[static_cast<std::size_t>(i)] - 1.0) > kResidualTol)
                flag("RowSumResidual", "row " + std::to_string(i + 1) + " sums to " +
                                           std::to_string(row_sum[static_cast<std::size_t>(i)]));
            if (std::abs(col_sum[static_cast<std::size_t>(i)] - 1.0) > kResidualTol)
                flag("ColSumResidual", "column " + std::to_string(i + 1) + " sums to " +
                                           std::to_string(col_sum[static_cast<std::size_t>(i)]));
        }
    } catch (const Error& err) {
        flag(err.code(), err.message());
    }
}

}  // namespace

ValidationReport validate_sequence(const GraphSequence& seq) {
    ValidationReport report;
    if (seq.n < 1) {
        report.violations.push_back({-1, "NodeCountMismatch", "sequence has n < 1"});
        return report;
    }
    if (seq.n == 1) {
        if (!seq.graphs.empty())
            report.violations.push_back({-1, "EmptySequence", "n == 1 admits only the empty sequence"});
        return report;
    }
    if (seq.graphs.empty()) {
        report.violations.push_back({-1, "EmptySequence", "no rounds for n > 1"});
        return report;
    }
    if (seq.k < 1 || seq.k > seq.n - 1)
        report.violations.push_back(
            {-1, "DegreeViolation", "declared k=" + std::to_string(seq.k) + " outside 1..n-1"});
    for (int gi = 0; gi < static_cast<int>(seq.graphs.size()); ++gi) check_graph(seq, gi, report);
    return report;
}

}  // namespace finitemix
