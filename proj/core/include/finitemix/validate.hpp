#pragma once

#include <string>
#include <vector>

#include "finitemix/graph.hpp"

namespace finitemix {

// One detected invariant violation. graph_index is 0-based; -1 marks
// sequence-level findings (inconsistent node counts, bad declared degree).
struct Violation {
    int graph_index = -1;
    std::string kind;
    std::string detail;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
};

// Checks every GraphSequence and MixingMatrix invariant and reports findings
// as data rather than throwing: index ranges, self-loops, duplicate edges,
// canonical undirected orientation (u < v), weight range, the declared degree
// cap, incident-weight overflow, directed send/receive imbalance, and the
// doubly-stochasticity residuals of each induced mixing matrix. An empty
// report means the sequence is valid.
ValidationReport validate_sequence(const GraphSequence& seq);

}  // namespace finitemix
