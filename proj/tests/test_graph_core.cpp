#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "finitemix/error.hpp"
#include "finitemix/graph.hpp"
#include "finitemix/mixing.hpp"
#include "finitemix/validate.hpp"

using namespace finitemix;

namespace {

EdgeList make_round(int n, std::vector<Edge> edges, bool directed = false) {
    EdgeList g;
    g.n = n;
    g.directed = directed;
    g.edges = std::move(edges);
    return g;
}

bool has_kind(const ValidationReport& report, const std::string& kind) {
    return std::any_of(report.violations.begin(), report.violations.end(),
                       [&](const Violation& v) { return v.kind == kind; });
}

GraphSequence wrap(int n, int k, EdgeList g) {
    GraphSequence seq;
    seq.n = n;
    seq.k = k;
    seq.builder_tag = "test";
    seq.graphs.push_back(std::move(g));
    return seq;
}

}  // namespace

TEST_CASE("node_degrees counts undirected incidences") {
    const EdgeList g = make_round(4, {{1, 2, make_rational(1, 2)},
                                      {1, 3, make_rational(1, 4)},
                                      {2, 4, make_rational(1, 4)}});
    const auto deg = node_degrees(g);
    CHECK(deg[1] == 2);
    CHECK(deg[2] == 2);
    CHECK(deg[3] == 1);
    CHECK(deg[4] == 1);
    CHECK(max_degree(g) == 2);
}

TEST_CASE("node_degrees takes max of out and in for directed rounds") {
    // node 1 sends to 2 and 3 (out 2), receives from 2 (in 1): degree 2
    const EdgeList g = make_round(3,
                                  {{1, 2, make_rational(1, 3)},
                                   {1, 3, make_rational(1, 3)},
                                   {2, 1, make_rational(1, 3)}},
                                  true);
    const auto deg = node_degrees(g);
    CHECK(deg[1] == 2);
    CHECK(deg[2] == 1);
    CHECK(deg[3] == 1);
}

TEST_CASE("sort_edges orders by endpoint pair") {
    EdgeList g = make_round(4, {{3, 4, make_rational(1, 2)},
                                {1, 3, make_rational(1, 2)},
                                {1, 2, make_rational(1, 2)}});
    sort_edges(g);
    CHECK(g.edges[0].u == 1);
    CHECK(g.edges[0].v == 2);
    CHECK(g.edges[1].u == 1);
    CHECK(g.edges[1].v == 3);
    CHECK(g.edges[2].u == 3);
    CHECK(g.edges[2].v == 4);
}

TEST_CASE("to_mixing_matrix puts weight on both orientations and fills the diagonal") {
    const EdgeList g = make_round(3, {{1, 2, make_rational(1, 3)}});
    const MixingMatrix w = to_mixing_matrix(g);
    CHECK(w.n() == 3);
    CHECK(w.entry(0, 1) == doctest::Approx(1.0 / 3.0));
    CHECK(w.entry(1, 0) == doctest::Approx(1.0 / 3.0));
    CHECK(w.entry(0, 0) == doctest::Approx(2.0 / 3.0));
    CHECK(w.entry(1, 1) == doctest::Approx(2.0 / 3.0));
    CHECK(w.entry(2, 2) == doctest::Approx(1.0));
    CHECK(w.entry(0, 2) == 0.0);
    CHECK(w.off_diagonal_entries() == 2);
}

TEST_CASE("to_mixing_matrix rejects incident weight above one") {
    const EdgeList g = make_round(3, {{1, 2, make_rational(3, 4)}, {1, 3, make_rational(1, 2)}});
    CHECK_THROWS_AS(to_mixing_matrix(g), Error);
    try {
        to_mixing_matrix(g);
    } catch (const Error& e) {
        CHECK(e.code() == "IncidentWeightOverflow");
    }
}

TEST_CASE("to_mixing_matrix rejects directed rounds with unbalanced mass") {
    // node 1 sends 1/2 but receives nothing: no diagonal can fix both sums
    const EdgeList g = make_round(2, {{1, 2, make_rational(1, 2)}}, true);
    try {
        to_mixing_matrix(g);
        FAIL("expected DirectedImbalance");
    } catch (const Error& e) {
        CHECK(e.code() == "DirectedImbalance");
    }
}

TEST_CASE("directed cycle with equal send and receive mass is accepted") {
    const EdgeList g = make_round(3,
                                  {{1, 2, make_rational(1, 2)},
                                   {2, 3, make_rational(1, 2)},
                                   {3, 1, make_rational(1, 2)}},
                                  true);
    const MixingMatrix w = to_mixing_matrix(g);
    for (int i = 0; i < 3; ++i) {
        double row = 0.0;
        double col = 0.0;
        for (int j = 0; j < 3; ++j) {
            row += w.entry(i, j);
            col += w.entry(j, i);
        }
        CHECK(row == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(col == doctest::Approx(1.0).epsilon(1e-15));
    }
}

TEST_CASE("apply_vector matches a hand-expanded product") {
    const EdgeList g = make_round(3, {{1, 2, make_rational(1, 2)}});
    const MixingMatrix w = to_mixing_matrix(g);
    const std::vector<double> x = {2.0, 4.0, 8.0};
    std::vector<double> y(3, 0.0);
    w.apply_vector(x, y);
    CHECK(y[0] == doctest::Approx(3.0));  // 0.5*2 + 0.5*4
    CHECK(y[1] == doctest::Approx(3.0));
    CHECK(y[2] == doctest::Approx(8.0));
    w.apply_vector_transpose(x, y);
    CHECK(y[0] == doctest::Approx(3.0));  // symmetric here
}

TEST_CASE("apply_mix multiplies node states from the right") {
    // x W with x the 1 x n matrix of node scalars
    const EdgeList g = make_round(2, {{1, 2, make_rational(1, 2)}});
    const MixingMatrix w = to_mixing_matrix(g);
    NodeMatrix x(1, 2);
    x.col(0)[0] = 1.0;
    x.col(1)[0] = 3.0;
    const NodeMatrix y = apply_mix(w, x);
    CHECK(y.col(0)[0] == doctest::Approx(2.0));
    CHECK(y.col(1)[0] == doctest::Approx(2.0));
}

TEST_CASE("consensus_error is the mean squared deviation from the node average") {
    NodeMatrix x(2, 2);
    x.col(0)[0] = 1.0;
    x.col(0)[1] = 0.0;
    x.col(1)[0] = 3.0;
    x.col(1)[1] = 4.0;
    // mean = (2, 2); deviations (-1,-2) and (1,2), each norm^2 = 5
    CHECK(consensus_error(x) == doctest::Approx(5.0).epsilon(1e-15));
    NodeMatrix flat(3, 4);
    for (int i = 0; i < 4; ++i)
        for (int r = 0; r < 3; ++r) flat.col(i)[r] = 7.5;
    CHECK(consensus_error(flat) == 0.0);
}

TEST_CASE("gaussian_node_matrix is seed-deterministic") {
    const NodeMatrix a = gaussian_node_matrix(4, 6, 99);
    const NodeMatrix b = gaussian_node_matrix(4, 6, 99);
    const NodeMatrix c = gaussian_node_matrix(4, 6, 100);
    CHECK(a.data == b.data);
    CHECK(a.data != c.data);
}

TEST_CASE("validate_sequence accepts a correct round") {
    const auto seq = wrap(4, 2, make_round(4, {{1, 2, make_rational(1, 2)}, {3, 4, make_rational(1, 2)}}));
    CHECK(validate_sequence(seq).ok());
}

TEST_CASE("validate_sequence flags every broken invariant") {
    SUBCASE("index out of range") {
        const auto seq = wrap(3, 2, make_round(3, {{1, 5, make_rational(1, 2)}}));
        CHECK(has_kind(validate_sequence(seq), "IndexRange"));
    }
    SUBCASE("self loop") {
        const auto seq = wrap(3, 2, make_round(3, {{2, 2, make_rational(1, 2)}}));
        CHECK(has_kind(validate_sequence(seq), "SelfLoop"));
    }
    SUBCASE("undirected orientation") {
        const auto seq = wrap(3, 2, make_round(3, {{2, 1, make_rational(1, 2)}}));
        CHECK(has_kind(validate_sequence(seq), "EdgeOrder"));
    }
    SUBCASE("duplicate edge") {
        const auto seq = wrap(
            3, 2, make_round(3, {{1, 2, make_rational(1, 2)}, {1, 2, make_rational(1, 4)}}));
        CHECK(has_kind(validate_sequence(seq), "DuplicateEdge"));
    }
    SUBCASE("weight out of range") {
        const auto seq = wrap(3, 2, make_round(3, {{1, 2, make_rational(3, 2)}}));
        CHECK(has_kind(validate_sequence(seq), "WeightRange"));
        const auto zero = wrap(3, 2, make_round(3, {{1, 2, make_rational(0, 2)}}));
        CHECK(has_kind(validate_sequence(zero), "WeightRange"));
    }
    SUBCASE("degree above declared k") {
        const auto seq = wrap(4, 1,
                              make_round(4, {{1, 2, make_rational(1, 4)},
                                             {1, 3, make_rational(1, 4)},
                                             {1, 4, make_rational(1, 4)}}));
        CHECK(has_kind(validate_sequence(seq), "DegreeViolation"));
    }
    SUBCASE("incident weight overflow") {
        const auto seq = wrap(
            3, 2, make_round(3, {{1, 2, make_rational(3, 4)}, {1, 3, make_rational(1, 2)}}));
        CHECK(has_kind(validate_sequence(seq), "IncidentWeightOverflow"));
    }
    SUBCASE("directed imbalance") {
        const auto seq = wrap(2, 1, make_round(2, {{1, 2, make_rational(1, 2)}}, true));
        CHECK(has_kind(validate_sequence(seq), "DirectedImbalance"));
    }
    SUBCASE("node count mismatch") {
        const auto seq = wrap(4, 2, make_round(3, {{1, 2, make_rational(1, 2)}}));
        CHECK(has_kind(validate_sequence(seq), "NodeCountMismatch"));
    }
    SUBCASE("empty sequence with n > 1") {
        GraphSequence seq;
        seq.n = 3;
        seq.k = 1;
        CHECK(has_kind(validate_sequence(seq), "EmptySequence"));
    }
    SUBCASE("declared k outside 1..n-1") {
        const auto seq = wrap(3, 5, make_round(3, {{1, 2, make_rational(1, 2)}}));
        CHECK(has_kind(validate_sequence(seq), "DegreeViolation"));
    }
    SUBCASE("n == 1 admits only the empty sequence") {
        GraphSequence empty;
        empty.n = 1;
        CHECK(validate_sequence(empty).ok());
        auto nonempty = wrap(1, 1, make_round(1, {}));
        CHECK(has_kind(validate_sequence(nonempty), "EmptySequence"));
    }
}
