#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "finitemix/builders.hpp"
#include "finitemix/consensus.hpp"
#include "finitemix/error.hpp"
#include "finitemix/mixing.hpp"
#include "finitemix/validate.hpp"

using namespace finitemix;

namespace {

// Independent dense route: beta is the top singular value of W - J/n.
double dense_consensus_rate(const EdgeList& g) {
    const MixingMatrix w = to_mixing_matrix(g);
    const int n = w.n();
    Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (const auto& entry : w.row(i)) dense(i, entry.col) = entry.value;
    dense.array() -= 1.0 / n;
    return dense.jacobiSvd().singularValues()(0);
}

EdgeList complete_uniform(int n) {
    EdgeList g;
    g.n = n;
    for (int u = 1; u <= n; ++u)
        for (int v = u + 1; v <= n; ++v) g.edges.push_back({u, v, make_rational(1, n)});
    return g;
}

}  // namespace

TEST_CASE("run_gossip records the initial error plus one entry per step") {
    const GraphSequence seq = base_graph(9, 2);
    const GossipTrace trace = run_gossip(seq, 4, 7, 123);
    CHECK(trace.iterations == 7);
    CHECK(trace.errors.size() == 8);
    CHECK(trace.errors[0] > 0.0);
    const GossipTrace again = run_gossip(seq, 4, 7, 123);
    CHECK(trace.errors == again.errors);
}

TEST_CASE("gossip error never increases under doubly stochastic mixing") {
    for (const char* spec : {"ring", "exp", "base:k=1", "1peer-exp"}) {
        CAPTURE(spec);
        const GossipTrace trace = run_gossip(build_family(spec, 16), 8, 40, 99);
        for (std::size_t t = 1; t < trace.errors.size(); ++t)
            CHECK(trace.errors[t] <= trace.errors[t - 1] + 1e-12);
    }
}

TEST_CASE("run_gossip validates its inputs") {
    const GraphSequence seq = base_graph(4, 1);
    CHECK_THROWS_AS(run_gossip(seq, 0, 3, 1), Error);
    CHECK_THROWS_AS(run_gossip(seq, 4, -1, 1), Error);
    GraphSequence empty;
    empty.n = 4;
    empty.k = 1;
    try {
        run_gossip(empty, 2, 3, 1);
        FAIL("expected EmptySequence");
    } catch (const Error& e) {
        CHECK(e.code() == "EmptySequence");
    }
}

TEST_CASE("verify_finite_time finds the exact step for finite-time families") {
    CHECK(verify_finite_time(base_graph(6, 1)) == 4);
    CHECK(verify_finite_time(simple_base(5, 1)) == 5);
    CHECK(verify_finite_time(hyper_hypercube(12, 2)) == 3);
    CHECK(verify_finite_time(one_peer_hypercube(16)) == 4);
}

TEST_CASE("static graphs never reach exact consensus within one pass") {
    CHECK(!verify_finite_time(ring(8)).has_value());
    CHECK(!verify_finite_time(exponential(12)).has_value());
    CHECK(!verify_finite_time(build_family("torus", 16)).has_value());
    // geometric mixing crosses any fixed ratio tolerance given enough steps,
    // so one pass is the horizon that separates exact from geometric
    CHECK(verify_finite_time(ring(8), 1e-12, 100).has_value());
}

TEST_CASE("verify_finite_time degenerates gracefully") {
    GraphSequence solo;
    solo.n = 1;
    solo.k = 1;
    CHECK(verify_finite_time(solo) == 0);  // single node is born converged
    GraphSequence empty;
    empty.n = 5;
    empty.k = 1;
    CHECK(!verify_finite_time(empty).has_value());
    CHECK_THROWS_AS(verify_finite_time(base_graph(4, 1), -1.0), Error);
    CHECK_THROWS_AS(verify_finite_time(base_graph(4, 1), kFiniteTimeTol, 0), Error);
}

TEST_CASE("uniform product residual separates exact from inexact families") {
    CHECK(uniform_product_residual(base_graph(6, 1)) <= 1e-12);
    CHECK(uniform_product_residual(simple_base(17, 2)) <= 1e-12);
    CHECK(uniform_product_residual(one_peer_exponential(32)) <= 1e-12);
    CHECK(uniform_product_residual(ring(8)) > 1e-3);
    CHECK(uniform_product_residual(exponential(12)) > 1e-3);
}

TEST_CASE("power iteration matches the dense singular value route") {
    for (int n : {4, 8, 16, 32, 64}) {
        CAPTURE(n);
        std::vector<EdgeList> rounds;
        rounds.push_back(ring(n).graphs[0]);
        rounds.push_back(exponential(n).graphs[0]);
        rounds.push_back(hyper_hypercube(n, 1).graphs[0]);
        if (n >= 9) rounds.push_back(build_family("torus", n).graphs[0]);
        for (const EdgeList& g : rounds) {
            const RateEstimate est = consensus_rate(to_mixing_matrix(g));
            CHECK(est.converged);
            CHECK(est.beta == doctest::Approx(dense_consensus_rate(g)).epsilon(1e-8));
        }
    }
}

TEST_CASE("consensus rate hits known closed forms") {
    const RateEstimate four_ring = consensus_rate(to_mixing_matrix(ring(4).graphs[0]));
    CHECK(four_ring.converged);
    CHECK(four_ring.beta == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
    const RateEstimate complete = consensus_rate(to_mixing_matrix(complete_uniform(6)));
    CHECK(complete.converged);
    CHECK(complete.beta <= 1e-7);
}

TEST_CASE("denser static graphs mix strictly faster at n = 64") {
    const double ring_beta = consensus_rate(to_mixing_matrix(ring(64).graphs[0])).beta;
    const double torus_beta =
        consensus_rate(to_mixing_matrix(build_family("torus", 64).graphs[0])).beta;
    const double exp_beta = consensus_rate(to_mixing_matrix(exponential(64).graphs[0])).beta;
    CHECK(ring_beta > torus_beta);
    CHECK(torus_beta > exp_beta);
    CHECK(exp_beta < 1.0);
    CHECK(ring_beta < 1.0);
}

TEST_CASE("rate table crosses families with sizes and keeps failures as rows") {
    const auto rows = sequence_rate_table({"ring", "1peer-hypercube", "base"}, {8, 12}, {1});
    REQUIRE(rows.size() == 6);
    for (const RateTableRow& row : rows) CAPTURE(row.family);

    const auto& ring8 = rows[0];
    CHECK(ring8.ok);
    CHECK(ring8.family == "ring");
    CHECK(ring8.beta.has_value());
    CHECK(!ring8.finite_time);

    // 1peer-hypercube at n = 12 must fail but keep its row
    const auto& hyper12 = rows[3];
    CHECK(!hyper12.ok);
    CHECK(hyper12.error_code == "NonPowerOfTwo");

    const auto& base8 = rows[4];
    CHECK(base8.ok);
    CHECK(base8.family == "base:k=1");
    CHECK(base8.finite_time);
    CHECK(!base8.beta.has_value());  // multi-round sequences carry no beta
}

TEST_CASE("rate table answers the one-peer power-of-two boundary") {
    const auto rows = sequence_rate_table({"1peer-exp"}, {4096, 5000}, {});
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].ok);
    CHECK(rows[0].length == 12);
    CHECK(rows[0].finite_time);
    CHECK(rows[1].ok);
    CHECK(rows[1].length == 13);
    CHECK(!rows[1].finite_time);
}

TEST_CASE("rate table is deterministic and independent of row order") {
    const auto once = sequence_rate_table({"ring", "base"}, {8, 16}, {2});
    const auto twice = sequence_rate_table({"ring", "base"}, {8, 16}, {2});
    REQUIRE(once.size() == twice.size());
    for (std::size_t i = 0; i < once.size(); ++i) {
        CHECK(once[i].family == twice[i].family);
        CHECK(once[i].beta == twice[i].beta);
        CHECK(once[i].finite_time == twice[i].finite_time);
    }
}

TEST_CASE("csv emitters pin their headers and row shapes") {
    const auto rows = sequence_rate_table({"ring", "base"}, {2, 8}, {1});
    const std::string csv = rate_table_csv(rows);
    CHECK(csv.find("family,n,k,length,max_degree,finite_time,beta\n") == 0);
    // ring at n = 2 fails (BadN) yet the row keeps all seven columns
    CHECK(csv.find("ring,2,,,,,\n") != std::string::npos);
    CHECK(csv.find("base:k=1,8,1,3,1,true,\n") != std::string::npos);

    const GossipTrace trace = run_gossip(base_graph(4, 1), 2, 2, 5);
    const std::string gcsv = gossip_csv(trace);
    CHECK(gcsv.find("iter,error\n") == 0);
    CHECK(std::count(gcsv.begin(), gcsv.end(), '\n') == 4);
}
