#include "finitemix/mixing.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "finitemix/error.hpp"
#include "finitemix/random.hpp"

namespace finitemix {

namespace {
constexpr double kStochasticSlack = 1e-12;
}

double MixingMatrix::entry(int i, int j) const {
    for (const Entry& e : rows_[static_cast<std::size_t>(i)])
        if (e.col == j) return e.value;
    return 0.0;
}

void MixingMatrix::apply_vector(std::span<const double> x, std::span<double> y) const {
    for (int i = 0; i < n_; ++i) {
        double acc = 0.0;
        for (const Entry& e : rows_[static_cast<std::size_t>(i)]) acc += e.value * x[static_cast<std::size_t>(e.col)];
        y[static_cast<std::size_t>(i)] = acc;
    }
}

void MixingMatrix::apply_vector_transpose(std::span<const double> x, std::span<double> y) const {
    std::fill(y.begin(), y.end(), 0.0);
    for (int i = 0; i < n_; ++i)
        for (const Entry& e : rows_[static_cast<std::size_t>(i)])
            y[static_cast<std::size_t>(e.col)] += e.value * x[static_cast<std::size_t>(i)];
}

std::size_t MixingMatrix::off_diagonal_entries() const {
    std::size_t count = 0;
    for (int i = 0; i < n_; ++i)
        for (const Entry& e : rows_[static_cast<std::size_t>(i)])
            if (e.col != i) ++count;
    return count;
}

MixingMatrix to_mixing_matrix(const EdgeList& g) {
    if (g.n < 1) raise("DimensionMismatch", "edge list has no nodes");
    MixingMatrix w;
    w.n_ = g.n;
    w.rows_.assign(static_cast<std::size_t>(g.n), {});

    std::vector<double> row_sum(static_cast<std::size_t>(g.n), 0.0);
    std::vector<double> col_sum(static_cast<std::size_t>(g.n), 0.0);

    auto add = [&](int u, int v, double value) {
        w.rows_[static_cast<std::size_t>(u)].push_back({v, value});
        row_sum[static_cast<std::size_t>(u)] += value;
        col_sum[static_cast<std::size_t>(v)] += value;
    };

    for (const Edge& e : g.edges) {
        if (e.u < 1 || e.u > g.n || e.v < 1 || e.v > g.n)
            raise("DimensionMismatch", "edge endpoint outside 1.." + std::to_string(g.n));
        if (e.u == e.v) raise("DimensionMismatch", "explicit self-loop on node " + std::to_string(e.u));
        const double value = to_double(e.weight);
        if (!(value > 0.0) || value > 1.0) raise("WeightRange", "edge weight outside (0, 1]");
        add(e.u - 1, e.v - 1, value);
        if (!g.directed) add(e.v - 1, e.u - 1, value);
    }

    for (int i = 0; i < g.n; ++i) {
        const double rs = row_sum[static_cast<std::size_t>(i)];
        const double cs = col_sum[static_cast<std::size_t>(i)];
        if (rs > 1.0 + kStochasticSlack || cs > 1.0 + kStochasticSlack)
            raise("IncidentWeightOverflow",
                  "node " + std::to_string(i + 1) + " carries incident weight " +
                      std::to_string(std::max(rs, cs)) + " > 1");
        if (g.directed && std::abs(rs - cs) > kStochasticSlack)
            raise("DirectedImbalance",
                  "node " + std::to_string(i + 1) + " sends " + std::to_string(rs) +
                      " but receives " + std::to_string(cs));
        const double diag = std::max(0.0, 1.0 - rs);
        w.rows_[static_cast<std::size_t>(i)].push_back({i, diag});
        std::sort(w.rows_[static_cast<std::size_t>(i)].begin(), w.rows_[static_cast<std::size_t>(i)].end(),
                  [](const MixingMatrix::Entry& a, const MixingMatrix::Entry& b) { return a.col < b.col; });
    }
    return w;
}

NodeMatrix apply_mix(const MixingMatrix& w, const NodeMatrix& x) {
    if (w.n() != x.nodes)
        raise("DimensionMismatch", "mixing matrix is " + std::to_string(w.n()) +
                                       " nodes, state is " + std::to_string(x.nodes));
    NodeMatrix out(x.dim, x.nodes);
    for (int j = 0; j < w.n(); ++j) {
        const auto src = x.col(j);
        for (const MixingMatrix::Entry& e : w.row(j)) {
            auto dst = out.col(e.col);
            for (int r = 0; r < x.dim; ++r) dst[static_cast<std::size_t>(r)] += e.value * src[static_cast<std::size_t>(r)];
        }
    }
    return out;
}

double consensus_error(const NodeMatrix& x) {
    if (x.nodes < 1) raise("DimensionMismatch", "state has no columns");
    std::vector<double> mean(static_cast<std::size_t>(x.dim), 0.0);
    for (int i = 0; i < x.nodes; ++i) {
        const auto c = x.col(i);
        for (int r = 0; r < x.dim; ++r) mean[static_cast<std::size_t>(r)] += c[static_cast<std::size_t>(r)];
    }
    for (double& m : mean) m /= x.nodes;
    double acc = 0.0;
    for (int i = 0; i < x.nodes; ++i) {
        const auto c = x.col(i);
        for (int r = 0; r < x.dim; ++r) {
            const double d = c[static_cast<std::size_t>(r)] - mean[static_cast<std::size_t>(r)];
            acc += d * d;
        }
    }
    return acc / x.nodes;
}

NodeMatrix gaussian_node_matrix(int dim, int nodes, std::uint64_t seed) {
    NodeMatrix x(dim, nodes);
    GaussianSampler g(seed);
    for (double& v : x.data) v = g.next();
    return x;
}

}  // namespace finitemix
