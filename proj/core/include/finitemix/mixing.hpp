#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "finitemix/graph.hpp"

namespace finitemix {

// Column-major d x n matrix; column i is the state vector of node i+1.
struct NodeMatrix {
    int dim = 0;
    int nodes = 0;
    std::vector<double> data;  // data[col * dim + row]

    NodeMatrix() = default;
    NodeMatrix(int d, int n) : dim(d), nodes(n), data(static_cast<std::size_t>(d) * n, 0.0) {}

    std::span<double> col(int i) {
        return {data.data() + static_cast<std::size_t>(i) * dim, static_cast<std::size_t>(dim)};
    }
    std::span<const double> col(int i) const {
        return {data.data() + static_cast<std::size_t>(i) * dim, static_cast<std::size_t>(dim)};
    }
};

// Sparse doubly stochastic mixing matrix in row form, diagonal included.
// Rows and columns each sum to 1 by construction.
class MixingMatrix {
public:
    struct Entry {
        int col = 0;
        double value = 0.0;
    };

    int n() const { return n_; }
    const std::vector<Entry>& row(int i) const { return rows_[i]; }

    // Dense lookup, test helper. O(row length).
    double entry(int i, int j) const;

    // y = W x (rows) and y = W^T x (columns).
    void apply_vector(std::span<const double> x, std::span<double> y) const;
    void apply_vector_transpose(std::span<const double> x, std::span<double> y) const;

    std::size_t off_diagonal_entries() const;

    friend MixingMatrix to_mixing_matrix(const EdgeList& g);

private:
    int n_ = 0;
    std::vector<std::vector<Entry>> rows_;
};

// Builds W from one round: W[u][v] = weight for each edge (both orientations
// when undirected), diagonal = 1 - incident weight. Throws
// IncidentWeightOverflow when a node's incident weight exceeds 1, and
// DirectedImbalance when a directed round has row sum != column sum for some
// node (no nonnegative diagonal can make such a matrix doubly stochastic).
MixingMatrix to_mixing_matrix(const EdgeList& g);

// Returns X W: output column i = sum_j W[j][i] * x_j. Right multiplication,
// so node i averages the values its column of W assigns to it.
NodeMatrix apply_mix(const MixingMatrix& w, const NodeMatrix& x);

// (1/n) * sum_i ||x_i - xbar||^2 over columns.
double consensus_error(const NodeMatrix& x);

// i.i.d. standard normal entries from the given seed, column by column.
NodeMatrix gaussian_node_matrix(int dim, int nodes, std::uint64_t seed);

}  // namespace finitemix
