#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "finitemix/graph.hpp"

namespace finitemix {

// n written as a product of the fewest factors, each in [2, k+1]. Canonical
// order: among minimal-length factorizations the lexicographically largest
// list sorted descending. Empty for n == 1.
struct FactorDecomposition {
    long long n = 1;
    int k = 1;
    std::vector<int> factors;
};

// n = sum coeff * (k+1)^exponent with coefficients in [1, k] and strictly
// decreasing exponents; the most significant digit comes first.
struct BaseDigit {
    int coeff = 0;
    int exponent = 0;

    friend bool operator==(const BaseDigit&, const BaseDigit&) = default;
};

struct BaseDigits {
    long long n = 0;
    int k = 1;
    std::vector<BaseDigit> digits;
};

// n = smooth_part * rough_part where smooth_part collects every prime factor
// <= k+1 and rough_part is coprime to 2..k+1.
struct SmoothRoughSplit {
    long long n = 0;
    int k = 1;
    long long smooth_part = 1;
    long long rough_part = 1;
};

// Throws RoughFactor when some prime factor of n exceeds k+1, BadK for k < 1.
FactorDecomposition min_factorization(long long n, int k);

BaseDigits base_digits(long long n, int k);

SmoothRoughSplit split_smooth_rough(long long n, int k);

// Length upper bound for the base builders: 2 * log_{k+1}(n) + 2.
double base_length_bound(long long n, int k);

// Sequence of disjoint-clique rounds that averages any state exactly in
// min_factorization(n, k) rounds. Rounds apply the factors smallest first;
// after rounds 1..l every contiguous block of (factor_1 * ... * factor_l)
// nodes holds that block's exact average. Requires n to be (k+1)-smooth.
GraphSequence hyper_hypercube(int n, int k);

// Finite-time averaging sequence for arbitrary n, at most
// 2 * log_{k+1}(n) + 2 rounds: digit groups of size coeff * (k+1)^exponent
// average internally, bridge rounds fold each smaller group into the rest,
// and the large-group cells replay their clique rounds to finish.
GraphSequence simple_base(int n, int k);

// Shorter composite construction: simple_base runs on smooth_part many
// rough_part-sized slices in parallel, then hyper_hypercube rounds over the
// transversals (the l-th member of every slice) splice the slices together.
// Falls back to plain simple_base whenever that is strictly shorter.
GraphSequence base_graph(int n, int k);

// Static baselines (single round, applied forever) and the classic one-peer
// sequences. All weights are exact rationals; directed rounds keep per-node
// send and receive mass equal, so every round stays doubly stochastic.
GraphSequence ring(int n);
GraphSequence torus(int n, int rows, int cols);
GraphSequence exponential(int n);
GraphSequence one_peer_exponential(int n);
GraphSequence one_peer_hypercube(int n);

// Parsed builder tag: "ring", "torus:5x5", "exp", "1peer-exp",
// "1peer-hypercube", "hhc:k=2", "simple-base:k=1", "base:k=1". Bare "torus"
// picks the most square grid; bare base-family names take k from context.
struct FamilySpec {
    std::string name;
    std::optional<int> k;
    std::optional<std::pair<int, int>> grid;

    static FamilySpec parse(const std::string& text);
};

// Builds the named family at size n. k_context supplies k for base-family
// specs that omit it; a torus spec without a grid gets the factor pair
// (rows, cols) with rows <= cols minimizing cols - rows (BadGrid when n has
// no such pair). Throws BadFamily for unknown names.
GraphSequence build_family(const FamilySpec& spec, int n, std::optional<int> k_context = {});
GraphSequence build_family(const std::string& spec, int n, std::optional<int> k_context = {});

}  // namespace finitemix
