#include "finitemix/builders.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <span>
#include <utility>

#include "finitemix/error.hpp"

namespace finitemix {

namespace {

using Round = std::vector<Edge>;
using NodeSpan = std::span<const int>;

Edge undirected_edge(int a, int b, Rational weight) {
    return Edge{std::min(a, b), std::max(a, b), weight};
}

// Minimal number of factors of x, all in [2, cap]; -1 when impossible.
int min_len_capped(long long x, int cap, std::map<std::pair<long long, int>, int>& memo) {
    if (x == 1) return 0;
    if (cap < 2) return -1;
    const auto key = std::pair{x, cap};
    if (const auto it = memo.find(key); it != memo.end()) return it->second;
    int best = -1;
    for (long long d = 2; d <= cap && d <= x; ++d) {
        if (x % d != 0) continue;
        const int rest = min_len_capped(x / d, cap, memo);
        if (rest >= 0 && (best < 0 || rest + 1 < best)) best = rest + 1;
    }
    memo[key] = best;
    return best;
}

void check_node_count(long long n) {
    if (n < 1) raise("BadN", "node count must be at least 1, got " + std::to_string(n));
}

// Base-family degree parameter. n == 1 skips the range check because the
// degenerate empty sequence is valid for every k.
void check_degree_parameter(long long n, int k) {
    check_node_count(n);
    if (n == 1) return;
    if (k < 1 || k > n - 1)
        raise("BadK", "k=" + std::to_string(k) + " outside 1.." + std::to_string(n - 1));
}

// Disjoint-clique rounds over an ordered node subset. Factors apply smallest
// first; round l joins nodes i and i + m * stride(l) into cliques of size
// factor(l), so after l rounds each contiguous stride block is averaged.
std::vector<Round> hyper_hypercube_rounds(NodeSpan nodes, int k) {
    const int n = static_cast<int>(nodes.size());
    if (n <= 1) return {};
    std::vector<int> factors = min_factorization(n, k).factors;
    std::reverse(factors.begin(), factors.end());

    std::vector<Round> rounds;
    rounds.reserve(factors.size());
    long long stride = 1;
    for (const int f : factors) {
        Round round;
        const Rational weight = make_rational(1, f);
        std::vector<int> budget(static_cast<std::size_t>(n) + 1, 0);
        for (int i = 1; i <= n; ++i) {
            for (int m = 1; m <= f; ++m) {
                const int j = static_cast<int>((i - 1 + static_cast<long long>(m) * stride) % n) + 1;
                if (j == i) continue;
                // each node joins exactly one clique of size f per round
                if (budget[static_cast<std::size_t>(i)] < f - 1 &&
                    budget[static_cast<std::size_t>(j)] < f - 1) {
                    round.push_back(undirected_edge(nodes[static_cast<std::size_t>(i - 1)],
                                                    nodes[static_cast<std::size_t>(j - 1)], weight));
                    ++budget[static_cast<std::size_t>(i)];
                    ++budget[static_cast<std::size_t>(j)];
                }
            }
        }
        rounds.push_back(std::move(round));
        stride *= f;
    }
    return rounds;
}

// Contiguous run of positions inside the node span of one builder call.
struct Slice {
    int offset = 0;
    int size = 0;
};

// Finite-time rounds for arbitrary subset size. Phases, in round order:
//   head   rounds 1..m1:        every digit group averages internally.
//   bridge round m1 + t:        every node of the groups above group t links
//                               to one still-isolated node per cell of group
//                               t, pulling group t onto the running average;
//                               leftover isolated nodes of group t pair up
//                               into cliques (values already equal, kept for
//                               regular degree usage).
//   tail   rounds after m1 + t: group t replays its cell rounds cyclically
//                               until the largest group finishes its replay.
std::vector<Round> simple_base_rounds(NodeSpan nodes, int k) {
    const int n = static_cast<int>(nodes.size());
    if (n <= 1) return {};
    if (split_smooth_rough(n, k).rough_part == 1) return hyper_hypercube_rounds(nodes, k);

    const std::vector<BaseDigit> digits = base_digits(n, k).digits;
    const int levels = static_cast<int>(digits.size());

    std::vector<Slice> groups(static_cast<std::size_t>(levels));
    std::vector<std::vector<Slice>> cells(static_cast<std::size_t>(levels));
    {
        long long offset = 0;
        for (int l = 0; l < levels; ++l) {
            long long cell_size = 1;
            for (int e = 0; e < digits[static_cast<std::size_t>(l)].exponent; ++e) cell_size *= k + 1;
            const long long group_size = digits[static_cast<std::size_t>(l)].coeff * cell_size;
            groups[static_cast<std::size_t>(l)] = {static_cast<int>(offset), static_cast<int>(group_size)};
            for (int a = 0; a < digits[static_cast<std::size_t>(l)].coeff; ++a)
                cells[static_cast<std::size_t>(l)].push_back(
                    {static_cast<int>(offset + a * cell_size), static_cast<int>(cell_size)});
            offset += group_size;
        }
    }

    std::vector<long long> suffix_size(static_cast<std::size_t>(levels) + 1, 0);
    for (int l = levels - 1; l >= 0; --l)
        suffix_size[static_cast<std::size_t>(l)] =
            suffix_size[static_cast<std::size_t>(l) + 1] + groups[static_cast<std::size_t>(l)].size;

    auto slice_span = [&](const Slice& s) {
        return nodes.subspan(static_cast<std::size_t>(s.offset), static_cast<std::size_t>(s.size));
    };

    std::vector<std::vector<Round>> group_rounds(static_cast<std::size_t>(levels));
    std::vector<std::vector<std::vector<Round>>> cell_rounds(static_cast<std::size_t>(levels));
    for (int l = 0; l < levels; ++l) {
        group_rounds[static_cast<std::size_t>(l)] =
            hyper_hypercube_rounds(slice_span(groups[static_cast<std::size_t>(l)]), k);
        for (const Slice& cell : cells[static_cast<std::size_t>(l)])
            cell_rounds[static_cast<std::size_t>(l)].push_back(
                hyper_hypercube_rounds(slice_span(cell), k));
    }

    const int head = static_cast<int>(group_rounds[0].size());
    const int tail = static_cast<int>(cell_rounds[0][0].size());

    auto replay = [](const std::vector<Round>& source, int counter, Round& out) {
        if (source.empty()) return;
        const Round& r = source[static_cast<std::size_t>((counter - 1) % static_cast<int>(source.size()))];
        out.insert(out.end(), r.begin(), r.end());
    };

    auto replay_cells = [&](int l, int counter, Round& out) {
        for (const auto& source : cell_rounds[static_cast<std::size_t>(l)])
            replay(source, counter, out);
    };

    std::vector<Round> rounds;
    std::vector<int> replay_count(static_cast<std::size_t>(levels), 0);
    std::vector<char> picked(nodes.size(), 0);

    int m = 0;
    while (replay_count[0] < tail) {
        ++m;
        Round round;
        std::fill(picked.begin(), picked.end(), 0);
        for (int l = levels - 1; l >= 0; --l) {
            const int level = l + 1;
            if (m <= head) {
                replay(group_rounds[static_cast<std::size_t>(l)], m, round);
            } else if (m < head + level) {
                // bridge into group t
                const int t = m - head - 1;  // 0-based target group
                const Slice target_group = groups[static_cast<std::size_t>(t)];
                const Rational weight =
                    make_rational(target_group.size,
                                  static_cast<long long>(digits[static_cast<std::size_t>(t)].coeff) *
                                      suffix_size[static_cast<std::size_t>(t)]);
                const Slice source = groups[static_cast<std::size_t>(l)];
                for (int p = source.offset; p < source.offset + source.size; ++p) {
                    for (const Slice& cell : cells[static_cast<std::size_t>(t)]) {
                        int q = cell.offset + cell.size - 1;
                        while (q >= cell.offset && picked[static_cast<std::size_t>(q)]) --q;
                        if (q < cell.offset)
                            raise("InternalInvariant", "no isolated node left in a bridge target cell");
                        picked[static_cast<std::size_t>(q)] = 1;
                        round.push_back(undirected_edge(nodes[static_cast<std::size_t>(q)],
                                                        nodes[static_cast<std::size_t>(p)], weight));
                    }
                }
            } else if (m == head + level && level != levels) {
                // pair up whatever the bridges left isolated in this group
                const Slice g = groups[static_cast<std::size_t>(l)];
                std::vector<int> isolated;
                for (int p = g.offset; p < g.offset + g.size; ++p)
                    if (!picked[static_cast<std::size_t>(p)]) isolated.push_back(p);
                std::size_t at = 0;
                while (isolated.size() - at >= 2) {
                    const std::size_t take =
                        std::min<std::size_t>(static_cast<std::size_t>(k) + 1, isolated.size() - at);
                    const Rational weight = make_rational(1, static_cast<long long>(take));
                    for (std::size_t i = at; i < at + take; ++i)
                        for (std::size_t j = i + 1; j < at + take; ++j)
                            round.push_back(undirected_edge(nodes[static_cast<std::size_t>(isolated[i])],
                                                            nodes[static_cast<std::size_t>(isolated[j])],
                                                            weight));
                    at += take;
                }
            } else {
                ++replay_count[static_cast<std::size_t>(l)];
                if (digits[static_cast<std::size_t>(l)].exponent != 0)
                    replay_cells(l, replay_count[static_cast<std::size_t>(l)], round);
                else
                    replay(group_rounds[static_cast<std::size_t>(l)],
                           replay_count[static_cast<std::size_t>(l)], round);
            }
        }
        rounds.push_back(std::move(round));
    }
    return rounds;
}

std::vector<Round> base_rounds(NodeSpan nodes, int k) {
    const int n = static_cast<int>(nodes.size());
    if (n <= 1) return {};
    const SmoothRoughSplit split = split_smooth_rough(n, k);
    const int smooth = static_cast<int>(split.smooth_part);
    const int rough = static_cast<int>(split.rough_part);

    // parallel simple-base rounds over the rough-sized slices
    std::vector<Round> composite;
    {
        std::vector<std::vector<Round>> per_slice(static_cast<std::size_t>(smooth));
        for (int l = 0; l < smooth; ++l)
            per_slice[static_cast<std::size_t>(l)] =
                simple_base_rounds(nodes.subspan(static_cast<std::size_t>(l) * rough,
                                                 static_cast<std::size_t>(rough)),
                                   k);
        const std::size_t len = per_slice[0].size();
        for (const auto& rounds : per_slice)
            if (rounds.size() != len)
                raise("InternalInvariant", "slice round counts diverged in the composite builder");
        for (std::size_t m = 0; m < len; ++m) {
            Round round;
            for (const auto& rounds : per_slice)
                round.insert(round.end(), rounds[m].begin(), rounds[m].end());
            composite.push_back(std::move(round));
        }
    }

    // transversal rounds splice the slices: member j of every slice
    {
        std::vector<std::vector<Round>> per_transversal(static_cast<std::size_t>(rough));
        std::vector<int> members(static_cast<std::size_t>(smooth), 0);
        for (int j = 0; j < rough; ++j) {
            for (int l = 0; l < smooth; ++l)
                members[static_cast<std::size_t>(l)] =
                    nodes[static_cast<std::size_t>(l) * rough + static_cast<std::size_t>(j)];
            per_transversal[static_cast<std::size_t>(j)] = hyper_hypercube_rounds(members, k);
        }
        const std::size_t len = per_transversal[0].size();
        for (const auto& rounds : per_transversal)
            if (rounds.size() != len)
                raise("InternalInvariant", "transversal round counts diverged");
        for (std::size_t m = 0; m < len; ++m) {
            Round round;
            for (const auto& rounds : per_transversal)
                round.insert(round.end(), rounds[m].begin(), rounds[m].end());
            composite.push_back(std::move(round));
        }
    }

    std::vector<Round> plain = simple_base_rounds(nodes, k);
    if (plain.size() < composite.size()) return plain;
    return composite;
}

GraphSequence finish(int n, int k, std::string tag, std::vector<Round>&& rounds,
                     bool directed = false) {
    GraphSequence seq;
    seq.n = n;
    seq.k = k;
    seq.builder_tag = std::move(tag);
    seq.graphs.reserve(rounds.size());
    for (Round& r : rounds) {
        EdgeList g;
        g.n = n;
        g.directed = directed;
        g.edges = std::move(r);
        sort_edges(g);
        seq.graphs.push_back(std::move(g));
    }
    for (std::size_t gi = 0; gi < seq.graphs.size(); ++gi) {
        const int deg = max_degree(seq.graphs[gi]);
        if (deg > seq.k)
            raise("DegreeViolation", "round " + std::to_string(gi + 1) + " reaches degree " +
                                         std::to_string(deg) + " > k=" + std::to_string(seq.k));
    }
    return seq;
}

std::vector<int> identity_nodes(int n) {
    std::vector<int> nodes(static_cast<std::size_t>(n));
    std::iota(nodes.begin(), nodes.end(), 1);
    return nodes;
}

int ceil_log2(int n) {
    int t = 0;
    while ((1LL << t) < n) ++t;
    return t;
}

}  // namespace

FactorDecomposition min_factorization(long long n, int k) {
    if (k < 1) raise("BadK", "k must be at least 1, got " + std::to_string(k));
    check_node_count(n);
    FactorDecomposition out{n, k, {}};
    if (n == 1) return out;

    const int cap = static_cast<int>(std::min<long long>(static_cast<long long>(k) + 1, n));
    std::map<std::pair<long long, int>, int> memo;
    const int total = min_len_capped(n, cap, memo);
    if (total < 0)
        raise("RoughFactor",
              "n=" + std::to_string(n) + " has a prime factor larger than " + std::to_string(k + 1));

    // lexicographically largest descending list: take the largest feasible
    // factor at every position
    long long rest = n;
    int bound = cap;
    for (int step = 0; step < total; ++step) {
        for (int d = static_cast<int>(std::min<long long>(bound, rest)); d >= 2; --d) {
            if (rest % d != 0) continue;
            if (min_len_capped(rest / d, d, memo) == total - step - 1) {
                out.factors.push_back(d);
                rest /= d;
                bound = d;
                break;
            }
        }
    }
    if (rest != 1) raise("InternalInvariant", "factor reconstruction failed");
    return out;
}

BaseDigits base_digits(long long n, int k) {
    if (k < 1) raise("BadK", "k must be at least 1, got " + std::to_string(k));
    check_node_count(n);
    BaseDigits out{n, k, {}};
    const long long base = static_cast<long long>(k) + 1;
    long long rest = n;
    int exponent = 0;
    while (rest > 0) {
        const int digit = static_cast<int>(rest % base);
        if (digit != 0) out.digits.push_back({digit, exponent});
        rest /= base;
        ++exponent;
    }
    std::reverse(out.digits.begin(), out.digits.end());
    return out;
}

SmoothRoughSplit split_smooth_rough(long long n, int k) {
    if (k < 1) raise("BadK", "k must be at least 1, got " + std::to_string(k));
    check_node_count(n);
    SmoothRoughSplit out{n, k, 1, n};
    for (long long p = 2; p <= static_cast<long long>(k) + 1; ++p) {
        while (out.rough_part % p == 0) {
            out.smooth_part *= p;
            out.rough_part /= p;
        }
    }
    return out;
}

double base_length_bound(long long n, int k) {
    return 2.0 * std::log(static_cast<double>(n)) / std::log(static_cast<double>(k) + 1.0) + 2.0;
}

GraphSequence hyper_hypercube(int n, int k) {
    check_degree_parameter(n, k);
    const auto nodes = identity_nodes(n);
    return finish(n, k, "hhc:k=" + std::to_string(k), hyper_hypercube_rounds(nodes, k));
}

GraphSequence simple_base(int n, int k) {
    check_degree_parameter(n, k);
    const auto nodes = identity_nodes(n);
    return finish(n, k, "simple-base:k=" + std::to_string(k), simple_base_rounds(nodes, k));
}

GraphSequence base_graph(int n, int k) {
    check_degree_parameter(n, k);
    const auto nodes = identity_nodes(n);
    return finish(n, k, "base:k=" + std::to_string(k), base_rounds(nodes, k));
}

GraphSequence ring(int n) {
    if (n < 3) raise("BadN", "ring needs n >= 3, got " + std::to_string(n));
    const Rational w = make_rational(1, 3);
    Round round;
    for (int i = 1; i < n; ++i) round.push_back({i, i + 1, w});
    round.push_back({1, n, w});
    std::vector<Round> rounds;
    rounds.push_back(std::move(round));
    return finish(n, 2, "ring", std::move(rounds));
}

GraphSequence torus(int n, int rows, int cols) {
    if (rows < 2 || cols < 2 || static_cast<long long>(rows) * cols != n)
        raise("BadGrid", std::to_string(rows) + "x" + std::to_string(cols) +
                             " is not a valid grid for n=" + std::to_string(n));
    const Rational w = make_rational(1, 5);
    std::set<std::pair<int, int>> seen;  // wraparound can duplicate on 2-wide grids
    Round round;
    auto id = [cols](int r, int c) { return r * cols + c + 1; };
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            const int here = id(r, c);
            for (const int there : {id(r, (c + 1) % cols), id((r + 1) % rows, c)}) {
                if (there == here) continue;
                const auto key = std::minmax(here, there);
                if (seen.insert(key).second) round.push_back({key.first, key.second, w});
            }
        }
    }
    std::vector<Round> rounds;
    rounds.push_back(std::move(round));
    EdgeList probe{n, false, rounds[0]};
    const int degree = max_degree(probe);
    return finish(n, degree, "torus:" + std::to_string(rows) + "x" + std::to_string(cols),
                  std::move(rounds));
}

GraphSequence exponential(int n) {
    if (n < 2) raise("BadN", "exponential graph needs n >= 2, got " + std::to_string(n));
    const int hops = ceil_log2(n);
    const Rational w = make_rational(1, hops + 1);
    Round round;
    for (int i = 1; i <= n; ++i)
        for (int j = 0; j < hops; ++j)
            round.push_back({i, static_cast<int>((i - 1 + (1LL << j)) % n) + 1, w});
    std::vector<Round> rounds;
    rounds.push_back(std::move(round));
    return finish(n, hops, "exp", std::move(rounds), /*directed=*/true);
}

GraphSequence one_peer_exponential(int n) {
    if (n < 2) raise("BadN", "one-peer exponential graph needs n >= 2, got " + std::to_string(n));
    const Rational w = make_rational(1, 2);
    std::vector<Round> rounds;
    for (int t = 0; t < ceil_log2(n); ++t) {
        Round round;
        for (int i = 1; i <= n; ++i)
            round.push_back({i, static_cast<int>((i - 1 + (1LL << t)) % n) + 1, w});
        rounds.push_back(std::move(round));
    }
    return finish(n, 1, "1peer-exp", std::move(rounds), /*directed=*/true);
}

GraphSequence one_peer_hypercube(int n) {
    check_node_count(n);
    if ((n & (n - 1)) != 0)
        raise("NonPowerOfTwo", "one-peer hypercube needs a power of two, got " + std::to_string(n));
    const Rational w = make_rational(1, 2);
    std::vector<Round> rounds;
    for (int t = 0; (1 << t) < n; ++t) {
        Round round;
        for (int i = 0; i < n; ++i) {
            const int j = i ^ (1 << t);
            if (i < j) round.push_back({i + 1, j + 1, w});
        }
        rounds.push_back(std::move(round));
    }
    return finish(n, 1, "1peer-hypercube", std::move(rounds));
}

FamilySpec FamilySpec::parse(const std::string& text) {
    FamilySpec spec;
    const auto colon = text.find(':');
    spec.name = text.substr(0, colon);

    static const std::set<std::string> known = {"ring",           "torus", "exp",
                                                "1peer-exp",      "1peer-hypercube",
                                                "hhc",            "simple-base",
                                                "base"};
    if (known.find(spec.name) == known.end())
        raise("BadFamily", "unknown family '" + spec.name + "'");

    if (colon == std::string::npos) return spec;
    const std::string param = text.substr(colon + 1);
    if (param.rfind("k=", 0) == 0) {
        try {
            spec.k = std::stoi(param.substr(2));
        } catch (const std::exception&) {
            raise("BadFamily", "cannot parse k in '" + text + "'");
        }
        return spec;
    }
    const auto cross = param.find('x');
    if (spec.name == "torus" && cross != std::string::npos) {
        try {
            spec.grid = std::pair{std::stoi(param.substr(0, cross)), std::stoi(param.substr(cross + 1))};
        } catch (const std::exception&) {
            raise("BadFamily", "cannot parse grid in '" + text + "'");
        }
        return spec;
    }
    raise("BadFamily", "unrecognized parameter '" + param + "' in '" + text + "'");
}

GraphSequence build_family(const FamilySpec& spec, int n, std::optional<int> k_context) {
    if (spec.name == "ring") return ring(n);
    if (spec.name == "exp") return exponential(n);
    if (spec.name == "1peer-exp") return one_peer_exponential(n);
    if (spec.name == "1peer-hypercube") return one_peer_hypercube(n);
    if (spec.name == "torus") {
        if (spec.grid) return torus(n, spec.grid->first, spec.grid->second);
        int root = static_cast<int>(std::sqrt(static_cast<double>(n)));
        while (static_cast<long long>(root + 1) * (root + 1) <= n) ++root;
        for (int r = root; r >= 2; --r)
            if (n % r == 0 && n / r >= 2) return torus(n, r, n / r);
        raise("BadGrid", "n=" + std::to_string(n) + " admits no grid with both sides >= 2");
    }
    const std::optional<int> k = spec.k ? spec.k : k_context;
    if (!k) raise("BadK", "family '" + spec.name + "' needs k");
    if (spec.name == "hhc") return hyper_hypercube(n, *k);
    if (spec.name == "simple-base") return simple_base(n, *k);
    return base_graph(n, *k);
}

GraphSequence build_family(const std::string& spec, int n, std::optional<int> k_context) {
    return build_family(FamilySpec::parse(spec), n, k_context);
}

}  // namespace finitemix
