#include "finitemix/consensus.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "finitemix/builders.hpp"
#include "finitemix/error.hpp"
#include "finitemix/parallel.hpp"
#include "finitemix/random.hpp"
#include "finitemix/text.hpp"

namespace finitemix {

namespace {

std::vector<MixingMatrix> to_mixing_matrices(const GraphSequence& seq) {
    std::vector<MixingMatrix> out;
    out.reserve(seq.graphs.size());
    for (const EdgeList& g : seq.graphs) out.push_back(to_mixing_matrix(g));
    return out;
}

void subtract_mean(std::vector<double>& v) {
    if (v.empty()) return;
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    for (double& x : v) x -= mean;
}

double norm2(const std::vector<double>& v) {
    double s = 0.0;
    for (const double x : v) s += x * x;
    return std::sqrt(s);
}

}  // namespace

GossipTrace run_gossip(const GraphSequence& seq, int dim, int iters, std::uint64_t seed) {
    if (dim < 1) raise("BadCount", "gossip dimension must be >= 1, got " + std::to_string(dim));
    if (iters < 0) raise("BadCount", "gossip iterations must be >= 0, got " + std::to_string(iters));
    const int m = static_cast<int>(seq.graphs.size());
    if (m == 0 && iters > 0)
        raise("EmptySequence", "cannot run " + std::to_string(iters) + " gossip steps on an empty sequence");

    GossipTrace trace;
    trace.iterations = iters;
    trace.seed = seed;
    trace.errors.reserve(static_cast<std::size_t>(iters) + 1);

    NodeMatrix x = gaussian_node_matrix(dim, seq.n, seed);
    trace.errors.push_back(consensus_error(x));
    const auto mixes = to_mixing_matrices(seq);
    for (int r = 0; r < iters; ++r) {
        x = apply_mix(mixes[static_cast<std::size_t>(r % m)], x);
        trace.errors.push_back(consensus_error(x));
    }
    return trace;
}

std::optional<int> verify_finite_time(const GraphSequence& seq, double tol, int cycles,
                                      std::uint64_t seed) {
    if (tol <= 0) raise("BadTol", "tolerance must be positive");
    if (cycles < 1) raise("BadCount", "cycles must be >= 1, got " + std::to_string(cycles));

    NodeMatrix x = gaussian_node_matrix(kProbeDim, seq.n, seed);
    const double initial = consensus_error(x);
    if (initial <= 0.0) return 0;

    const int m = static_cast<int>(seq.graphs.size());
    if (m == 0) return std::nullopt;
    const auto mixes = to_mixing_matrices(seq);
    const long long total = static_cast<long long>(m) * cycles;
    for (long long t = 1; t <= total; ++t) {
        x = apply_mix(mixes[static_cast<std::size_t>((t - 1) % m)], x);
        if (consensus_error(x) <= tol * initial) return static_cast<int>(t);
    }
    return std::nullopt;
}

double uniform_product_residual(const GraphSequence& seq, int cycles) {
    if (cycles < 1) raise("BadCount", "cycles must be >= 1, got " + std::to_string(cycles));
    const int n = seq.n;
    NodeMatrix product(n, n);
    for (int i = 0; i < n; ++i) product.col(i)[static_cast<std::size_t>(i)] = 1.0;
    const auto mixes = to_mixing_matrices(seq);
    for (int c = 0; c < cycles; ++c)
        for (const MixingMatrix& w : mixes) product = apply_mix(w, product);

    const double uniform = 1.0 / static_cast<double>(n);
    double worst = 0.0;
    for (const double v : product.data) worst = std::max(worst, std::abs(v - uniform));
    return worst;
}

RateEstimate consensus_rate(const MixingMatrix& w, double tol, int max_iters) {
    if (tol <= 0) raise("BadTol", "tolerance must be positive");
    if (max_iters < 1) raise("BadCount", "max_iters must be >= 1");

    const int n = w.n();
    RateEstimate est;
    if (n <= 1) {
        est.converged = true;
        return est;
    }

    std::vector<double> v(static_cast<std::size_t>(n));
    GaussianSampler sampler(derive_seed(kProbeSeed, "consensus-rate", static_cast<std::uint64_t>(n)));
    for (double& x : v) x = sampler.next();
    subtract_mean(v);
    const double start_norm = norm2(v);
    if (start_norm == 0.0) {
        est.converged = true;
        return est;
    }
    for (double& x : v) x /= start_norm;

    // y = P W^T W P v; its top eigenvalue on the deviation subspace is beta^2
    std::vector<double> mid(static_cast<std::size_t>(n));
    std::vector<double> y(static_cast<std::size_t>(n));
    double lambda = 0.0;
    for (int it = 1; it <= max_iters; ++it) {
        est.iterations_used = it;
        w.apply_vector(v, mid);
        w.apply_vector_transpose(mid, y);
        subtract_mean(y);

        lambda = std::inner_product(v.begin(), v.end(), y.begin(), 0.0);
        double resid = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) {
            const double d = y[i] - lambda * v[i];
            resid += d * d;
        }
        est.residual = std::sqrt(resid);
        if (est.residual <= tol) {
            est.converged = true;
            break;
        }
        const double ny = norm2(y);
        if (ny == 0.0) {
            // the deflated operator annihilates the probe: exact consensus
            lambda = 0.0;
            est.residual = 0.0;
            est.converged = true;
            break;
        }
        for (std::size_t i = 0; i < y.size(); ++i) v[i] = y[i] / ny;
    }
    est.beta = std::sqrt(std::max(lambda, 0.0));
    return est;
}

namespace {

struct PlannedRow {
    std::string request;
    FamilySpec spec;
    bool spec_ok = false;
    std::string spec_error_code;
    std::string spec_error_message;
    int n = 0;
    std::optional<int> k;
};

RateTableRow evaluate_row(const PlannedRow& plan, std::uint64_t seed) {
    RateTableRow row;
    row.family = plan.request;
    row.n = plan.n;
    row.k = plan.k;
    if (!plan.spec_ok) {
        row.error_code = plan.spec_error_code;
        row.error_message = plan.spec_error_message;
        return row;
    }
    try {
        const GraphSequence seq = build_family(plan.spec, plan.n, plan.k);
        row.family = seq.builder_tag;
        if (!row.k) row.k = seq.k;
        row.length = static_cast<int>(seq.graphs.size());
        row.max_deg = max_degree(seq);
        const std::uint64_t row_seed =
            derive_seed(seed, plan.request, static_cast<std::uint64_t>(plan.n),
                        static_cast<std::uint64_t>(plan.k ? *plan.k : 0));
        row.finite_time = verify_finite_time(seq, kFiniteTimeTol, 1, row_seed).has_value();
        row.ok = true;
        if (row.length == 1) {
            const RateEstimate est = consensus_rate(to_mixing_matrix(seq.graphs[0]));
            if (est.converged) {
                row.beta = est.beta;
            } else {
                row.error_code = "NoConvergence";
                row.error_message = "power iteration residual " + format_double(est.residual) +
                                    " after " + std::to_string(est.iterations_used) + " iterations";
            }
        }
    } catch (const Error& e) {
        row.ok = false;
        row.error_code = e.code();
        row.error_message = e.message();
    }
    return row;
}

}  // namespace

std::vector<RateTableRow> sequence_rate_table(const std::vector<std::string>& families,
                                              const std::vector<int>& n_values,
                                              const std::vector<int>& k_values,
                                              std::uint64_t seed) {
    std::vector<PlannedRow> plan;
    for (const std::string& request : families) {
        PlannedRow proto;
        proto.request = request;
        try {
            proto.spec = FamilySpec::parse(request);
            proto.spec_ok = true;
        } catch (const Error& e) {
            proto.spec_error_code = e.code();
            proto.spec_error_message = e.message();
        }
        const bool wants_k = proto.spec_ok && !proto.spec.k &&
                             (proto.spec.name == "hhc" || proto.spec.name == "simple-base" ||
                              proto.spec.name == "base");
        for (const int n : n_values) {
            PlannedRow row = proto;
            row.n = n;
            if (!proto.spec_ok) {
                plan.push_back(std::move(row));
                continue;
            }
            if (wants_k) {
                if (k_values.empty()) {
                    row.spec_ok = false;
                    row.spec_error_code = "BadK";
                    row.spec_error_message = "family '" + proto.spec.name + "' needs k";
                    plan.push_back(std::move(row));
                    continue;
                }
                for (const int k : k_values) {
                    PlannedRow with_k = row;
                    with_k.k = k;
                    plan.push_back(std::move(with_k));
                }
                continue;
            }
            row.k = proto.spec.k;
            plan.push_back(std::move(row));
        }
    }

    std::vector<RateTableRow> rows(plan.size());
    parallel_for_indices(plan.size(), [&](std::size_t i) { rows[i] = evaluate_row(plan[i], seed); });
    return rows;
}

std::string gossip_csv(const GossipTrace& trace) {
    std::string out = "iter,error\n";
    for (std::size_t i = 0; i < trace.errors.size(); ++i) {
        out += std::to_string(i);
        out += ',';
        out += format_double(trace.errors[i]);
        out += '\n';
    }
    return out;
}

std::string rate_table_csv(const std::vector<RateTableRow>& rows) {
    std::string out = "family,n,k,length,max_degree,finite_time,beta\n";
    for (const RateTableRow& row : rows) {
        out += row.family;
        out += ',';
        out += std::to_string(row.n);
        out += ',';
        if (row.k) out += std::to_string(*row.k);
        out += ',';
        if (row.ok) {
            out += std::to_string(row.length);
            out += ',';
            out += std::to_string(row.max_deg);
            out += ',';
            out += row.finite_time ? "true" : "false";
            out += ',';
            if (row.beta) out += format_double(*row.beta);
        } else {
            out += ",,,";
        }
        out += '\n';
    }
    return out;
}

}  // namespace finitemix
