#include "finitemix/dsgd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "finitemix/builders.hpp"
#include "finitemix/error.hpp"
#include "finitemix/mixing.hpp"
#include "finitemix/parallel.hpp"
#include "finitemix/random.hpp"
#include "finitemix/text.hpp"

namespace finitemix {

namespace {

void mat_vec(const std::vector<double>& a, int d, std::span<const double> x,
             std::span<double> out) {
    for (int r = 0; r < d; ++r) {
        double s = 0.0;
        const std::size_t row = static_cast<std::size_t>(r) * static_cast<std::size_t>(d);
        for (int c = 0; c < d; ++c) s += a[row + static_cast<std::size_t>(c)] * x[static_cast<std::size_t>(c)];
        out[static_cast<std::size_t>(r)] = s;
    }
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

}  // namespace

void QuadraticProblem::gradient(int node, std::span<const double> x, std::span<double> out) const {
    mat_vec(curvature, d, x, out);
    const auto b = linear_term(node);
    for (int i = 0; i < d; ++i) out[static_cast<std::size_t>(i)] -= b[static_cast<std::size_t>(i)];
}

void QuadraticProblem::mean_gradient(std::span<const double> x, std::span<double> out) const {
    mat_vec(curvature, d, x, out);
    for (int i = 0; i < d; ++i) out[static_cast<std::size_t>(i)] -= linear_mean[static_cast<std::size_t>(i)];
}

double QuadraticProblem::mean_value(std::span<const double> x) const {
    std::vector<double> ax(static_cast<std::size_t>(d));
    mat_vec(curvature, d, x, ax);
    return 0.5 * dot(x, ax) - dot(std::span<const double>(linear_mean), x);
}

QuadraticProblem make_problem(int n, int d, double zeta_scale, double sigma, double mu,
                              double l_smooth, std::uint64_t seed) {
    if (n < 1) raise("BadCount", "node count must be >= 1, got " + std::to_string(n));
    if (d < 1) raise("BadCount", "dimension must be >= 1, got " + std::to_string(d));
    if (!(mu > 0.0) || !(l_smooth >= mu))
        raise("BadSpectrum", "need 0 < mu <= l_smooth, got mu=" + format_double(mu) +
                                 " l_smooth=" + format_double(l_smooth));
    if (zeta_scale < 0.0 || sigma < 0.0)
        raise("BadNoise", "zeta_scale and sigma must be nonnegative");

    QuadraticProblem p;
    p.n = n;
    p.d = d;
    p.zeta_scale = zeta_scale;
    p.sigma = sigma;
    p.mu = mu;
    p.l_smooth = l_smooth;
    p.seed = seed;

    // random orthonormal basis via Gram-Schmidt over Gaussian draws
    GaussianSampler curv(derive_seed(seed, "problem-curvature"));
    std::vector<std::vector<double>> basis;
    while (static_cast<int>(basis.size()) < d) {
        std::vector<double> v(static_cast<std::size_t>(d));
        for (double& x : v) x = curv.next();
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& q : basis) {
                const double c = dot(v, q);
                for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * q[i];
            }
        const double nrm = norm(v);
        if (nrm < 1e-6) continue;
        for (double& x : v) x /= nrm;
        basis.push_back(std::move(v));
    }

    std::vector<double> lambda(static_cast<std::size_t>(d), l_smooth);
    if (d > 1)
        for (int j = 0; j < d; ++j)
            lambda[static_cast<std::size_t>(j)] =
                mu + (l_smooth - mu) * static_cast<double>(j) / static_cast<double>(d - 1);

    p.curvature.assign(static_cast<std::size_t>(d) * static_cast<std::size_t>(d), 0.0);
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) {
            double s = 0.0;
            for (int j = 0; j < d; ++j)
                s += lambda[static_cast<std::size_t>(j)] * basis[static_cast<std::size_t>(j)][static_cast<std::size_t>(r)] *
                     basis[static_cast<std::size_t>(j)][static_cast<std::size_t>(c)];
            p.curvature[static_cast<std::size_t>(r) * static_cast<std::size_t>(d) + static_cast<std::size_t>(c)] = s;
        }

    GaussianSampler opt(derive_seed(seed, "problem-optimum"));
    p.x_star.resize(static_cast<std::size_t>(d));
    for (double& x : p.x_star) x = opt.next();

    // zero-sum shifts give sum_i grad f_i(x_star) = 0 exactly
    std::vector<double> shifts(static_cast<std::size_t>(n) * static_cast<std::size_t>(d));
    for (int i = 0; i < n; ++i) {
        GaussianSampler s(derive_seed(seed, "problem-shift", static_cast<std::uint64_t>(i)));
        for (int j = 0; j < d; ++j)
            shifts[static_cast<std::size_t>(i) * static_cast<std::size_t>(d) + static_cast<std::size_t>(j)] = s.next();
    }
    for (int j = 0; j < d; ++j) {
        double mean = 0.0;
        for (int i = 0; i < n; ++i)
            mean += shifts[static_cast<std::size_t>(i) * static_cast<std::size_t>(d) + static_cast<std::size_t>(j)];
        mean /= static_cast<double>(n);
        for (int i = 0; i < n; ++i)
            shifts[static_cast<std::size_t>(i) * static_cast<std::size_t>(d) + static_cast<std::size_t>(j)] -= mean;
    }

    p.linear_terms.resize(static_cast<std::size_t>(n) * static_cast<std::size_t>(d));
    std::vector<double> target(static_cast<std::size_t>(d));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < d; ++j)
            target[static_cast<std::size_t>(j)] =
                p.x_star[static_cast<std::size_t>(j)] +
                zeta_scale * shifts[static_cast<std::size_t>(i) * static_cast<std::size_t>(d) + static_cast<std::size_t>(j)];
        mat_vec(p.curvature, d,
                target,
                std::span<double>(p.linear_terms)
                    .subspan(static_cast<std::size_t>(i) * static_cast<std::size_t>(d),
                             static_cast<std::size_t>(d)));
    }

    p.linear_mean.assign(static_cast<std::size_t>(d), 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j)
            p.linear_mean[static_cast<std::size_t>(j)] += p.linear_term(i)[static_cast<std::size_t>(j)];
    for (double& v : p.linear_mean) v /= static_cast<double>(n);

    std::vector<double> dev(static_cast<std::size_t>(d));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < d; ++j)
            dev[static_cast<std::size_t>(j)] =
                p.linear_term(i)[static_cast<std::size_t>(j)] - p.linear_mean[static_cast<std::size_t>(j)];
        p.zeta_hat = std::max(p.zeta_hat, norm(dev));
    }
    p.f_star = p.mean_value(p.x_star);
    return p;
}

void gradient_noise(std::uint64_t run_seed, int node, int round, double sigma,
                    std::span<double> out) {
    GaussianSampler g(derive_seed(run_seed, "dsgd-noise", static_cast<std::uint64_t>(node),
                                  static_cast<std::uint64_t>(round)));
    for (double& x : out) x = sigma * g.next();
}

TrainingTrace dsgd_run(const QuadraticProblem& problem, const GraphSequence& seq,
                       const DSGDConfig& cfg) {
    if (problem.n != seq.n)
        raise("DimensionMismatch", "problem has n=" + std::to_string(problem.n) +
                                       " but sequence has n=" + std::to_string(seq.n));
    if (cfg.eta < 0.0) raise("BadConfig", "eta must be nonnegative");
    if (cfg.rounds < 1) raise("BadConfig", "rounds must be >= 1");
    if (cfg.momentum < 0.0 || cfg.momentum >= 1.0) raise("BadConfig", "momentum must be in [0,1)");
    const int m = static_cast<int>(seq.graphs.size());
    if (m == 0 && seq.n > 1) raise("EmptySequence", "sequence has no graphs");

    std::vector<MixingMatrix> mixes;
    mixes.reserve(static_cast<std::size_t>(m));
    for (const EdgeList& g : seq.graphs) mixes.push_back(to_mixing_matrix(g));

    const int n = problem.n;
    const int d = problem.d;
    NodeMatrix x(d, n);
    NodeMatrix half(d, n);
    NodeMatrix buffer(d, n);  // heavy-ball state, never mixed
    std::vector<double> grad(static_cast<std::size_t>(d));
    std::vector<double> noise(static_cast<std::size_t>(d));
    std::vector<double> xbar(static_cast<std::size_t>(d));
    std::vector<double> gbar(static_cast<std::size_t>(d));
    std::vector<double> predicted(static_cast<std::size_t>(d));

    TrainingTrace trace;
    trace.rounds = cfg.rounds;
    trace.seed = cfg.seed;
    trace.zeta_at_optimum = problem.zeta_hat;
    // with shared curvature grad f_i(x) - grad f(x) = mean(b) - b_i everywhere
    trace.zeta_along_trajectory = problem.zeta_hat;

    auto node_average = [&](const NodeMatrix& state, std::vector<double>& out) {
        std::fill(out.begin(), out.end(), 0.0);
        for (int i = 0; i < n; ++i) {
            const auto col = state.col(i);
            for (int j = 0; j < d; ++j) out[static_cast<std::size_t>(j)] += col[static_cast<std::size_t>(j)];
        }
        for (double& v : out) v /= static_cast<double>(n);
    };
    auto record = [&](const NodeMatrix& state) {
        node_average(state, xbar);
        problem.mean_gradient(xbar, gbar);
        trace.grad_norm_sq.push_back(dot(gbar, gbar));
        trace.consensus_err.push_back(consensus_error(state));
        trace.suboptimality.push_back(problem.mean_value(xbar) - problem.f_star);
    };

    record(x);
    for (int r = 0; r < cfg.rounds; ++r) {
        node_average(x, xbar);
        for (int i = 0; i < n; ++i) {
            problem.gradient(i, x.col(i), grad);
            if (problem.sigma > 0.0) {
                gradient_noise(cfg.seed, i, r, problem.sigma, noise);
                for (int j = 0; j < d; ++j) grad[static_cast<std::size_t>(j)] += noise[static_cast<std::size_t>(j)];
            }
            auto u = buffer.col(i);
            auto xi = x.col(i);
            auto hi = half.col(i);
            for (int j = 0; j < d; ++j) {
                u[static_cast<std::size_t>(j)] =
                    cfg.momentum * u[static_cast<std::size_t>(j)] + grad[static_cast<std::size_t>(j)];
                hi[static_cast<std::size_t>(j)] =
                    xi[static_cast<std::size_t>(j)] - cfg.eta * u[static_cast<std::size_t>(j)];
            }
        }
        // doubly stochastic mixing cannot move the mean: predicted average
        // after the round equals average pre-mix step
        node_average(buffer, gbar);
        for (int j = 0; j < d; ++j)
            predicted[static_cast<std::size_t>(j)] =
                xbar[static_cast<std::size_t>(j)] - cfg.eta * gbar[static_cast<std::size_t>(j)];

        if (m > 0)
            x = apply_mix(mixes[static_cast<std::size_t>(r % m)], half);
        else
            std::swap(x, half);

        node_average(x, xbar);
        double drift = 0.0;
        for (int j = 0; j < d; ++j) {
            const double delta = xbar[static_cast<std::size_t>(j)] - predicted[static_cast<std::size_t>(j)];
            drift += delta * delta;
        }
        trace.mean_drift.push_back(std::sqrt(drift));
        record(x);
    }
    return trace;
}

std::vector<SweepCell> topology_sweep(const QuadraticProblem& problem,
                                      const std::vector<std::string>& families,
                                      const DSGDConfig& cfg,
                                      const std::vector<std::uint64_t>& seeds) {
    const std::vector<std::uint64_t> use_seeds = seeds.empty() ? std::vector<std::uint64_t>{cfg.seed} : seeds;
    std::vector<SweepCell> cells(families.size() * use_seeds.size());
    parallel_for_indices(cells.size(), [&](std::size_t idx) {
        const std::size_t fi = idx / use_seeds.size();
        const std::size_t si = idx % use_seeds.size();
        SweepCell cell;
        cell.family = families[fi];
        cell.seed = use_seeds[si];
        try {
            const GraphSequence seq = build_family(families[fi], problem.n);
            DSGDConfig local = cfg;
            local.seed = use_seeds[si];
            const TrainingTrace trace = dsgd_run(problem, seq, local);
            cell.family = seq.builder_tag;
            cell.length = static_cast<int>(seq.graphs.size());
            cell.max_deg = max_degree(seq);
            cell.final_grad_norm_sq = trace.grad_norm_sq.back();
            double total = 0.0;
            for (std::size_t r = 1; r < trace.consensus_err.size(); ++r) total += trace.consensus_err[r];
            cell.mean_consensus_error = total / static_cast<double>(cfg.rounds);
            // one message per directed edge, two per undirected edge
            for (int r = 0; r < cfg.rounds; ++r) {
                if (cell.length == 0) break;
                const EdgeList& g = seq.graphs[static_cast<std::size_t>(r % cell.length)];
                cell.comm_cost += static_cast<long long>(g.edges.size()) * (g.directed ? 1 : 2);
            }
            cell.ok = true;
        } catch (const Error& e) {
            cell.ok = false;
            cell.error_code = e.code();
            cell.error_message = e.message();
        }
        cells[idx] = std::move(cell);
    });
    return cells;
}

std::string trace_csv(const TrainingTrace& trace) {
    std::string out = "round,grad_norm_sq,consensus_error,suboptimality\n";
    for (std::size_t r = 0; r < trace.grad_norm_sq.size(); ++r) {
        out += std::to_string(r);
        out += ',';
        out += format_double(trace.grad_norm_sq[r]);
        out += ',';
        out += format_double(trace.consensus_err[r]);
        out += ',';
        out += format_double(trace.suboptimality[r]);
        out += '\n';
    }
    return out;
}

std::string sweep_csv(const std::vector<SweepCell>& cells) {
    std::string out = "family,seed,length,max_degree,final_grad_norm_sq,mean_consensus_error,comm_cost\n";
    for (const SweepCell& cell : cells) {
        out += cell.family;
        out += ',';
        out += std::to_string(cell.seed);
        out += ',';
        if (cell.ok) {
            out += std::to_string(cell.length);
            out += ',';
            out += std::to_string(cell.max_deg);
            out += ',';
            out += format_double(cell.final_grad_norm_sq);
            out += ',';
            out += format_double(cell.mean_consensus_error);
            out += ',';
            out += std::to_string(cell.comm_cost);
        } else {
            out += ",,,,";
        }
        out += '\n';
    }
    return out;
}

std::string problem_to_json(const QuadraticProblem& problem) {
    nlohmann::ordered_json j;
    j["n"] = problem.n;
    j["d"] = problem.d;
    j["zeta_scale"] = problem.zeta_scale;
    j["sigma"] = problem.sigma;
    j["mu"] = problem.mu;
    j["l_smooth"] = problem.l_smooth;
    j["seed"] = problem.seed;
    j["curvature"] = problem.curvature;
    nlohmann::ordered_json linear = nlohmann::ordered_json::array();
    for (int i = 0; i < problem.n; ++i) {
        const auto b = problem.linear_term(i);
        linear.push_back(std::vector<double>(b.begin(), b.end()));
    }
    j["linear_terms"] = std::move(linear);
    j["x_star"] = problem.x_star;
    return j.dump();
}

QuadraticProblem problem_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        raise("BadJson", std::string("cannot parse problem JSON: ") + e.what());
    }
    QuadraticProblem p;
    try {
        p.n = j.at("n").get<int>();
        p.d = j.at("d").get<int>();
        p.zeta_scale = j.at("zeta_scale").get<double>();
        p.sigma = j.at("sigma").get<double>();
        p.mu = j.at("mu").get<double>();
        p.l_smooth = j.at("l_smooth").get<double>();
        p.seed = j.at("seed").get<std::uint64_t>();
        p.curvature = j.at("curvature").get<std::vector<double>>();
        p.x_star = j.at("x_star").get<std::vector<double>>();
        for (const auto& row : j.at("linear_terms")) {
            const auto values = row.get<std::vector<double>>();
            p.linear_terms.insert(p.linear_terms.end(), values.begin(), values.end());
        }
    } catch (const nlohmann::json::exception& e) {
        raise("BadFormat", std::string("problem JSON schema mismatch: ") + e.what());
    }
    if (p.n < 1 || p.d < 1) raise("BadFormat", "problem JSON has invalid n or d");
    if (p.curvature.size() != static_cast<std::size_t>(p.d) * static_cast<std::size_t>(p.d))
        raise("BadFormat", "curvature size does not match d*d");
    if (p.x_star.size() != static_cast<std::size_t>(p.d))
        raise("BadFormat", "x_star size does not match d");
    if (p.linear_terms.size() != static_cast<std::size_t>(p.n) * static_cast<std::size_t>(p.d))
        raise("BadFormat", "linear_terms do not match n rows of d entries");
    if (!(p.mu > 0.0) || !(p.l_smooth >= p.mu)) raise("BadSpectrum", "loaded spectrum band invalid");
    if (p.zeta_scale < 0.0 || p.sigma < 0.0) raise("BadNoise", "loaded noise parameters invalid");

    p.linear_mean.assign(static_cast<std::size_t>(p.d), 0.0);
    for (int i = 0; i < p.n; ++i)
        for (int jx = 0; jx < p.d; ++jx)
            p.linear_mean[static_cast<std::size_t>(jx)] += p.linear_term(i)[static_cast<std::size_t>(jx)];
    for (double& v : p.linear_mean) v /= static_cast<double>(p.n);
    std::vector<double> dev(static_cast<std::size_t>(p.d));
    for (int i = 0; i < p.n; ++i) {
        for (int jx = 0; jx < p.d; ++jx)
            dev[static_cast<std::size_t>(jx)] =
                p.linear_term(i)[static_cast<std::size_t>(jx)] - p.linear_mean[static_cast<std::size_t>(jx)];
        p.zeta_hat = std::max(p.zeta_hat, norm(dev));
    }
    p.f_star = p.mean_value(p.x_star);
    return p;
}

void save_problem(const std::string& path, const QuadraticProblem& problem) {
    write_file_atomic(path, problem_to_json(problem) + "\n");
}

QuadraticProblem load_problem(const std::string& path) { return problem_from_json(read_file(path)); }

}  // namespace finitemix
