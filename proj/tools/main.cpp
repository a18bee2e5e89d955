#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "finitemix/builders.hpp"
#include "finitemix/consensus.hpp"
#include "finitemix/dsgd.hpp"
#include "finitemix/error.hpp"
#include "finitemix/graph.hpp"
#include "finitemix/mixing.hpp"
#include "finitemix/serialize.hpp"
#include "finitemix/text.hpp"
#include "finitemix/validate.hpp"

namespace {

using namespace finitemix;

void emit(const std::string& text) { std::fwrite(text.data(), 1, text.size(), stdout); }

void emit_line(const std::string& key, const std::string& value) { emit(key + ": " + value + "\n"); }

// empty path means stdout
void write_or_print(const std::string& path, const std::string& content) {
    if (path.empty())
        emit(content);
    else
        write_file_atomic(path, content);
}

struct TopologyFlags {
    std::string family;
    int k = 0;
    bool has_k = false;
    int rows = 0;
    int cols = 0;
    bool has_grid = false;

    void attach(CLI::App* cmd, bool family_required) {
        auto* fam = cmd->add_option("--family", family,
                                    "ring, torus[:RxC], exp, 1peer-exp, 1peer-hypercube, "
                                    "hhc[:k=K], simple-base[:k=K], base[:k=K]");
        if (family_required) fam->required();
        cmd->add_option("--k", k, "degree parameter for the base families")
            ->check(CLI::Range(1, 1 << 30))
            ->each([this](const std::string&) { has_k = true; });
        cmd->add_option("--rows", rows, "torus grid rows")->each([this](const std::string&) {
            has_grid = true;
        });
        cmd->add_option("--cols", cols, "torus grid cols")->each([this](const std::string&) {
            has_grid = true;
        });
    }

    GraphSequence build(int n) const {
        std::string spec = family;
        if (has_grid) {
            if (family != "torus")
                raise("BadUsage", "--rows/--cols apply only to --family torus");
            spec = "torus:" + std::to_string(rows) + "x" + std::to_string(cols);
        }
        return build_family(spec, n, has_k ? std::optional<int>(k) : std::nullopt);
    }
};

int run_build(const TopologyFlags& topo, int n, const std::string& out) {
    const GraphSequence seq = topo.build(n);
    if (out.empty()) {
        emit(to_json(seq) + "\n");
        return 0;
    }
    save_sequence(out, seq);
    emit_line("builder", seq.builder_tag);
    emit_line("n", std::to_string(seq.n));
    emit_line("length", std::to_string(seq.graphs.size()));
    emit_line("max_degree", std::to_string(max_degree(seq)));
    const FamilySpec spec = FamilySpec::parse(topo.family);
    if (spec.name == "hhc" || spec.name == "simple-base" || spec.name == "base")
        emit_line("length_bound", format_double(base_length_bound(n, seq.k)));
    emit_line("out", out);
    return 0;
}

int run_verify(const std::string& path, double tol, int cycles) {
    const GraphSequence seq = load_sequence(path);
    const ValidationReport report = validate_sequence(seq);
    for (const Violation& v : report.violations)
        emit("violation: " + v.kind + " graph=" + std::to_string(v.graph_index) + " " + v.detail +
             "\n");
    emit_line("valid", report.ok() ? "true" : "false");
    std::optional<int> steps;
    if (report.ok()) {
        steps = verify_finite_time(seq, tol, cycles);
        emit_line("finite_time", steps ? "true" : "false");
        if (steps) emit_line("steps", std::to_string(*steps));
    } else {
        emit_line("finite_time", "false");
    }
    return report.ok() && steps ? 0 : 1;
}

int run_rate_single(const TopologyFlags& topo, int n) {
    const GraphSequence seq = topo.build(n);
    emit_line("builder", seq.builder_tag);
    emit_line("n", std::to_string(seq.n));
    emit_line("length", std::to_string(seq.graphs.size()));
    emit_line("max_degree", std::to_string(max_degree(seq)));
    const auto steps = verify_finite_time(seq);
    emit_line("finite_time", steps ? "true" : "false");
    if (steps) emit_line("steps", std::to_string(*steps));
    if (seq.graphs.size() == 1) {
        const RateEstimate est = consensus_rate(to_mixing_matrix(seq.graphs[0]));
        if (!est.converged) {
            std::fprintf(stderr, "error: NoConvergence: power iteration residual %s after %d iterations\n",
                         format_double(est.residual).c_str(), est.iterations_used);
            return 1;
        }
        emit_line("beta", format_double(est.beta));
        emit_line("rate_iterations", std::to_string(est.iterations_used));
        emit_line("rate_residual", format_double(est.residual));
    }
    return 0;
}

int run_rate_batch(const std::vector<std::string>& families, const std::vector<int>& n_values,
                   const std::vector<int>& k_values, std::uint64_t seed, const std::string& out) {
    const auto rows = sequence_rate_table(families, n_values, k_values, seed);
    write_or_print(out, rate_table_csv(rows));
    for (const RateTableRow& row : rows)
        if (!row.error_code.empty())
            std::fprintf(stderr, "error: %s: %s (family=%s n=%d)\n", row.error_code.c_str(),
                         row.error_message.c_str(), row.family.c_str(), row.n);
    if (!out.empty()) {
        emit_line("rows", std::to_string(rows.size()));
        emit_line("out", out);
    }
    return 0;
}

int run_gossip(const TopologyFlags& topo, int n, int iters, int dim, std::uint64_t seed,
               const std::string& out) {
    const GraphSequence seq = topo.build(n);
    const GossipTrace trace = finitemix::run_gossip(seq, dim, iters, seed);
    write_or_print(out, gossip_csv(trace));
    if (!out.empty()) {
        emit_line("iterations", std::to_string(trace.iterations));
        emit_line("initial_error", format_double(trace.errors.front()));
        emit_line("final_error", format_double(trace.errors.back()));
        emit_line("out", out);
    }
    return 0;
}

struct ProblemFlags {
    std::string path;
    int n = 25;
    int dim = 4;
    double zeta = 0.0;
    double sigma = 0.0;
    double mu = 1.0;
    double l_smooth = 10.0;
    std::uint64_t seed = 1;

    void attach(CLI::App* cmd) {
        auto* load = cmd->add_option("--problem", path, "problem JSON produced by --save-problem");
        auto* gn = cmd->add_option("--n", n, "node count for a generated problem");
        auto* gd = cmd->add_option("--dim", dim, "dimension for a generated problem");
        auto* gz = cmd->add_option("--zeta", zeta, "heterogeneity scale");
        auto* gs = cmd->add_option("--sigma", sigma, "gradient noise std");
        auto* gm = cmd->add_option("--mu", mu, "smallest curvature eigenvalue");
        auto* gl = cmd->add_option("--l-smooth", l_smooth, "largest curvature eigenvalue");
        auto* gp = cmd->add_option("--problem-seed", seed, "seed for the generated problem");
        for (auto* opt : {gn, gd, gz, gs, gm, gl, gp}) load->excludes(opt);
    }

    QuadraticProblem realize() const {
        if (!path.empty()) return load_problem(path);
        return make_problem(n, dim, zeta, sigma, mu, l_smooth, seed);
    }
};

int run_dsgd(const ProblemFlags& pf, const TopologyFlags& topo, const DSGDConfig& cfg,
             const std::string& out, const std::string& save_problem_path) {
    const QuadraticProblem problem = pf.realize();
    const GraphSequence seq = topo.build(problem.n);
    const TrainingTrace trace = dsgd_run(problem, seq, cfg);
    if (!save_problem_path.empty()) save_problem(save_problem_path, problem);
    write_or_print(out, trace_csv(trace));
    if (!out.empty()) {
        emit_line("builder", seq.builder_tag);
        emit_line("rounds", std::to_string(trace.rounds));
        emit_line("zeta_hat", format_double(problem.zeta_hat));
        emit_line("final_grad_norm_sq", format_double(trace.grad_norm_sq.back()));
        emit_line("final_consensus_error", format_double(trace.consensus_err.back()));
        emit_line("final_suboptimality", format_double(trace.suboptimality.back()));
        emit_line("out", out);
    }
    return 0;
}

int run_sweep(const std::string& config_path, const std::string& out) {
    nlohmann::json cfg_json;
    try {
        cfg_json = nlohmann::json::parse(read_file(config_path));
    } catch (const nlohmann::json::exception& e) {
        raise("BadJson", std::string("cannot parse sweep config: ") + e.what());
    }
    QuadraticProblem problem;
    DSGDConfig cfg;
    std::vector<std::string> families;
    std::vector<std::uint64_t> seeds;
    try {
        const auto& pj = cfg_json.at("problem");
        if (pj.contains("path")) {
            problem = load_problem(pj.at("path").get<std::string>());
        } else {
            problem = make_problem(pj.at("n").get<int>(), pj.at("d").get<int>(),
                                   pj.at("zeta_scale").get<double>(), pj.at("sigma").get<double>(),
                                   pj.at("mu").get<double>(), pj.at("l_smooth").get<double>(),
                                   pj.at("seed").get<std::uint64_t>());
        }
        families = cfg_json.at("families").get<std::vector<std::string>>();
        cfg.eta = cfg_json.at("eta").get<double>();
        cfg.rounds = cfg_json.at("rounds").get<int>();
        cfg.momentum = cfg_json.value("momentum", 0.0);
        cfg.seed = cfg_json.value("seed", std::uint64_t{0});
        if (cfg_json.contains("seeds")) seeds = cfg_json.at("seeds").get<std::vector<std::uint64_t>>();
    } catch (const nlohmann::json::exception& e) {
        raise("BadFormat", std::string("sweep config schema mismatch: ") + e.what());
    }
    const auto cells = topology_sweep(problem, families, cfg, seeds);
    write_or_print(out, sweep_csv(cells));
    for (const SweepCell& cell : cells)
        if (!cell.ok)
            std::fprintf(stderr, "error: %s: %s (family=%s seed=%llu)\n", cell.error_code.c_str(),
                         cell.error_message.c_str(), cell.family.c_str(),
                         static_cast<unsigned long long>(cell.seed));
    if (!out.empty()) {
        emit_line("cells", std::to_string(cells.size()));
        emit_line("out", out);
    }
    return 0;
}

int run_export_dot(const std::string& path, const std::string& outdir) {
    const GraphSequence seq = load_sequence(path);
    const auto files = write_dot_files(seq, outdir);
    emit_line("files", std::to_string(files.size()));
    emit_line("outdir", outdir);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"finite-time consensus topologies: build, verify, and simulate"};
    app.require_subcommand(1);
    int rc = 0;

    // build
    auto* build = app.add_subcommand("build", "construct a sequence and write canonical JSON");
    TopologyFlags build_topo;
    build_topo.attach(build, true);
    int build_n = 0;
    std::string build_out;
    build->add_option("--n", build_n, "node count")->required()->check(CLI::Range(1, 1 << 30));
    build->add_option("--out", build_out, "output JSON path (default: stdout)");
    build->callback([&] { rc = run_build(build_topo, build_n, build_out); });

    // verify
    auto* verify = app.add_subcommand("verify", "validate a sequence and check finite-time consensus");
    std::string verify_path;
    double verify_tol = kFiniteTimeTol;
    int verify_cycles = 1;
    verify->add_option("sequence", verify_path, "sequence JSON path")->required();
    verify->add_option("--tol", verify_tol, "squared-error ratio tolerance");
    verify->add_option("--cycles", verify_cycles, "full passes of the sequence to try")
        ->check(CLI::Range(1, 1 << 30));
    verify->callback([&] { rc = run_verify(verify_path, verify_tol, verify_cycles); });

    // rate
    auto* rate = app.add_subcommand("rate", "consensus-rate report for one family or a table");
    TopologyFlags rate_topo;
    rate_topo.attach(rate, false);
    int rate_n = 0;
    std::vector<std::string> rate_families;
    std::vector<int> rate_ns;
    std::vector<int> rate_ks;
    std::uint64_t rate_seed = kProbeSeed;
    std::string rate_out;
    auto* rate_n_opt = rate->add_option("--n", rate_n, "node count (single mode)");
    rate->add_option("--families", rate_families, "comma-separated families (table mode)")
        ->delimiter(',');
    rate->add_option("--n-values", rate_ns, "comma-separated node counts (table mode)")
        ->delimiter(',');
    rate->add_option("--k-values", rate_ks, "k values crossed with base families lacking k")
        ->delimiter(',');
    rate->add_option("--seed", rate_seed, "probe seed for the table");
    rate->add_option("--out", rate_out, "CSV output path (default: stdout)");
    rate->callback([&] {
        const bool single = !rate_topo.family.empty();
        const bool batch = !rate_families.empty();
        if (single == batch)
            raise("BadUsage", "provide exactly one of --family or --families");
        if (single) {
            if (rate_n_opt->count() == 0) raise("BadUsage", "--n is required with --family");
            rc = run_rate_single(rate_topo, rate_n);
        } else {
            if (rate_ns.empty()) raise("BadUsage", "--n-values is required with --families");
            rc = run_rate_batch(rate_families, rate_ns, rate_ks, rate_seed, rate_out);
        }
    });

    // gossip
    auto* gossip = app.add_subcommand("gossip", "run gossip averaging and trace consensus error");
    TopologyFlags gossip_topo;
    gossip_topo.attach(gossip, true);
    int gossip_n = 0;
    int gossip_iters = 0;
    int gossip_dim = kProbeDim;
    std::uint64_t gossip_seed = 1;
    std::string gossip_out;
    gossip->add_option("--n", gossip_n, "node count")->required()->check(CLI::Range(1, 1 << 30));
    gossip->add_option("--iters", gossip_iters, "mixing steps")->required()
        ->check(CLI::Range(0, 1 << 30));
    gossip->add_option("--dim", gossip_dim, "state dimension")->check(CLI::Range(1, 1 << 30));
    gossip->add_option("--seed", gossip_seed, "seed for the Gaussian start");
    gossip->add_option("--out", gossip_out, "CSV output path (default: stdout)");
    gossip->callback(
        [&] { rc = run_gossip(gossip_topo, gossip_n, gossip_iters, gossip_dim, gossip_seed, gossip_out); });

    // dsgd
    auto* dsgd = app.add_subcommand("dsgd", "decentralized SGD on a synthetic quadratic");
    ProblemFlags dsgd_problem;
    dsgd_problem.attach(dsgd);
    TopologyFlags dsgd_topo;
    dsgd_topo.attach(dsgd, true);
    DSGDConfig dsgd_cfg;
    std::string dsgd_out;
    std::string dsgd_save_problem;
    dsgd->add_option("--eta", dsgd_cfg.eta, "learning rate")->required();
    dsgd->add_option("--rounds", dsgd_cfg.rounds, "training rounds")->required()
        ->check(CLI::Range(1, 1 << 30));
    dsgd->add_option("--momentum", dsgd_cfg.momentum, "heavy-ball coefficient in [0,1)");
    dsgd->add_option("--seed", dsgd_cfg.seed, "gradient-noise seed");
    dsgd->add_option("--out", dsgd_out, "trace CSV path (default: stdout)");
    dsgd->add_option("--save-problem", dsgd_save_problem, "also write the problem JSON here");
    dsgd->callback([&] { rc = run_dsgd(dsgd_problem, dsgd_topo, dsgd_cfg, dsgd_out, dsgd_save_problem); });

    // sweep
    auto* sweep = app.add_subcommand("sweep", "run dsgd across families from a JSON config");
    std::string sweep_config;
    std::string sweep_out;
    sweep->add_option("--config", sweep_config, "sweep config JSON")->required();
    sweep->add_option("--out", sweep_out, "CSV output path (default: stdout)");
    sweep->callback([&] { rc = run_sweep(sweep_config, sweep_out); });

    // export-dot
    auto* exp_dot = app.add_subcommand("export-dot", "write one Graphviz file per round");
    std::string dot_path;
    std::string dot_outdir;
    exp_dot->add_option("sequence", dot_path, "sequence JSON path")->required();
    exp_dot->add_option("--outdir", dot_outdir, "output directory")->required();
    exp_dot->callback([&] { rc = run_export_dot(dot_path, dot_outdir); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const finitemix::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return rc;
}
