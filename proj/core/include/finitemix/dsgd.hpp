#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "finitemix/graph.hpp"

namespace finitemix {

// Synthetic quadratic objective f(x) = (1/n) sum_i f_i(x) with
// f_i(x) = x^T A x / 2 - b_i^T x. Every node shares the curvature A (random
// SPD, spectrum inside [mu, l_smooth]); heterogeneity enters through the
// linear terms b_i = A (x_star + zeta_scale * h_i) with zero-sum shifts h_i,
// so x_star is the exact global minimizer. A shared A keeps the node average
// on the centralized gradient-descent trajectory in the noise-free case.
struct QuadraticProblem {
    int n = 0;
    int d = 0;
    double zeta_scale = 0.0;
    double sigma = 0.0;
    double mu = 1.0;
    double l_smooth = 1.0;
    std::uint64_t seed = 0;
    std::vector<double> curvature;     // d x d row-major, shared by all nodes
    std::vector<double> linear_terms;  // node i owns [i*d, (i+1)*d)
    std::vector<double> x_star;
    std::vector<double> linear_mean;
    double zeta_hat = 0.0;  // max_i |grad f_i(x_star)|, realized heterogeneity
    double f_star = 0.0;

    std::span<const double> linear_term(int node) const {
        return std::span<const double>(linear_terms)
            .subspan(static_cast<std::size_t>(node) * static_cast<std::size_t>(d),
                     static_cast<std::size_t>(d));
    }
    // out = A x - b_node
    void gradient(int node, std::span<const double> x, std::span<double> out) const;
    // out = A x - mean(b)
    void mean_gradient(std::span<const double> x, std::span<double> out) const;
    double mean_value(std::span<const double> x) const;
};

// Throws BadSpectrum unless 0 < mu <= l_smooth, BadNoise for negative
// zeta_scale or sigma.
QuadraticProblem make_problem(int n, int d, double zeta_scale, double sigma, double mu,
                              double l_smooth, std::uint64_t seed);

struct DSGDConfig {
    double eta = 0.1;
    int rounds = 1;
    double momentum = 0.0;  // 0 = plain DSGD, otherwise local heavy ball
    std::uint64_t seed = 0;
};

// Metrics evaluated at the exact node average after every round; index 0 is
// the shared initial point, so each series has rounds + 1 entries. The two
// heterogeneity reports answer Assumption 4 at the optimum and along the
// trajectory; with shared curvature both equal max_i |b_i - mean(b)|.
struct TrainingTrace {
    int rounds = 0;
    std::uint64_t seed = 0;
    std::vector<double> grad_norm_sq;
    std::vector<double> consensus_err;
    std::vector<double> suboptimality;
    std::vector<double> mean_drift;  // |mean step - centralized step|, per round
    double zeta_at_optimum = 0.0;
    double zeta_along_trajectory = 0.0;
};

// Gradient-noise draw used at (node, round): d i.i.d. N(0, sigma^2) entries.
// Indexed by position, not draw order, so every topology sees the same noise.
void gradient_noise(std::uint64_t run_seed, int node, int round, double sigma,
                    std::span<double> out);

// One DSGD run: each round every node takes a local stochastic gradient step
// (heavy-ball adjusted when momentum > 0) and the round's mixing matrix
// (cycling with the sequence period) averages the results. All nodes start
// at zero. Throws DimensionMismatch when problem.n != seq.n, EmptySequence
// when the sequence is empty with more than one node.
TrainingTrace dsgd_run(const QuadraticProblem& problem, const GraphSequence& seq,
                       const DSGDConfig& cfg);

// One sweep cell = one family run with one seed under common random numbers.
struct SweepCell {
    std::string family;  // requested spec; builder tag once built
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error_code;
    std::string error_message;
    int length = 0;
    int max_deg = 0;
    double final_grad_norm_sq = 0.0;
    double mean_consensus_error = 0.0;  // mean over post-step rounds 1..R
    long long comm_cost = 0;  // messages: 2 per undirected edge, 1 per directed
};

// Runs dsgd per family and seed; empty seeds defaults to {cfg.seed}. Cells
// evaluate in parallel and errors stay per row.
std::vector<SweepCell> topology_sweep(const QuadraticProblem& problem,
                                      const std::vector<std::string>& families,
                                      const DSGDConfig& cfg,
                                      const std::vector<std::uint64_t>& seeds = {});

// CSV with header round,grad_norm_sq,consensus_error,suboptimality.
std::string trace_csv(const TrainingTrace& trace);

// CSV with header
// family,seed,length,max_degree,final_grad_norm_sq,mean_consensus_error,comm_cost.
std::string sweep_csv(const std::vector<SweepCell>& cells);

// Problem round-trip; doubles survive bit-exactly. Derived fields
// (linear_mean, zeta_hat, f_star) are recomputed on load.
std::string problem_to_json(const QuadraticProblem& problem);
QuadraticProblem problem_from_json(const std::string& text);
void save_problem(const std::string& path, const QuadraticProblem& problem);
QuadraticProblem load_problem(const std::string& path);

}  // namespace finitemix
