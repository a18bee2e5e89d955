#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "finitemix/graph.hpp"
#include "finitemix/mixing.hpp"

namespace finitemix {

// Defaults shared by the library and the command line tool.
inline constexpr double kFiniteTimeTol = 1e-18;  // squared-error ratio
inline constexpr double kRateTol = 1e-10;
inline constexpr int kRateMaxIters = 20000;
inline constexpr int kProbeDim = 8;
inline constexpr std::uint64_t kProbeSeed = 20240817;

// Consensus error of an i.i.d. Gaussian start, recorded after every mixing
// step. errors[0] is the initial error, so errors.size() == iterations + 1.
struct GossipTrace {
    int iterations = 0;
    std::uint64_t seed = 0;
    std::vector<double> errors;
};

// Gossip averaging: step r applies the sequence's graph at index mod(r, m).
// Throws EmptySequence when the sequence has no graphs but iters > 0.
GossipTrace run_gossip(const GraphSequence& seq, int dim, int iters, std::uint64_t seed);

// Smallest number of mixing steps after which a fixed-seed Gaussian probe
// (kProbeDim columns) reaches consensus error <= tol * initial error, or
// nullopt if that never happens within cycles full passes of the sequence.
// The probe certifies the uniform-product property up to a measure-zero
// failure set; uniform_product_residual is the exact complement.
std::optional<int> verify_finite_time(const GraphSequence& seq, double tol = kFiniteTimeTol,
                                      int cycles = 1, std::uint64_t seed = kProbeSeed);

// Max entrywise deviation of the product of one full pass (times cycles)
// from the uniform matrix with every entry 1/n. Dense in n, intended for
// moderate sizes.
double uniform_product_residual(const GraphSequence& seq, int cycles = 1);

struct RateEstimate {
    double beta = 0.0;
    int iterations_used = 0;
    double residual = 0.0;
    bool converged = false;  // false means NoConvergence: best estimate kept
};

// Consensus rate of a single mixing matrix: the spectral norm of W on the
// subspace orthogonal to the all-ones vector. Power iteration on the mean-
// deflated Gram operator v -> P W^T W P v whose top eigenvalue is beta^2.
RateEstimate consensus_rate(const MixingMatrix& w, double tol = kRateTol,
                            int max_iters = kRateMaxIters);

// One rate-table row. Rows that fail to build keep the request fields and
// carry the error; beta is present only for single-graph sequences whose
// power iteration converged.
struct RateTableRow {
    std::string family;  // builder tag when built, the requested spec otherwise
    int n = 0;
    std::optional<int> k;
    bool ok = false;
    std::string error_code;
    std::string error_message;
    int length = 0;
    int max_deg = 0;
    bool finite_time = false;
    std::optional<double> beta;
};

// Crosses families with n_values (and with k_values for base-family specs
// that omit k). Rows are evaluated in parallel; each row derives its probe
// seed from (family, n, k) so the output is independent of scheduling.
std::vector<RateTableRow> sequence_rate_table(const std::vector<std::string>& families,
                                              const std::vector<int>& n_values,
                                              const std::vector<int>& k_values,
                                              std::uint64_t seed = kProbeSeed);

// CSV with pinned header family,n,k,length,max_degree,finite_time,beta.
// Failed rows leave the result fields empty.
std::string rate_table_csv(const std::vector<RateTableRow>& rows);

// CSV with header iter,error; one row per recorded consensus error.
std::string gossip_csv(const GossipTrace& trace);

}  // namespace finitemix
