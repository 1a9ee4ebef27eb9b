#pragma once

#include <cstdint>
#include <vector>

#include "damcmc/linalg.hpp"

namespace damcmc {

// Current chain position with every cached quantity the kernels need.  The
// caches are rebuilt atomically when a move is accepted; a stage-one
// rejection leaves all of them untouched.
struct ChainState {
    Vector x;
    double log_prior = 0.0;
    double log_post = 0.0;  // exact (fine-model) log posterior
    Vector fine_out;        // F(x)
    Vector coarse_out;      // F*(x); empty when the kernel never needs it

    Vector model_error() const { return fine_out - coarse_out; }
};

// One row of the chain trace.
struct ChainRecord {
    std::uint64_t iter = 0;  // 1-based, burn-in included
    Vector x;
    double log_post = 0.0;
    int acc1 = 0;  // stage-one accept (plain MH: the accept)
    int acc2 = -1; // stage-two accept; -1 when the kernel has no stage two
    // Cumulative model evaluations for this chain, including the initial
    // state evaluation (monotone over the run).
    std::uint64_t n_fine = 0;
    std::uint64_t n_coarse = 0;
    std::vector<double> sigma;  // per-group proposal scales
};

}  // namespace damcmc
