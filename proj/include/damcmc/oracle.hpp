#pragma once

#include <vector>

#include "damcmc/linalg.hpp"

namespace damcmc {

// Finite-state setting for brute-force transition-kernel enumeration: an
// unnormalized target and surrogate mass per state, nearest-neighbour +-1
// proposal with probability 1/2 each side.  Off either end the proposal has
// no support and the move is rejected outright (no folding back).
struct DiscreteDaSpec {
    std::vector<double> target;
    std::vector<double> surrogate;
};

// Exact two-stage transition matrix: K(x,y) = q(x,y) alpha(x,y) beta(x,y)
// for y != x, the diagonal absorbing all rejected mass so each row sums to
// one.  alpha is the stage-one (surrogate) acceptance, beta the stage-two
// correction  min{1, [pi(y) alpha(y,x)] / [pi(x) alpha(x,y)]}  written so no
// surrogate normalizing constant is ever needed.  States with zero surrogate
// mass get alpha = 0 into them and alpha = 1 out of them.
Matrix enumerate_da_kernel(const DiscreteDaSpec& spec);

// Single-stage MH on the target alone: K = q alpha.  With the stage-two
// correction removed but alpha still computed from the surrogate this serves
// as the negative control: the surrogate-only chain must fail stationarity
// with respect to the target.
Matrix enumerate_mh_kernel(const std::vector<double>& target);
Matrix enumerate_stage1_only_kernel(const DiscreteDaSpec& spec);

// max_x | (pi^T K)(x) - pi(x) |, pi normalized to a distribution.
double stationarity_residual(const Matrix& kernel,
                             const std::vector<double>& target);

// max_{x,y} | pi(x) K(x,y) - pi(y) K(y,x) |, pi normalized.
double detailed_balance_residual(const Matrix& kernel,
                                 const std::vector<double>& target);

}  // namespace damcmc
