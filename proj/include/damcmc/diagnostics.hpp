#pragma once

#include <cstdint>
#include <vector>

#include "damcmc/chain.hpp"

namespace damcmc {

// Autocorrelation rho(0..max_lag) of a scalar series, from the biased
// (1/n-normalized) autocovariance, rho(0) = 1 by construction.  max_lag <= 0
// selects n/4; the lag is clipped to n-1.  A numerically constant series is
// an error: its autocorrelation is undefined, not zero.  Switches to an
// FFT-based evaluation when the direct n*max_lag sum gets large; both paths
// compute the same sums.
std::vector<double> autocorrelation(const std::vector<double>& series,
                                    int max_lag = 0);

struct IactResult {
    double tau = 1.0;   // integrated autocorrelation time
    double ess = 0.0;   // n / tau
    int window = 0;     // cutoff M the self-consistent window settled on
    // False when no M <= max_lag satisfied M >= c*tau(M); the estimate is
    // then a lower bound and should not be trusted.
    bool window_closed = true;
};

// tau = 1 + 2 sum_{i=1..M} rho(i) with the smallest window M >= c * tau(M).
IactResult iact(const std::vector<double>& series, int max_lag = 0,
                double c = 5.0);

// Wall-clock-aware efficiency gain of a two-stage chain over a single-stage
// reference:  (tau_ref / tau_da) / (stage1_rate + cost_ratio), where
// cost_ratio is coarse cost over fine cost and stage1_rate the mean
// stage-one acceptance (the fraction of iterations that pay for a fine
// solve).
double speedup_factor(double tau_ref, double tau_da, double stage1_rate,
                      double cost_ratio);

struct AcceptanceSummary {
    std::uint64_t n = 0;         // rows past burn-in
    std::uint64_t acc1 = 0;      // stage-one accepts
    std::uint64_t promoted = 0;  // rows that reached stage two
    std::uint64_t acc2 = 0;      // stage-two accepts
    double rate1 = 0.0;          // acc1 / n
    double beta_bar = 0.0;       // acc2 / promoted, conditional on promotion
};

AcceptanceSummary acceptance_summary(const std::vector<ChainRecord>& records,
                                     std::uint64_t burnin);

// Post-burn-in series of one coordinate of the trace.
std::vector<double> component_series(const std::vector<ChainRecord>& records,
                                     int component, std::uint64_t burnin);

struct ComponentStats {
    double mean = 0.0;
    double sd = 0.0;   // sample standard deviation (n-1)
    double tau = 1.0;
    double ess = 0.0;
    double se = 0.0;   // correlation-corrected standard error: sd*sqrt(tau/n)
    bool window_closed = true;
};

ComponentStats component_stats(const std::vector<double>& series);

}  // namespace damcmc
