#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "damcmc/kernel.hpp"
#include "damcmc/models.hpp"

namespace damcmc {

// Run configuration, parsed from flat `key = value` text ('#' comments).
// Every field has a default; validate() enforces the cross-field rules.  The
// canonical text regenerates the complete effective configuration in a fixed
// order, and its FNV-1a hash stamps outputs and checkpoints so a resume can
// refuse a mismatched config.
struct RunConfig {
    // run
    std::string problem = "analytic";  // analytic | fv | discrete-toy
    KernelKind kernel = KernelKind::Ada;
    Scheme scheme = Scheme::Approx5;
    int chains = 1;
    std::uint64_t length = 10000;
    std::uint64_t burnin = 1000;
    std::uint64_t seed = 1;
    int retry_budget = 3;
    std::uint64_t checkpoint_every = 0;
    std::uint64_t warmstart_iters = 0;
    double warmstart_scale = 0.0;  // 0 = use proposal.rw_scale
    InnerTarget inner_target = InnerTarget::Approx;
    AemInput approx3_input = AemInput::Error;
    AemInput approx5_input = AemInput::Increment;
    int aem_prior_samples = 100;

    // proposal ("auto" resolves to rw for mh/da, am for ada)
    std::string proposal = "auto";
    double rw_scale = 0.1;
    double beta_mix = 0.05;
    std::vector<int> gcam_groups;  // contiguous group sizes; empty = single
    int gcam_batch = 50;
    double gcam_target_rate = 0.234;

    // analytic problem
    double an_epsilon = 0.1;
    std::vector<double> an_x_true = {1.0, 0.8};
    double an_noise_sd = 0.05;
    std::string an_prior = "gaussian";  // gaussian | box
    double an_prior_sd = 1.0;
    double an_box = 10.0;

    // fv problem
    int fv_zones = 8;
    int fv_fine_cells = 256;
    int fv_fine_steps = 100;
    int fv_coarse_cells = 16;
    int fv_coarse_steps = 20;
    int fv_obs_count = 10;
    double fv_noise_sd = 0.0;    // absolute sd; 0 = derive from noise_frac
    double fv_noise_frac = 0.01; // fraction of max |noise-free| reading
    std::vector<double> fv_x_true;  // log10 per zone; empty = built-in profile
    double fv_prior_sd = 0.75;

    // discrete toy
    int toy_start = 3;

    // Resolved proposal kind ("rw", "am", "gcam"); set by validate().
    std::string resolved_proposal() const;

    void validate() const;
    std::string canonical_text() const;
    std::string hash() const;  // 16 hex digits, FNV-1a 64 of canonical_text
};

RunConfig parse_config_text(const std::string& text);
RunConfig load_config_file(const std::string& path);

std::uint64_t fnv1a64(const std::string& bytes);

// ---------------------------------------------------------------------------
// Problem assembly.  Each call constructs a fresh model pair, so evaluation
// counters describe exactly one consumer; data generation and the prior
// error-model build are deterministic in (seed) alone and therefore agree
// across chains without shared state.  RNG stream layout: 0 data, 1 prior
// error model, 2+k chain k.
// ---------------------------------------------------------------------------

struct ProblemSetup {
    std::shared_ptr<const Posterior> posterior;
    Vector x0;      // prior center, the default chain start
    Vector x_true;
    SyntheticData data;
};

// Continuous problems only; the discrete toy runs through run_discrete_toy.
ProblemSetup build_problem(const RunConfig& cfg);

// Sampler for chain `chain_index` (rng stream 2+chain_index), including the
// proposal state and, for the schemes that need one, the error model
// (approx2's is built from prior draws on a separate throwaway pair).
Sampler make_sampler(const RunConfig& cfg, const ProblemSetup& setup,
                     std::uint64_t chain_index);

}  // namespace damcmc
