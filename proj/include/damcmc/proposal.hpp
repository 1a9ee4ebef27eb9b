#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "damcmc/linalg.hpp"
#include "damcmc/rng.hpp"

namespace damcmc {

enum class ProposalKind { Rw, Am, Gcam };

// Disjoint cover of coordinate indices 0..d-1 by L groups.
struct GroupPartition {
    std::vector<std::vector<int>> groups;

    static GroupPartition single(int d);
    // Contiguous groups of the given sizes.
    static GroupPartition contiguous(const std::vector<int>& sizes);

    int dim() const;
    int size() const { return static_cast<int>(groups.size()); }
    void validate(int d) const;
};

// Bookkeeping shared by the random-walk, adaptive-Metropolis and
// group-componentwise adaptive proposals:
//
//   rw    fixed isotropic scale, no adaptation;
//   am    running covariance of the chain, two-branch mixture proposal
//         (n <= 2d: 0.1^2/d * I;  n > 2d: (1-beta)*2.38^2/d*Cov + beta*0.1^2/d*I);
//   gcam  per-group running covariance blocks, per-group scales sigma_j
//         (init 2.38/sqrt(d_j)) adapted every `batch` iterations toward a
//         target acceptance rate: sigma_j *= exp(+-delta),
//         delta = min(0.01, sqrt(batch/n)), increase only when the batch rate
//         strictly exceeds the target (ties decrease).
//
// The running mean/covariance is a Welford update, rebuilt from compensated
// long-double sums every 1e5 iterations to bound floating-point drift.
class ProposalAdaptState {
public:
    static ProposalAdaptState rw(int d, double scale);
    static ProposalAdaptState am(int d, double beta_mix = 0.05);
    static ProposalAdaptState gcam(GroupPartition partition,
                                   double beta_mix = 0.05, int batch = 50,
                                   double target_rate = 0.234);

    ProposalKind kind() const { return kind_; }
    int dim() const { return d_; }
    const GroupPartition& partition() const { return part_; }
    std::uint64_t observed() const { return n_; }
    const std::vector<double>& sigma() const { return sigma_; }
    double beta_mix() const { return beta_mix_; }
    int batch() const { return batch_; }
    double target_rate() const { return target_rate_; }

    Vector running_mean() const { return mean_; }
    // Sample covariance of the observed states (denominator n-1; zero for
    // n < 2).
    Matrix running_cov() const;

    // Stream one realized chain state into the running statistics.  Returns
    // ||Cov_{n+1} - Cov_n||_F for diminishing-adaptation instrumentation.
    double observe(const Vector& x);

    // Scale adaptation at batch boundaries (gcam only; no-op otherwise).
    // Returns true when an adaptation step was applied.
    bool maybe_adapt_scales();

    // Per-group batch acceptance bookkeeping, fed by gcam_sweep.
    void record_group_result(int group, bool accepted);

    // Snapshot/restore of the batch counters alone, so a retried iteration
    // (forward-model failure mid-sweep) does not leave partial counts behind.
    using BatchCounters =
        std::pair<std::vector<std::uint64_t>, std::vector<std::uint64_t>>;
    BatchCounters batch_counters() const {
        return {batch_accepts_, batch_attempts_};
    }
    void restore_batch_counters(const BatchCounters& c) {
        batch_accepts_ = c.first;
        batch_attempts_ = c.second;
    }

    // Proposal covariance of the AM mixture at the current iteration count.
    Matrix am_cov() const;
    // Proposal covariance for one gcam group at the current iteration count.
    // Throws FactorizationError when the group's running covariance block has
    // a zero max diagonal past the warmup window (the max-diagonal
    // normalization is undefined on an all-identical history).
    Matrix gcam_block_cov(int group) const;

    void save(std::ostream& os) const;
    static ProposalAdaptState load(std::istream& is);

    bool state_equals(const ProposalAdaptState& o) const;

private:
    ProposalAdaptState() = default;
    void rebuild_from_sums();

    ProposalKind kind_ = ProposalKind::Rw;
    int d_ = 0;
    GroupPartition part_;
    double rw_scale_ = 0.1;
    double beta_mix_ = 0.05;
    int batch_ = 50;
    double target_rate_ = 0.234;

    std::uint64_t n_ = 0;
    Vector mean_;  // Welford running mean
    Matrix m2_;    // Welford sum of outer products of residuals
    std::vector<long double> s1_;  // extended-precision plain sums for the rebuild
    std::vector<long double> s2_;

    std::vector<double> sigma_;
    std::vector<std::uint64_t> batch_accepts_, batch_attempts_;
};

// y = x + scale * z with z ~ N(0, I).
Vector propose_rw(const Vector& x, double scale, Rng& rng);

// One AM draw according to the two-branch rule above.
Vector am_propose(const ProposalAdaptState& st, const Vector& x, Rng& rng);

// Target evaluation for gcam block accepts: log density plus whatever model
// output the evaluator produced (so the caller can reuse it after the sweep;
// may be empty when the target needs no model run, e.g. out of support).
struct TargetEval {
    double log_density = 0.0;
    Vector model_out;
};

using TargetFn = std::function<TargetEval(const Vector&)>;

struct GcamSweepResult {
    Vector y;                 // composite state after the sweep
    TargetEval eval_y;        // target evaluation at y
    std::vector<char> group_accepted;
    int moves = 0;            // number of accepted blocks
};

// One full gcam sweep: for each group draw a block proposal, accept or reject
// it against `target`, and carry the composite state forward.  Per-group
// batch counters in `st` are updated; scale adaptation itself is left to
// maybe_adapt_scales().  eval_x is the target evaluation at the sweep start.
GcamSweepResult gcam_sweep(ProposalAdaptState& st, const Vector& x,
                           const TargetEval& eval_x, const TargetFn& target,
                           Rng& rng);

}  // namespace damcmc
