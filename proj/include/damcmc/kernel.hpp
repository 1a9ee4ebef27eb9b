#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>

#include "damcmc/aem.hpp"
#include "damcmc/chain.hpp"
#include "damcmc/proposal.hpp"
#include "damcmc/target.hpp"

namespace damcmc {

enum class KernelKind { Mh, Da, Ada };

std::string kernel_name(KernelKind k);
KernelKind kernel_from_name(const std::string& name);

// What gets streamed into the error-model recursions each ADA iteration.
enum class AemInput { Error, Increment };

// Target of the inner block accepts when gcam drives the first DA stage:
// the reduced density (default) or the exact posterior (diagnostic mode; the
// second stage then degenerates to beta = 1 and the fine-evaluation
// accounting invariant no longer applies).
enum class InnerTarget { Approx, Exact };

struct KernelOptions {
    KernelKind kernel = KernelKind::Mh;
    Scheme scheme = Scheme::Exact;
    AemInput approx3_input = AemInput::Error;      // plain B(x_n) by default
    AemInput approx5_input = AemInput::Increment;  // B(x_n)-B(x_{n-1}) by default
    InnerTarget inner_target = InnerTarget::Approx;
    int retry_budget = 3;  // forward-failure retries per iteration
};

struct StepFlags {
    bool acc1 = false;      // stage-one accept (mh: the accept)
    bool promoted = false;  // reached stage two
    bool acc2 = false;      // stage-two accept
    bool moved = false;     // chain changed state
    bool has_stage2 = false;
    int retries = 0;
};

// One MCMC chain: holds the current state, proposal adaptation, optional
// error model and the RNG.  step() runs one full iteration of the configured
// kernel, including the forward-failure retry budget.
//
// Evaluation counting contract: construct one ForwardModelPair per sampler,
// so the pair's counters describe exactly this chain (plus its init and any
// warm start).  For DA/ADA the number of fine evaluations equals the number
// of stage-one acceptances plus one (the initial state), exactly.
class Sampler {
public:
    Sampler(std::shared_ptr<const Posterior> post, KernelOptions opt,
            ProposalAdaptState prop, std::optional<AemState> aem, Rng rng);

    // Evaluates the models at x0 and installs the initial state (one fine
    // evaluation; plus one coarse for da/ada).  x0 must be in support.
    void init(const Vector& x0);
    bool initialized() const { return init_; }

    StepFlags step();

    const Posterior& posterior() const { return *post_; }
    const KernelOptions& options() const { return opt_; }
    const ChainState& state() const { return cur_; }
    std::uint64_t iteration() const { return iter_; }
    const ProposalAdaptState& proposal() const { return prop_; }
    const AemState* aem() const { return aem_ ? &*aem_ : nullptr; }
    Rng& rng() { return rng_; }

    // Diminishing-adaptation instrumentation: iteration * ||change||_F of
    // the error-model covariance / proposal running covariance produced by
    // the most recent step.
    double aem_drift_scaled() const { return aem_drift_scaled_; }
    double prop_drift_scaled() const { return prop_drift_scaled_; }

    // Dynamic state (position, caches, adaptation, rng, iteration count);
    // everything a resume needs beyond the configuration.
    void save_state(std::ostream& os) const;
    void load_state(std::istream& is);

private:
    StepFlags step_once();
    StepFlags mh_step();
    StepFlags da_step();
    void adapt_after_step();

    double stage1_log_density(const Vector& coarse_out, double log_prior,
                              const AnchorCache* anchor) const;
    bool accept_log(double log_alpha);

    std::shared_ptr<const Posterior> post_;
    KernelOptions opt_;
    ProposalAdaptState prop_;
    std::optional<AemState> aem_;
    Rng rng_;
    ChainState cur_;
    bool init_ = false;
    std::uint64_t iter_ = 0;
    Vector prev_b_;  // model error at the previous iteration's state
    double aem_drift_scaled_ = 0.0;
    double prop_drift_scaled_ = 0.0;
};

// Plain MH on the coarse-model posterior (approx1 density), used as an
// optional cheap warm start before the main run.  Advances `rng` in place
// and returns the final position; costs only coarse evaluations.
Vector coarse_warmstart(const Posterior& post, const Vector& x0,
                        std::uint64_t iters, double rw_scale, Rng& rng);

struct RunOptions {
    std::uint64_t length = 1000;  // total iterations, burn-in included
    std::uint64_t burnin = 0;
    std::uint64_t checkpoint_every = 0;     // 0 = only on abort
    std::string checkpoint_path;            // empty = no checkpoints at all
    std::string config_hash;                // stamped into checkpoints
};

struct RunSummary {
    std::uint64_t length = 0, burnin = 0;
    std::uint64_t acc1 = 0, promoted = 0, acc2 = 0, moved = 0;
    std::uint64_t retries = 0;
    bool has_stage2 = false;
    EvalCounts evals;  // cumulative, including init and any resume base
    double aem_drift_max_first = 0.0, aem_drift_max_second = 0.0;
    double prop_drift_max_first = 0.0, prop_drift_max_second = 0.0;
    bool unbounded_space = false;

    void save(std::ostream& os) const;
    static RunSummary load(std::istream& is);
};

// Checkpoint = config hash + summary-so-far + full sampler dynamic state.
// Written atomically (temp file + rename).
void write_checkpoint(const std::string& path, const Sampler& sampler,
                      const RunSummary& partial,
                      const std::string& config_hash);

struct CheckpointInfo {
    std::string config_hash;
    RunSummary partial;
};

// Restores the sampler's dynamic state in place; the caller checks the
// returned hash against its own configuration before trusting the resume.
CheckpointInfo read_checkpoint(const std::string& path, Sampler& sampler);

using RecordSink = std::function<void(const ChainRecord&)>;

// Drives `sampler` from its current iteration up to opt.length, streaming a
// ChainRecord per iteration.  `base` carries the summary accumulated before
// a resume (default-constructed for a fresh run).  On an exhausted retry
// budget the driver writes a checkpoint (when a path is configured) and
// throws RunAbort.
RunSummary run_chain(Sampler& sampler, const RunOptions& opt,
                     const RecordSink& sink, const RunSummary& base = {});

// --------------------------------------------------------------- toy chain
// The 7-state discrete toy: nearest-neighbour proposal, MH on the target or
// DA with the surrogate first stage.  Table lookups are counted like model
// evaluations (stage-two target lookups as fine, stage-one as coarse) so the
// cost-accounting invariant is observable here too.
struct DiscreteRunOptions {
    KernelKind kernel = KernelKind::Da;  // Mh or Da
    std::uint64_t length = 10000;
    std::uint64_t burnin = 0;
    int start_state = 3;
};

RunSummary run_discrete_toy(const DiscreteRunOptions& opt, Rng rng,
                            const RecordSink& sink,
                            std::vector<std::uint64_t>* visits = nullptr);

}  // namespace damcmc
