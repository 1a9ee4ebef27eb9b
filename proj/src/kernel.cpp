#include "damcmc/kernel.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <utility>

#include "damcmc/errors.hpp"
#include "damcmc/models.hpp"

namespace damcmc {

std::string kernel_name(KernelKind k) {
    switch (k) {
        case KernelKind::Mh: return "mh";
        case KernelKind::Da: return "da";
        case KernelKind::Ada: return "ada";
    }
    throw Error("kernel_name: bad enum");
}

KernelKind kernel_from_name(const std::string& name) {
    if (name == "mh") return KernelKind::Mh;
    if (name == "da") return KernelKind::Da;
    if (name == "ada") return KernelKind::Ada;
    throw ConfigError("unknown kernel '" + name + "' (mh, da, ada)");
}

// ------------------------------------------------------------------ sampler

Sampler::Sampler(std::shared_ptr<const Posterior> post, KernelOptions opt,
                 ProposalAdaptState prop, std::optional<AemState> aem, Rng rng)
    : post_(std::move(post)),
      opt_(opt),
      prop_(std::move(prop)),
      aem_(std::move(aem)),
      rng_(rng) {
    if (!post_) throw Error("sampler: null posterior");
    if (prop_.dim() != post_->dim())
        throw DimensionError("sampler: proposal dimension " +
                             std::to_string(prop_.dim()) +
                             " != parameter dimension " +
                             std::to_string(post_->dim()));
    if (opt_.retry_budget < 0) throw ConfigError("sampler: negative retry budget");

    const bool two_stage = opt_.kernel != KernelKind::Mh;
    if ((opt_.scheme == Scheme::Exact) == two_stage)
        throw ConfigError("scheme 'exact' goes with kernel 'mh' and the "
                          "reduced schemes with 'da'/'ada'");
    if (scheme_adaptive(opt_.scheme) && opt_.kernel != KernelKind::Ada)
        throw ConfigError("scheme '" + scheme_name(opt_.scheme) +
                          "' adapts along the chain and requires kernel 'ada'");
    if (opt_.kernel == KernelKind::Da && prop_.kind() != ProposalKind::Rw)
        throw ConfigError("kernel 'da' is non-adaptive; use a fixed rw "
                          "proposal (or kernel 'ada')");

    if (scheme_uses_aem(opt_.scheme)) {
        if (!aem_)
            throw ConfigError("scheme '" + scheme_name(opt_.scheme) +
                              "' needs an error model state");
        if (aem_->dim() != post_->noise().dim())
            throw DimensionError("error model dimension != observation dimension");
        const MeanMode want = opt_.scheme == Scheme::Approx5 ? MeanMode::PinnedZero
                                                             : MeanMode::Free;
        if (aem_->mode() != want)
            throw ConfigError("error-model mean mode does not match scheme '" +
                              scheme_name(opt_.scheme) + "'");
    } else if (aem_) {
        throw ConfigError("scheme '" + scheme_name(opt_.scheme) +
                          "' takes no error model");
    }
}

void Sampler::init(const Vector& x0) {
    if (x0.size() != post_->dim())
        throw DimensionError("init: state dimension mismatch");
    const double lp = post_->log_prior(x0);
    if (lp == kNegInf)
        throw ConfigError("init: initial state outside the prior support");
    ChainState st;
    st.x = x0;
    st.log_prior = lp;
    st.fine_out = post_->pair().eval_fine(x0);
    st.log_post = lp + post_->log_likelihood_of_output(st.fine_out);
    if (opt_.kernel != KernelKind::Mh)
        st.coarse_out = post_->pair().eval_coarse(x0);
    cur_ = std::move(st);
    if (opt_.kernel != KernelKind::Mh)
        prev_b_ = cur_.model_error();
    init_ = true;
}

bool Sampler::accept_log(double log_alpha) {
    // log_alpha >= 0 accepts without drawing, so a unit ratio can never be
    // lost to rounding of the comparison uniform.
    if (log_alpha >= 0.0) return true;
    const double u = rng_.uniform();
    return std::log1p(-u) < log_alpha;
}

double Sampler::stage1_log_density(const Vector& coarse_out, double log_prior,
                                   const AnchorCache* anchor) const {
    return approx_log_density(opt_.scheme, *post_, aem_ ? &*aem_ : nullptr,
                              coarse_out, log_prior, anchor);
}

StepFlags Sampler::step() {
    if (!init_) throw Error("sampler: step() before init()");
    const auto counters = prop_.batch_counters();
    int tries = 0;
    for (;;) {
        try {
            StepFlags f = step_once();
            f.retries = tries;
            return f;
        } catch (const ForwardModelError& e) {
            prop_.restore_batch_counters(counters);
            if (++tries > opt_.retry_budget)
                throw ForwardModelError(
                    std::string(e.what()) + " (retry budget " +
                    std::to_string(opt_.retry_budget) + " exhausted)");
            // The rng deliberately keeps advancing, so the retry explores a
            // different proposal instead of hitting the same failure.
        }
    }
}

StepFlags Sampler::step_once() {
    StepFlags f =
        opt_.kernel == KernelKind::Mh ? mh_step() : da_step();
    f.has_stage2 = opt_.kernel != KernelKind::Mh;
    // Nothing below throws ForwardModelError: adaptation only touches
    // already-computed quantities, so a retried iteration never observes a
    // half-updated sampler.
    ++iter_;
    adapt_after_step();
    return f;
}

StepFlags Sampler::mh_step() {
    StepFlags f;
    if (prop_.kind() == ProposalKind::Gcam) {
        TargetFn exact = [&](const Vector& u) -> TargetEval {
            const double lp = post_->log_prior(u);
            if (lp == kNegInf) return {kNegInf, {}};
            Vector fu = post_->pair().eval_fine(u);
            return {lp + post_->log_likelihood_of_output(fu), std::move(fu)};
        };
        const TargetEval at_x{cur_.log_post, cur_.fine_out};
        GcamSweepResult sw = gcam_sweep(prop_, cur_.x, at_x, exact, rng_);
        if (sw.moves > 0) {
            cur_.x = std::move(sw.y);
            cur_.log_prior = post_->log_prior(cur_.x);
            cur_.log_post = sw.eval_y.log_density;
            cur_.fine_out = std::move(sw.eval_y.model_out);
            f.acc1 = f.moved = true;
        }
        return f;
    }

    Vector y = prop_.kind() == ProposalKind::Am
                   ? am_propose(prop_, cur_.x, rng_)
                   : propose_rw(cur_.x, prop_.sigma()[0], rng_);
    const double lp = post_->log_prior(y);
    if (lp == kNegInf) return f;  // rejected without touching the model
    Vector fy = post_->pair().eval_fine(y);
    const double lpost = lp + post_->log_likelihood_of_output(fy);
    if (accept_log(lpost - cur_.log_post)) {
        cur_.x = std::move(y);
        cur_.log_prior = lp;
        cur_.log_post = lpost;
        cur_.fine_out = std::move(fy);
        f.acc1 = f.moved = true;
    }
    return f;
}

StepFlags Sampler::da_step() {
    StepFlags f;
    const AnchorCache at_x{&cur_.fine_out, &cur_.coarse_out};
    const bool inner_exact = prop_.kind() == ProposalKind::Gcam &&
                             opt_.inner_target == InnerTarget::Exact;

    // ---- stage one: produce a candidate y with its reduced density, or
    // exit with everything untouched.
    Vector y, coarse_y, fine_y;
    double lp_y, l1x, l1y;
    bool have_fine_y = false;

    if (prop_.kind() == ProposalKind::Gcam) {
        // The componentwise sweep with block accepts against the reduced
        // density is the first stage; the composite state is the candidate.
        TargetFn inner;
        TargetEval at_start;
        if (inner_exact) {
            inner = [&](const Vector& u) -> TargetEval {
                const double lp = post_->log_prior(u);
                if (lp == kNegInf) return {kNegInf, {}};
                Vector fu = post_->pair().eval_fine(u);
                return {lp + post_->log_likelihood_of_output(fu), std::move(fu)};
            };
            at_start = {cur_.log_post, cur_.fine_out};
        } else {
            inner = [&](const Vector& u) -> TargetEval {
                const double lp = post_->log_prior(u);
                if (lp == kNegInf) return {kNegInf, {}};
                Vector cu = post_->pair().eval_coarse(u);
                const double ld = stage1_log_density(cu, lp, &at_x);
                return {ld, std::move(cu)};
            };
            at_start = {stage1_log_density(cur_.coarse_out, cur_.log_prior, &at_x),
                        cur_.coarse_out};
        }
        GcamSweepResult sw = gcam_sweep(prop_, cur_.x, at_start, inner, rng_);
        if (sw.moves == 0) return f;  // all blocks rejected: stage-one exit
        y = std::move(sw.y);
        lp_y = post_->log_prior(y);
        l1x = at_start.log_density;
        l1y = sw.eval_y.log_density;
        if (inner_exact) {
            fine_y = std::move(sw.eval_y.model_out);
            have_fine_y = true;
            coarse_y = post_->pair().eval_coarse(y);
        } else {
            coarse_y = std::move(sw.eval_y.model_out);
        }
    } else {
        y = propose_rw(cur_.x, prop_.sigma()[0], rng_);
        lp_y = post_->log_prior(y);
        if (lp_y == kNegInf) return f;  // out of support: no evaluation at all
        coarse_y = post_->pair().eval_coarse(y);
        l1x = stage1_log_density(cur_.coarse_out, cur_.log_prior, &at_x);
        l1y = stage1_log_density(coarse_y, lp_y, &at_x);
        if (!accept_log(l1y - l1x)) return f;
    }

    // ---- stage two: the single fine evaluation of the iteration.
    f.acc1 = f.promoted = true;
    if (!have_fine_y) fine_y = post_->pair().eval_fine(y);
    const double lpost_y = lp_y + post_->log_likelihood_of_output(fine_y);

    // beta = min(1, pi(y) a(y,x) / (pi(x) a(x,y))) with a the stage-one
    // acceptance probability; the reverse direction re-anchors the reduced
    // density at y so state-dependent schemes stay exact.
    const double la_fwd = std::min(0.0, l1y - l1x);
    double la_rev;
    if (inner_exact) {
        la_rev = std::min(0.0, cur_.log_post - lpost_y);
    } else {
        const AnchorCache at_y{&fine_y, &coarse_y};
        const double l1x_rev =
            stage1_log_density(cur_.coarse_out, cur_.log_prior, &at_y);
        const double l1y_rev = stage1_log_density(coarse_y, lp_y, &at_y);
        la_rev = std::min(0.0, l1x_rev - l1y_rev);
    }
    const double lbeta = (lpost_y + la_rev) - (cur_.log_post + la_fwd);
    if (accept_log(lbeta)) {
        cur_.x = std::move(y);
        cur_.log_prior = lp_y;
        cur_.log_post = lpost_y;
        cur_.fine_out = std::move(fine_y);
        cur_.coarse_out = std::move(coarse_y);
        f.acc2 = f.moved = true;
    }
    return f;
}

void Sampler::adapt_after_step() {
    aem_drift_scaled_ = 0.0;
    prop_drift_scaled_ = 0.0;
    const double it = static_cast<double>(iter_);

    if (opt_.kernel == KernelKind::Ada && scheme_adaptive(opt_.scheme)) {
        // One error-model update per iteration, from the current state's
        // cached outputs; costs no model evaluation.
        Vector b_now = cur_.model_error();
        const AemInput input = opt_.scheme == Scheme::Approx3
                                   ? opt_.approx3_input
                                   : opt_.approx5_input;
        Vector fed = input == AemInput::Error ? b_now : Vector(b_now - prev_b_);
        const AemState::Drift dr = aem_->update(fed);
        aem_drift_scaled_ = it * dr.cov_delta;
        prev_b_ = std::move(b_now);
    }

    // Fixed-kernel runs (da, mh+rw) must not adapt anything.
    const bool adapting_proposal =
        prop_.kind() != ProposalKind::Rw &&
        (opt_.kernel == KernelKind::Ada || opt_.kernel == KernelKind::Mh);
    if (adapting_proposal) {
        const double pd = prop_.observe(cur_.x);
        prop_drift_scaled_ = it * pd;
        prop_.maybe_adapt_scales();
    }
}

// ------------------------------------------------------- state persistence

namespace {

void put_d(std::ostream& os, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    os << buf;
}

void put_vec(std::ostream& os, const Vector& v) {
    os << v.size();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        os << ' ';
        put_d(os, v[i]);
    }
    os << '\n';
}

Vector get_vec(std::istream& is) {
    Eigen::Index n;
    if (!(is >> n) || n < 0) throw Error("state: bad vector length");
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i)
        if (!(is >> v[i])) throw Error("state: truncated vector");
    return v;
}

}  // namespace

void Sampler::save_state(std::ostream& os) const {
    os << "sampler-state v1\n";
    os << "iter " << iter_ << ' ' << (init_ ? 1 : 0) << '\n';
    rng_.save(os);
    put_vec(os, cur_.x);
    put_d(os, cur_.log_prior);
    os << ' ';
    put_d(os, cur_.log_post);
    os << '\n';
    put_vec(os, cur_.fine_out);
    put_vec(os, cur_.coarse_out);
    put_vec(os, prev_b_);
    prop_.save(os);
    os << (aem_ ? 1 : 0) << '\n';
    if (aem_) aem_->save(os);
}

void Sampler::load_state(std::istream& is) {
    std::string tag, ver;
    is >> tag >> ver;
    if (tag != "sampler-state" || ver != "v1")
        throw Error("sampler state: bad header");
    is >> tag;
    if (tag != "iter") throw Error("sampler state: expected iter");
    int initialized = 0;
    is >> iter_ >> initialized;
    rng_ = Rng::load(is);
    ChainState st;
    st.x = get_vec(is);
    is >> st.log_prior >> st.log_post;
    st.fine_out = get_vec(is);
    st.coarse_out = get_vec(is);
    Vector prev_b = get_vec(is);
    ProposalAdaptState prop = ProposalAdaptState::load(is);
    int has_aem = 0;
    is >> has_aem;
    if (!is) throw Error("sampler state: truncated");
    std::optional<AemState> aem;
    if (has_aem) aem = AemState::load(is);

    if (st.x.size() != post_->dim())
        throw DimensionError("sampler state: dimension mismatch with posterior");
    if (prop.dim() != post_->dim() || prop.kind() != prop_.kind())
        throw ConfigError("sampler state: proposal does not match configuration");
    if (static_cast<bool>(aem) != static_cast<bool>(aem_))
        throw ConfigError("sampler state: error-model presence mismatch");

    cur_ = std::move(st);
    prev_b_ = std::move(prev_b);
    prop_ = std::move(prop);
    aem_ = std::move(aem);
    init_ = initialized != 0;
    aem_drift_scaled_ = prop_drift_scaled_ = 0.0;
}

// --------------------------------------------------------------- warm start

Vector coarse_warmstart(const Posterior& post, const Vector& x0,
                        std::uint64_t iters, double rw_scale, Rng& rng) {
    double lp = post.log_prior(x0);
    if (lp == kNegInf)
        throw ConfigError("warm start: initial state outside the prior support");
    Vector x = x0;
    Vector cx = post.pair().eval_coarse(x);
    double ld = lp + post.noise().log_likelihood(cx, post.data());
    for (std::uint64_t i = 0; i < iters; ++i) {
        Vector y = propose_rw(x, rw_scale, rng);
        const double lpy = post.log_prior(y);
        if (lpy == kNegInf) continue;
        Vector cy = post.pair().eval_coarse(y);
        const double ldy = lpy + post.noise().log_likelihood(cy, post.data());
        const double la = ldy - ld;
        bool take = la >= 0.0;
        if (!take) take = std::log1p(-rng.uniform()) < la;
        if (take) {
            x = std::move(y);
            ld = ldy;
        }
    }
    return x;
}

// -------------------------------------------------------------- run driver

void RunSummary::save(std::ostream& os) const {
    os << "summary " << length << ' ' << burnin << ' ' << acc1 << ' '
       << promoted << ' ' << acc2 << ' ' << moved << ' ' << retries << ' '
       << (has_stage2 ? 1 : 0) << ' ' << (unbounded_space ? 1 : 0) << '\n';
    os << evals.n_fine << ' ' << evals.n_coarse << ' ' << evals.fine_ns << ' '
       << evals.coarse_ns << '\n';
    put_d(os, aem_drift_max_first);
    os << ' ';
    put_d(os, aem_drift_max_second);
    os << ' ';
    put_d(os, prop_drift_max_first);
    os << ' ';
    put_d(os, prop_drift_max_second);
    os << '\n';
}

RunSummary RunSummary::load(std::istream& is) {
    std::string tag;
    is >> tag;
    if (tag != "summary") throw Error("run summary: bad header");
    RunSummary s;
    int stage2 = 0, unbounded = 0;
    is >> s.length >> s.burnin >> s.acc1 >> s.promoted >> s.acc2 >> s.moved >>
        s.retries >> stage2 >> unbounded;
    is >> s.evals.n_fine >> s.evals.n_coarse >> s.evals.fine_ns >>
        s.evals.coarse_ns;
    is >> s.aem_drift_max_first >> s.aem_drift_max_second >>
        s.prop_drift_max_first >> s.prop_drift_max_second;
    if (!is) throw Error("run summary: truncated");
    s.has_stage2 = stage2 != 0;
    s.unbounded_space = unbounded != 0;
    return s;
}

void write_checkpoint(const std::string& path, const Sampler& sampler,
                      const RunSummary& partial,
                      const std::string& config_hash) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::trunc);
        if (!os) throw Error("cannot open checkpoint file " + tmp);
        os << "damcmc-checkpoint v1\n";
        os << "config_hash " << config_hash << '\n';
        partial.save(os);
        sampler.save_state(os);
        if (!os) throw Error("failed writing checkpoint " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

CheckpointInfo read_checkpoint(const std::string& path, Sampler& sampler) {
    std::ifstream is(path);
    if (!is) throw Error("cannot open checkpoint file " + path);
    std::string tag, ver;
    is >> tag >> ver;
    if (tag != "damcmc-checkpoint" || ver != "v1")
        throw Error("not a checkpoint file: " + path);
    CheckpointInfo info;
    is >> tag >> info.config_hash;
    if (tag != "config_hash") throw Error("checkpoint: expected config_hash");
    info.partial = RunSummary::load(is);
    sampler.load_state(is);
    return info;
}

RunSummary run_chain(Sampler& sampler, const RunOptions& opt,
                     const RecordSink& sink, const RunSummary& base) {
    if (!sampler.initialized())
        throw Error("run_chain: sampler not initialized");
    if (opt.burnin >= opt.length)
        throw ConfigError("run_chain: burn-in must be shorter than the run");

    RunSummary sum = base;
    sum.length = opt.length;
    sum.burnin = opt.burnin;
    sum.has_stage2 = sampler.options().kernel != KernelKind::Mh;
    // An adaptive two-stage chain on an unbounded space has no compactness
    // backstop for its ergodicity; flagged, not forbidden.
    sum.unbounded_space =
        sum.unbounded_space ||
        (sampler.options().kernel == KernelKind::Ada &&
         !sampler.posterior().prior().bounds().all_finite());

    const std::uint64_t half = opt.length / 2;
    const bool checkpoints = !opt.checkpoint_path.empty();

    auto flush_evals = [&] {
        const EvalCounts now = sampler.posterior().pair().counts();
        sum.evals.n_fine = base.evals.n_fine + now.n_fine;
        sum.evals.n_coarse = base.evals.n_coarse + now.n_coarse;
        sum.evals.fine_ns = base.evals.fine_ns + now.fine_ns;
        sum.evals.coarse_ns = base.evals.coarse_ns + now.coarse_ns;
    };

    while (sampler.iteration() < opt.length) {
        StepFlags f;
        try {
            f = sampler.step();
        } catch (const ForwardModelError& e) {
            flush_evals();
            std::string where;
            if (checkpoints) {
                write_checkpoint(opt.checkpoint_path, sampler, sum,
                                 opt.config_hash);
                where = opt.checkpoint_path;
            }
            throw RunAbort(
                "run aborted at iteration " +
                    std::to_string(sampler.iteration() + 1) + ": " + e.what() +
                    (where.empty() ? "" : "; state saved to " + where),
                where);
        }

        sum.retries += static_cast<std::uint64_t>(f.retries);
        sum.acc1 += f.acc1;
        sum.promoted += f.promoted;
        sum.acc2 += f.acc2;
        sum.moved += f.moved;

        const bool first_half = sampler.iteration() <= half;
        double& amax = first_half ? sum.aem_drift_max_first : sum.aem_drift_max_second;
        double& pmax = first_half ? sum.prop_drift_max_first : sum.prop_drift_max_second;
        amax = std::max(amax, sampler.aem_drift_scaled());
        pmax = std::max(pmax, sampler.prop_drift_scaled());

        const EvalCounts now = sampler.posterior().pair().counts();
        ChainRecord rec;
        rec.iter = sampler.iteration();
        rec.x = sampler.state().x;
        rec.log_post = sampler.state().log_post;
        rec.acc1 = f.acc1 ? 1 : 0;
        rec.acc2 = f.has_stage2 ? (f.acc2 ? 1 : 0) : -1;
        rec.n_fine = base.evals.n_fine + now.n_fine;
        rec.n_coarse = base.evals.n_coarse + now.n_coarse;
        rec.sigma = sampler.proposal().sigma();
        sink(rec);

        if (checkpoints && opt.checkpoint_every > 0 &&
            sampler.iteration() % opt.checkpoint_every == 0 &&
            sampler.iteration() < opt.length) {
            flush_evals();
            write_checkpoint(opt.checkpoint_path, sampler, sum, opt.config_hash);
        }
    }
    flush_evals();
    return sum;
}

// ---------------------------------------------------------------- toy chain

RunSummary run_discrete_toy(const DiscreteRunOptions& opt, Rng rng,
                            const RecordSink& sink,
                            std::vector<std::uint64_t>* visits) {
    if (opt.kernel == KernelKind::Ada)
        throw ConfigError("discrete toy: kernel must be mh or da");
    if (opt.start_state < 0 || opt.start_state >= DiscreteToy::kStates)
        throw ConfigError("discrete toy: start state out of range");
    if (opt.burnin >= opt.length)
        throw ConfigError("discrete toy: burn-in must be shorter than the run");

    const auto& pi = DiscreteToy::target();
    const auto& surr = DiscreteToy::surrogate();
    const bool da = opt.kernel == KernelKind::Da;

    auto accept_log = [&](double la) {
        if (la >= 0.0) return true;
        return std::log1p(-rng.uniform()) < la;
    };

    RunSummary sum;
    sum.length = opt.length;
    sum.burnin = opt.burnin;
    sum.has_stage2 = da;
    if (visits) visits->assign(DiscreteToy::kStates, 0);

    int x = opt.start_state;
    std::uint64_t n_fine = 1;  // the initial target lookup
    std::uint64_t n_coarse = 0;

    for (std::uint64_t it = 1; it <= opt.length; ++it) {
        StepFlags f;
        f.has_stage2 = da;
        const int y = x + (rng.uniform() < 0.5 ? -1 : 1);
        if (y >= 0 && y < DiscreteToy::kStates) {
            if (!da) {
                ++n_fine;
                if (accept_log(std::log(pi[y]) - std::log(pi[x]))) {
                    x = y;
                    f.acc1 = f.moved = true;
                }
            } else {
                ++n_coarse;  // the surrogate lookup for the candidate
                const double la_fwd =
                    std::min(0.0, std::log(surr[y]) - std::log(surr[x]));
                if (accept_log(la_fwd)) {
                    f.acc1 = f.promoted = true;
                    ++n_fine;  // the stage-two target lookup
                    const double la_rev =
                        std::min(0.0, std::log(surr[x]) - std::log(surr[y]));
                    const double lbeta = (std::log(pi[y]) + la_rev) -
                                         (std::log(pi[x]) + la_fwd);
                    if (accept_log(lbeta)) {
                        x = y;
                        f.acc2 = f.moved = true;
                    }
                }
            }
        }
        // Off the end of the chain the proposal has no support, so the move
        // is rejected outright with no lookups (the mass is not folded back).

        sum.acc1 += f.acc1;
        sum.promoted += f.promoted;
        sum.acc2 += f.acc2;
        sum.moved += f.moved;
        if (visits && it > opt.burnin) ++(*visits)[static_cast<size_t>(x)];

        if (sink) {
            ChainRecord rec;
            rec.iter = it;
            rec.x = Vector::Constant(1, static_cast<double>(x));
            rec.log_post = std::log(pi[x]);
            rec.acc1 = f.acc1 ? 1 : 0;
            rec.acc2 = da ? (f.acc2 ? 1 : 0) : -1;
            rec.n_fine = n_fine;
            rec.n_coarse = n_coarse;
            rec.sigma = {1.0};
            sink(rec);
        }
    }
    sum.evals.n_fine = n_fine;
    sum.evals.n_coarse = n_coarse;
    return sum;
}

}  // namespace damcmc
