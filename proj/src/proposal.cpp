#include "damcmc/proposal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <string>

namespace damcmc {

namespace {
constexpr std::uint64_t kRebuildEvery = 100000;
}

GroupPartition GroupPartition::single(int d) {
    GroupPartition p;
    p.groups.emplace_back();
    for (int i = 0; i < d; ++i) p.groups[0].push_back(i);
    return p;
}

GroupPartition GroupPartition::contiguous(const std::vector<int>& sizes) {
    GroupPartition p;
    int at = 0;
    for (int s : sizes) {
        if (s < 1) throw ConfigError("partition: group sizes must be >= 1");
        std::vector<int> g(s);
        for (int i = 0; i < s; ++i) g[i] = at + i;
        at += s;
        p.groups.push_back(std::move(g));
    }
    return p;
}

int GroupPartition::dim() const {
    int d = 0;
    for (const auto& g : groups) d += static_cast<int>(g.size());
    return d;
}

void GroupPartition::validate(int d) const {
    if (groups.empty()) throw ConfigError("partition: no groups");
    std::vector<char> seen(d, 0);
    for (const auto& g : groups) {
        if (g.empty()) throw ConfigError("partition: empty group");
        for (int i : g) {
            if (i < 0 || i >= d)
                throw ConfigError("partition: index out of range");
            if (seen[i]) throw ConfigError("partition: index repeated");
            seen[i] = 1;
        }
    }
    for (int i = 0; i < d; ++i)
        if (!seen[i])
            throw ConfigError("partition: index " + std::to_string(i) +
                              " not covered");
}

ProposalAdaptState ProposalAdaptState::rw(int d, double scale) {
    if (!(scale > 0.0)) throw ConfigError("rw proposal: scale must be > 0");
    ProposalAdaptState st;
    st.kind_ = ProposalKind::Rw;
    st.d_ = d;
    st.part_ = GroupPartition::single(d);
    st.rw_scale_ = scale;
    st.mean_ = Vector::Zero(d);
    st.m2_ = Matrix::Zero(d, d);
    st.s1_.assign(d, 0.0L);
    st.s2_.assign(static_cast<size_t>(d) * d, 0.0L);
    st.sigma_ = {scale};
    st.batch_accepts_.assign(1, 0);
    st.batch_attempts_.assign(1, 0);
    return st;
}

ProposalAdaptState ProposalAdaptState::am(int d, double beta_mix) {
    ProposalAdaptState st = rw(d, 1.0);
    st.kind_ = ProposalKind::Am;
    st.beta_mix_ = beta_mix;
    // Reported scale of the AM mixture; fixed, only the covariance adapts.
    st.sigma_ = {2.38 / std::sqrt(static_cast<double>(d))};
    return st;
}

ProposalAdaptState ProposalAdaptState::gcam(GroupPartition partition,
                                            double beta_mix, int batch,
                                            double target_rate) {
    int d = partition.dim();
    partition.validate(d);
    if (batch < 1) throw ConfigError("gcam: batch must be >= 1");
    if (!(target_rate > 0.0 && target_rate < 1.0))
        throw ConfigError("gcam: target rate must be in (0,1)");
    ProposalAdaptState st = rw(d, 1.0);
    st.kind_ = ProposalKind::Gcam;
    st.part_ = std::move(partition);
    st.beta_mix_ = beta_mix;
    st.batch_ = batch;
    st.target_rate_ = target_rate;
    const int L = st.part_.size();
    st.sigma_.assign(L, 0.0);
    for (int j = 0; j < L; ++j)
        st.sigma_[j] =
            2.38 / std::sqrt(static_cast<double>(st.part_.groups[j].size()));
    st.batch_accepts_.assign(L, 0);
    st.batch_attempts_.assign(L, 0);
    return st;
}

Matrix ProposalAdaptState::running_cov() const {
    if (n_ < 2) return Matrix::Zero(d_, d_);
    return m2_ / static_cast<double>(n_ - 1);
}

double ProposalAdaptState::observe(const Vector& x) {
    if (x.size() != d_)
        throw DimensionError("proposal observe: state length mismatch");
    Matrix before = running_cov();
    ++n_;
    Vector delta = x - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (x - mean_).transpose();
    m2_ = symmetrize(m2_);
    for (int i = 0; i < d_; ++i) {
        s1_[i] += static_cast<long double>(x[i]);
        for (int j = 0; j < d_; ++j)
            s2_[static_cast<size_t>(i) * d_ + j] +=
                static_cast<long double>(x[i]) * static_cast<long double>(x[j]);
    }
    if (n_ % kRebuildEvery == 0) rebuild_from_sums();
    return (running_cov() - before).norm();
}

void ProposalAdaptState::rebuild_from_sums() {
    // Periodic rebuild from plain extended-precision sums bounds the drift
    // that an indefinitely chained update could accumulate.
    std::vector<long double> mu(d_);
    for (int i = 0; i < d_; ++i) mu[i] = s1_[i] / static_cast<long double>(n_);
    for (int i = 0; i < d_; ++i) mean_[i] = static_cast<double>(mu[i]);
    for (int i = 0; i < d_; ++i) {
        for (int j = 0; j < d_; ++j) {
            long double v = s2_[static_cast<size_t>(i) * d_ + j] -
                            static_cast<long double>(n_) * mu[i] * mu[j];
            m2_(i, j) = static_cast<double>(v);
        }
    }
    m2_ = symmetrize(m2_);
}

bool ProposalAdaptState::maybe_adapt_scales() {
    if (kind_ != ProposalKind::Gcam) return false;
    if (n_ == 0 || n_ % static_cast<std::uint64_t>(batch_) != 0) return false;
    const double delta =
        std::min(0.01, std::sqrt(static_cast<double>(batch_) /
                                 static_cast<double>(n_)));
    for (size_t j = 0; j < sigma_.size(); ++j) {
        double rate = batch_attempts_[j]
                          ? static_cast<double>(batch_accepts_[j]) /
                                static_cast<double>(batch_attempts_[j])
                          : 0.0;
        // Strict inequality: a rate exactly at the target shrinks the scale.
        sigma_[j] *= std::exp(rate > target_rate_ ? delta : -delta);
        batch_accepts_[j] = 0;
        batch_attempts_[j] = 0;
    }
    return true;
}

void ProposalAdaptState::record_group_result(int group, bool accepted) {
    batch_attempts_[group] += 1;
    if (accepted) batch_accepts_[group] += 1;
}

Matrix ProposalAdaptState::am_cov() const {
    const double d = static_cast<double>(d_);
    if (n_ <= 2 * static_cast<std::uint64_t>(d_))
        return Matrix::Identity(d_, d_) * (0.01 / d);
    return (1.0 - beta_mix_) * (2.38 * 2.38 / d) * running_cov() +
           beta_mix_ * (0.01 / d) * Matrix::Identity(d_, d_);
}

Matrix ProposalAdaptState::gcam_block_cov(int group) const {
    const auto& idx = part_.groups[group];
    const int dj = static_cast<int>(idx.size());
    if (n_ <= 2 * static_cast<std::uint64_t>(dj))
        return Matrix::Identity(dj, dj) * (0.01 / dj);
    Matrix full = running_cov();
    Matrix block(dj, dj);
    for (int a = 0; a < dj; ++a)
        for (int b = 0; b < dj; ++b) block(a, b) = full(idx[a], idx[b]);
    double max_diag = block.diagonal().maxCoeff();
    // Max-diagonal normalization is undefined on an all-identical history.
    // Refuse loudly: the chain has never moved in this group past the warmup
    // window, which points at a mis-scaled target or a degenerate start.
    if (!(max_diag > 0.0))
        throw FactorizationError(
            "gcam group " + std::to_string(group) +
            ": running covariance has zero max diagonal after " +
            std::to_string(n_) + " observations (chain never moved there)");
    double s = sigma_[group] * sigma_[group] / max_diag;
    return s * (block + beta_mix_ * Matrix::Identity(dj, dj));
}

Vector propose_rw(const Vector& x, double scale, Rng& rng) {
    Vector y = x;
    for (int i = 0; i < y.size(); ++i) y[i] += scale * rng.normal();
    return y;
}

Vector am_propose(const ProposalAdaptState& st, const Vector& x, Rng& rng) {
    Matrix c = st.am_cov();
    Eigen::LLT<Matrix> llt(c);
    if (llt.info() != Eigen::Success)
        throw FactorizationError("am proposal covariance not SPD");
    Vector z(x.size());
    for (int i = 0; i < z.size(); ++i) z[i] = rng.normal();
    return x + llt.matrixL() * z;
}

GcamSweepResult gcam_sweep(ProposalAdaptState& st, const Vector& x,
                           const TargetEval& eval_x, const TargetFn& target,
                           Rng& rng) {
    if (st.kind() != ProposalKind::Gcam)
        throw Error("gcam_sweep: state is not a gcam state");
    GcamSweepResult res;
    res.y = x;
    res.eval_y = eval_x;
    const auto& part = st.partition();
    res.group_accepted.assign(part.size(), 0);

    for (int j = 0; j < part.size(); ++j) {
        const auto& idx = part.groups[j];
        Matrix c = st.gcam_block_cov(j);
        Eigen::LLT<Matrix> llt(c);
        if (llt.info() != Eigen::Success)
            throw FactorizationError("gcam block covariance not SPD");
        Vector z(static_cast<int>(idx.size()));
        for (int i = 0; i < z.size(); ++i) z[i] = rng.normal();
        Vector step = llt.matrixL() * z;

        Vector cand = res.y;
        for (size_t a = 0; a < idx.size(); ++a) cand[idx[a]] += step[a];

        TargetEval ev = target(cand);
        double log_ratio = ev.log_density - res.eval_y.log_density;
        bool accept;
        if (log_ratio >= 0.0) {
            accept = true;
        } else {
            double u = rng.uniform();
            accept = std::log(1.0 - u) < log_ratio;
        }
        st.record_group_result(j, accept);
        if (accept) {
            res.y = std::move(cand);
            res.eval_y = std::move(ev);
            res.group_accepted[j] = 1;
            ++res.moves;
        }
    }
    return res;
}

// ------------------------------------------------------------- serialization

namespace {

void put_ld(std::ostream& os, long double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%La", v);
    os << buf;
}

long double get_ld(std::istream& is) {
    std::string tok;
    is >> tok;
    return std::strtold(tok.c_str(), nullptr);
}

}  // namespace

void ProposalAdaptState::save(std::ostream& os) const {
    os << "proposal " << static_cast<int>(kind_) << ' ' << d_ << '\n';
    os << part_.size();
    for (const auto& g : part_.groups) {
        os << ' ' << g.size();
        for (int i : g) os << ' ' << i;
    }
    os << '\n';
    char buf[64];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        os << buf << ' ';
    };
    put(rw_scale_);
    put(beta_mix_);
    os << batch_ << ' ';
    put(target_rate_);
    os << n_ << '\n';
    for (int i = 0; i < d_; ++i) put(mean_[i]);
    os << '\n';
    for (int i = 0; i < d_; ++i)
        for (int j = 0; j < d_; ++j) put(m2_(i, j));
    os << '\n';
    for (int i = 0; i < d_; ++i) {
        put_ld(os, s1_[i]);
        os << ' ';
    }
    os << '\n';
    for (size_t k = 0; k < s2_.size(); ++k) {
        put_ld(os, s2_[k]);
        os << ' ';
    }
    os << '\n';
    for (double s : sigma_) put(s);
    os << '\n';
    for (auto v : batch_accepts_) os << v << ' ';
    os << '\n';
    for (auto v : batch_attempts_) os << v << ' ';
    os << '\n';
}

ProposalAdaptState ProposalAdaptState::load(std::istream& is) {
    std::string tag;
    is >> tag;
    if (tag != "proposal") throw Error("proposal state: bad header");
    int kind, d;
    is >> kind >> d;
    ProposalAdaptState st;
    st.kind_ = static_cast<ProposalKind>(kind);
    st.d_ = d;
    int ngroups;
    is >> ngroups;
    st.part_.groups.assign(ngroups, {});
    for (int g = 0; g < ngroups; ++g) {
        size_t len;
        is >> len;
        st.part_.groups[g].resize(len);
        for (size_t i = 0; i < len; ++i) is >> st.part_.groups[g][i];
    }
    is >> st.rw_scale_ >> st.beta_mix_ >> st.batch_ >> st.target_rate_ >> st.n_;
    st.mean_ = Vector::Zero(d);
    for (int i = 0; i < d; ++i) is >> st.mean_[i];
    st.m2_ = Matrix::Zero(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) is >> st.m2_(i, j);
    st.s1_.resize(d);
    for (int i = 0; i < d; ++i) st.s1_[i] = get_ld(is);
    st.s2_.resize(static_cast<size_t>(d) * d);
    for (size_t k = 0; k < st.s2_.size(); ++k) st.s2_[k] = get_ld(is);
    int L = ngroups;
    st.sigma_.resize(L);
    for (int j = 0; j < L; ++j) is >> st.sigma_[j];
    st.batch_accepts_.resize(L);
    for (int j = 0; j < L; ++j) is >> st.batch_accepts_[j];
    st.batch_attempts_.resize(L);
    for (int j = 0; j < L; ++j) is >> st.batch_attempts_[j];
    if (!is) throw Error("proposal state: truncated");
    return st;
}

bool ProposalAdaptState::state_equals(const ProposalAdaptState& o) const {
    return kind_ == o.kind_ && d_ == o.d_ && n_ == o.n_ &&
           mean_ == o.mean_ && m2_ == o.m2_ && s1_ == o.s1_ && s2_ == o.s2_ &&
           sigma_ == o.sigma_ && batch_accepts_ == o.batch_accepts_ &&
           batch_attempts_ == o.batch_attempts_;
}

}  // namespace damcmc
