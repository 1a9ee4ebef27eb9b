#include "damcmc/aem.hpp"

#include <cstdio>
#include <istream>
#include <ostream>

namespace damcmc {

std::string scheme_name(Scheme s) {
    switch (s) {
        case Scheme::Exact: return "exact";
        case Scheme::Approx1: return "approx1";
        case Scheme::Approx2: return "approx2";
        case Scheme::Approx3: return "approx3";
        case Scheme::Approx4: return "approx4";
        case Scheme::Approx5: return "approx5";
    }
    return "?";
}

Scheme scheme_from_name(const std::string& name) {
    if (name == "exact") return Scheme::Exact;
    if (name == "approx1") return Scheme::Approx1;
    if (name == "approx2") return Scheme::Approx2;
    if (name == "approx3") return Scheme::Approx3;
    if (name == "approx4") return Scheme::Approx4;
    if (name == "approx5") return Scheme::Approx5;
    throw ConfigError("unknown scheme '" + name + "'");
}

AemState::AemState(Matrix noise_cov, MeanMode mode)
    : m_(static_cast<int>(noise_cov.rows())),
      mode_(mode),
      noise_cov_(std::move(noise_cov)) {
    if (noise_cov_.rows() != noise_cov_.cols())
        throw DimensionError("AemState: noise covariance not square");
    jitter_ = 1e-10 * noise_cov_.trace() / m_;
    mean_ = Vector::Zero(m_);
    m2_ = Matrix::Zero(m_, m_);
    refresh_factorization();
}

Matrix AemState::cov() const {
    Matrix base;
    if (mode_ == MeanMode::Free) {
        base = (n_ >= 2) ? Matrix(m2_ / static_cast<double>(n_ - 1))
                         : Matrix(Matrix::Zero(m_, m_));
    } else {
        base = (n_ >= 1) ? Matrix(m2_ / static_cast<double>(n_))
                         : Matrix(Matrix::Zero(m_, m_));
    }
    base.diagonal().array() += jitter_;
    return base;
}

AemState::Drift AemState::update(const Vector& b) {
    if (b.size() != m_)
        throw DimensionError("AemState::update: vector length mismatch");
    if (!b.allFinite())
        throw Error("AemState::update: non-finite error vector");
    Vector mean_before = mean_;
    Matrix cov_before = cov();
    ++n_;
    if (mode_ == MeanMode::Free) {
        Vector delta = b - mean_;
        mean_ += delta / static_cast<double>(n_);
        m2_ += delta * (b - mean_).transpose();
    } else {
        m2_ += b * b.transpose();
    }
    m2_ = symmetrize(m2_);
    refresh_factorization();
    Drift d;
    d.mean_delta = (mean_ - mean_before).norm();
    d.cov_delta = (cov() - cov_before).norm();
    return d;
}

void AemState::refresh_factorization() {
    Matrix total = cov() + noise_cov_;
    Eigen::LLT<Matrix> llt(total);
    if (llt.info() != Eigen::Success)
        throw FactorizationError(
            "AemState: (error + noise) covariance failed Cholesky after " +
            std::to_string(n_) + " updates");
    total_llt_ = std::move(llt);
}

double AemState::total_quad(const Vector& r) const {
    if (r.size() != m_)
        throw DimensionError("AemState::total_quad: length mismatch");
    return quad_form(total_llt_, r);
}

void AemState::save(std::ostream& os) const {
    char buf[64];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        os << buf << ' ';
    };
    os << "aem " << m_ << ' ' << static_cast<int>(mode_) << ' ' << n_ << '\n';
    for (int i = 0; i < m_; ++i)
        for (int j = 0; j < m_; ++j) put(noise_cov_(i, j));
    os << '\n';
    for (int i = 0; i < m_; ++i) put(mean_[i]);
    os << '\n';
    for (int i = 0; i < m_; ++i)
        for (int j = 0; j < m_; ++j) put(m2_(i, j));
    os << '\n';
}

AemState AemState::load(std::istream& is) {
    std::string tag;
    int m, mode;
    std::uint64_t n;
    is >> tag >> m >> mode >> n;
    if (tag != "aem" || !is) throw Error("aem state: bad header");
    Matrix noise(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) is >> noise(i, j);
    AemState st(noise, static_cast<MeanMode>(mode));
    st.n_ = n;
    for (int i = 0; i < m; ++i) is >> st.mean_[i];
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) is >> st.m2_(i, j);
    if (!is) throw Error("aem state: truncated");
    st.refresh_factorization();
    return st;
}

bool AemState::state_equals(const AemState& o) const {
    return m_ == o.m_ && mode_ == o.mode_ && n_ == o.n_ && mean_ == o.mean_ &&
           m2_ == o.m2_ && noise_cov_ == o.noise_cov_;
}

PriorAemBuild build_prior_aem(const ForwardModelPair& pair, const Prior& prior,
                              const Matrix& noise_cov, int samples, Rng& rng) {
    if (samples < 2)
        throw ConfigError("prior error model needs at least 2 samples");
    PriorAemBuild out{AemState(noise_cov, MeanMode::Free), 0, 0, {}};
    for (int i = 0; i < samples; ++i) {
        out.attempted += 1;
        Vector x = prior.sample(rng);
        try {
            Vector bf = pair.eval_fine(x);
            Vector bc = pair.eval_coarse(x);
            out.state.update(bf - bc);
            out.succeeded += 1;
        } catch (const ForwardModelError& e) {
            out.warnings.push_back("prior draw " + std::to_string(i + 1) +
                                   " skipped: " + e.what());
        }
    }
    if (out.succeeded < 2)
        throw Error(
            "prior error model: fewer than 2 prior draws evaluated "
            "successfully (" +
            std::to_string(out.succeeded) + "/" +
            std::to_string(out.attempted) + ")");
    return out;
}

double approx_log_density(Scheme s, const Posterior& post, const AemState* aem,
                          const Vector& coarse_y, double log_prior_y,
                          const AnchorCache* anchor) {
    if (log_prior_y == kNegInf) return kNegInf;
    switch (s) {
        case Scheme::Approx1:
            return log_prior_y +
                   post.noise().log_likelihood(coarse_y, post.data());
        case Scheme::Approx2:
        case Scheme::Approx3: {
            if (!aem) throw Error("approx2/3 density needs an error model");
            Vector r = coarse_y + aem->mean() - post.data();
            return log_prior_y - 0.5 * aem->total_quad(r);
        }
        case Scheme::Approx4: {
            if (!anchor || !anchor->fine_out || !anchor->coarse_out)
                throw Error("approx4 density needs an anchor state");
            Vector r = coarse_y + (*anchor->fine_out - *anchor->coarse_out) -
                       post.data();
            return log_prior_y - 0.5 * post.noise().quad(r);
        }
        case Scheme::Approx5: {
            if (!aem) throw Error("approx5 density needs an error model");
            if (!anchor || !anchor->fine_out || !anchor->coarse_out)
                throw Error("approx5 density needs an anchor state");
            Vector r = coarse_y + (*anchor->fine_out - *anchor->coarse_out) -
                       post.data();
            return log_prior_y - 0.5 * aem->total_quad(r);
        }
        case Scheme::Exact:
            break;
    }
    throw Error("approx_log_density: exact scheme has no reduced density");
}

}  // namespace damcmc
