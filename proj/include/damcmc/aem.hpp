#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "damcmc/target.hpp"

namespace damcmc {

// Reduced-model approximation schemes for the first DA stage.
//
//   approx1  coarse-model posterior: -1/2 |F*(y)-d|^2_{Sigma_e} + log prior
//   approx2  prior-sample error model: residual F*(y)+mu_B-d against
//            (Sigma_B + Sigma_e), mu_B/Sigma_B estimated from prior draws
//   approx3  same form, mu/Sigma estimated recursively from the chain
//   approx4  state-dependent shift: residual F*(y)+[F(x)-F*(x)]-d against
//            Sigma_e (exact at y = x)
//   approx5  state-dependent shift with covariance of the error increments:
//            same residual against (Sigma_hat + Sigma_e), mean pinned to zero
enum class Scheme { Exact, Approx1, Approx2, Approx3, Approx4, Approx5 };

std::string scheme_name(Scheme s);
Scheme scheme_from_name(const std::string& name);

inline bool scheme_state_dependent(Scheme s) {
    return s == Scheme::Approx4 || s == Scheme::Approx5;
}
inline bool scheme_uses_aem(Scheme s) {
    return s == Scheme::Approx2 || s == Scheme::Approx3 || s == Scheme::Approx5;
}
// Schemes whose error statistics are updated along the chain (require ada).
inline bool scheme_adaptive(Scheme s) {
    return s == Scheme::Approx3 || s == Scheme::Approx5;
}

enum class MeanMode { Free, PinnedZero };

// Streaming mean/covariance of model-error vectors, with the factorization
// of (error covariance + noise covariance) kept current.
//
// Free mode: Welford running mean and mean-centered covariance (denominator
// n-1), matching batch formulas.  PinnedZero mode: mean stays zero and the
// covariance is the running second moment about zero, matching the recursion
//   S_n = [(n-2) S_{n-1} + b b^T] / (n-1),   n >= 2,
// where the first streamed vector corresponds to n = 2.
//
// Until two vectors have been streamed the covariance is eps_jit * I with
// eps_jit = 1e-10 * trace(Sigma_e) / m, so early evaluations behave like the
// un-inflated schemes; the same jitter stays on the diagonal afterwards.
class AemState {
public:
    AemState(Matrix noise_cov, MeanMode mode);

    int dim() const { return m_; }
    MeanMode mode() const { return mode_; }
    std::uint64_t count() const { return n_; }
    double jitter() const { return jitter_; }

    const Vector& mean() const { return mean_; }
    Matrix cov() const;  // error covariance including the jitter diagonal

    struct Drift {
        double mean_delta = 0.0;  // ||mu_{n+1} - mu_n||_2
        double cov_delta = 0.0;   // ||Sigma_{n+1} - Sigma_n||_F
    };
    Drift update(const Vector& b);

    // r^T (Sigma_bar + Sigma_e)^{-1} r with the cached factorization.
    double total_quad(const Vector& r) const;

    void save(std::ostream& os) const;
    static AemState load(std::istream& is);
    bool state_equals(const AemState& o) const;

private:
    void refresh_factorization();

    int m_ = 0;
    MeanMode mode_ = MeanMode::Free;
    Matrix noise_cov_;
    double jitter_ = 0.0;
    std::uint64_t n_ = 0;
    Vector mean_;
    Matrix m2_;  // free: Welford residual outer-product sum; pinned: sum b b^T
    Eigen::LLT<Matrix> total_llt_;
};

// Builds the approx2 error model from `samples` prior draws (two model
// evaluations each).  Forward-model failures skip the draw with a warning;
// fewer than two successes is an error.
struct PriorAemBuild {
    AemState state;
    int attempted = 0;
    int succeeded = 0;
    std::vector<std::string> warnings;
};

PriorAemBuild build_prior_aem(const ForwardModelPair& pair, const Prior& prior,
                              const Matrix& noise_cov, int samples, Rng& rng);

// Cached model outputs at the anchor state x, needed by the state-dependent
// schemes (approx4/approx5): F*_x(y) = F*(y) + F(x) - F*(x).
struct AnchorCache {
    const Vector* fine_out = nullptr;
    const Vector* coarse_out = nullptr;
};

// log pi*(y) for the chosen scheme, given the already-computed coarse
// output and log prior at y.  No forward model is evaluated here.  `aem` is
// required for approx2/3/5, `anchor` for approx4/5.
double approx_log_density(Scheme s, const Posterior& post, const AemState* aem,
                          const Vector& coarse_y, double log_prior_y,
                          const AnchorCache* anchor);

}  // namespace damcmc
