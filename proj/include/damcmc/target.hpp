#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>

#include "damcmc/linalg.hpp"
#include "damcmc/rng.hpp"

namespace damcmc {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Coordinate box; entries may be +-inf for unbounded directions.
struct Bounds {
    Vector lo;
    Vector hi;

    static Bounds unbounded(int dim);
    static Bounds box(Vector lo, Vector hi);

    int dim() const { return static_cast<int>(lo.size()); }
    bool contains(const Vector& x) const;
    bool all_finite() const;
};

// Prior over parameters.  Three kinds cover the toolkit's needs: a box
// indicator, independent Gaussians restricted to a box, and an arbitrary
// log-density callback.  Outside the box the log density is -inf, which the
// posterior uses to skip forward evaluations entirely.
class Prior {
public:
    enum class Kind { Box, GaussianBox, Callback };

    static Prior box(Bounds bounds);
    static Prior gaussian_box(Vector mean, Vector sd, Bounds bounds);
    static Prior callback(std::function<double(const Vector&)> log_density,
                          Bounds support);

    Kind kind() const { return kind_; }
    int dim() const { return bounds_.dim(); }
    const Bounds& bounds() const { return bounds_; }

    double log_density(const Vector& x) const;  // unnormalized, -inf outside
    bool in_support(const Vector& x) const { return bounds_.contains(x); }

    // Draws from the prior (used to build the prior-sample error model).
    // Box: uniform, requires finite bounds.  GaussianBox: rejection against
    // the box (throws after a large attempt budget if the box carries almost
    // no mass).  Callback: not supported.
    Vector sample(Rng& rng) const;

private:
    Prior(Kind k, Bounds b) : kind_(k), bounds_(std::move(b)) {}

    Kind kind_;
    Bounds bounds_;
    Vector mean_, sd_;
    std::function<double(const Vector&)> log_density_fn_;
};

// Gaussian observation-error model with fixed covariance.  The covariance is
// validated (symmetric, SPD) and factorized exactly once at construction;
// failure is an error, never silently regularized.
class NoiseModel {
public:
    explicit NoiseModel(Matrix cov);
    static NoiseModel iso(double sd, int m);
    static NoiseModel diag(const Vector& sd);

    int dim() const { return static_cast<int>(cov_.rows()); }
    const Matrix& cov() const { return cov_; }

    // r^T Sigma_e^{-1} r
    double quad(const Vector& r) const;

    // -1/2 (out - data)^T Sigma_e^{-1} (out - data); the normalizing constant
    // is omitted (it cancels in every acceptance ratio).  Non-finite entries
    // in either argument are an error, not a silent -inf.
    double log_likelihood(const Vector& model_out, const Vector& data) const;

private:
    Matrix cov_;
    Eigen::LLT<Matrix> llt_;
};

// A parameter-to-observable map.  evaluate() either returns a finite vector
// of length output_dim() or throws ForwardModelError.
class ForwardModel {
public:
    virtual ~ForwardModel() = default;
    virtual int input_dim() const = 0;
    virtual int output_dim() const = 0;
    virtual Vector evaluate(const Vector& x) const = 0;
};

struct EvalCounts {
    std::uint64_t n_fine = 0;
    std::uint64_t n_coarse = 0;
    std::int64_t fine_ns = 0;
    std::int64_t coarse_ns = 0;

    double mean_fine_seconds() const {
        return n_fine ? 1e-9 * static_cast<double>(fine_ns) / n_fine : 0.0;
    }
    double mean_coarse_seconds() const {
        return n_coarse ? 1e-9 * static_cast<double>(coarse_ns) / n_coarse : 0.0;
    }
};

// Fine/coarse model pair over the same parameter and observation spaces.
// Every evaluation is counted and wall-timed; counters are atomic so chains
// running in parallel threads can share a pair.
class ForwardModelPair {
public:
    ForwardModelPair(std::shared_ptr<const ForwardModel> fine,
                     std::shared_ptr<const ForwardModel> coarse);

    int input_dim() const { return fine_->input_dim(); }
    int output_dim() const { return fine_->output_dim(); }

    Vector eval_fine(const Vector& x) const;
    Vector eval_coarse(const Vector& x) const;

    const ForwardModel& fine() const { return *fine_; }
    const ForwardModel& coarse() const { return *coarse_; }

    EvalCounts counts() const;
    void reset_counts() const;

private:
    std::shared_ptr<const ForwardModel> fine_;
    std::shared_ptr<const ForwardModel> coarse_;
    mutable std::atomic<std::uint64_t> n_fine_{0}, n_coarse_{0};
    mutable std::atomic<std::int64_t> fine_ns_{0}, coarse_ns_{0};
};

// Exact (fine-model) posterior: log pi(x) = log prior(x) + log L(x), with
// log L(x) = -1/2 (F(x) - data)^T Sigma_e^{-1} (F(x) - data).
class Posterior {
public:
    Posterior(std::shared_ptr<const ForwardModelPair> pair, NoiseModel noise,
              Prior prior, Vector data);

    int dim() const { return prior_.dim(); }
    const ForwardModelPair& pair() const { return *pair_; }
    std::shared_ptr<const ForwardModelPair> pair_ptr() const { return pair_; }
    const NoiseModel& noise() const { return noise_; }
    const Prior& prior() const { return prior_; }
    const Vector& data() const { return data_; }

    double log_prior(const Vector& x) const { return prior_.log_density(x); }
    double log_likelihood_of_output(const Vector& fine_out) const {
        return noise_.log_likelihood(fine_out, data_);
    }

    // Full evaluation with the bounds short-circuit: out of support returns
    // -inf without touching the forward model.  Inside support this costs
    // exactly one fine evaluation; the output is exposed through fine_out so
    // callers can cache it.
    double log_posterior(const Vector& x, Vector* fine_out = nullptr) const;

private:
    std::shared_ptr<const ForwardModelPair> pair_;
    NoiseModel noise_;
    Prior prior_;
    Vector data_;
};

}  // namespace damcmc
