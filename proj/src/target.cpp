#include "damcmc/target.hpp"

#include <chrono>
#include <cmath>
#include <string>

namespace damcmc {

Bounds Bounds::unbounded(int dim) {
    Bounds b;
    b.lo = Vector::Constant(dim, -std::numeric_limits<double>::infinity());
    b.hi = Vector::Constant(dim, std::numeric_limits<double>::infinity());
    return b;
}

Bounds Bounds::box(Vector lo, Vector hi) {
    if (lo.size() != hi.size())
        throw DimensionError("Bounds: lo and hi differ in length");
    for (int i = 0; i < lo.size(); ++i) {
        if (!(lo[i] < hi[i]))
            throw ConfigError("Bounds: lo[" + std::to_string(i) +
                              "] must be strictly below hi[" + std::to_string(i) +
                              "]");
    }
    Bounds b;
    b.lo = std::move(lo);
    b.hi = std::move(hi);
    return b;
}

bool Bounds::contains(const Vector& x) const {
    if (x.size() != lo.size())
        throw DimensionError("Bounds::contains: x has length " +
                             std::to_string(x.size()) + ", expected " +
                             std::to_string(lo.size()));
    for (int i = 0; i < x.size(); ++i) {
        if (!(x[i] >= lo[i] && x[i] <= hi[i])) return false;
    }
    return true;
}

bool Bounds::all_finite() const {
    return lo.allFinite() && hi.allFinite();
}

Prior Prior::box(Bounds bounds) {
    if (!bounds.all_finite())
        throw ConfigError("box prior requires finite bounds");
    return Prior(Kind::Box, std::move(bounds));
}

Prior Prior::gaussian_box(Vector mean, Vector sd, Bounds bounds) {
    if (mean.size() != bounds.dim() || sd.size() != bounds.dim())
        throw DimensionError("gaussian prior: mean/sd length mismatch");
    for (int i = 0; i < sd.size(); ++i)
        if (!(sd[i] > 0.0)) throw ConfigError("gaussian prior: sd must be > 0");
    Prior p(Kind::GaussianBox, std::move(bounds));
    p.mean_ = std::move(mean);
    p.sd_ = std::move(sd);
    return p;
}

Prior Prior::callback(std::function<double(const Vector&)> log_density,
                      Bounds support) {
    Prior p(Kind::Callback, std::move(support));
    p.log_density_fn_ = std::move(log_density);
    return p;
}

double Prior::log_density(const Vector& x) const {
    if (!bounds_.contains(x)) return kNegInf;
    switch (kind_) {
        case Kind::Box:
            return 0.0;
        case Kind::GaussianBox: {
            double s = 0.0;
            for (int i = 0; i < x.size(); ++i) {
                double z = (x[i] - mean_[i]) / sd_[i];
                s -= 0.5 * z * z;
            }
            return s;
        }
        case Kind::Callback:
            return log_density_fn_(x);
    }
    return kNegInf;
}

Vector Prior::sample(Rng& rng) const {
    const int d = dim();
    switch (kind_) {
        case Kind::Box: {
            Vector x(d);
            for (int i = 0; i < d; ++i)
                x[i] = bounds_.lo[i] +
                       (bounds_.hi[i] - bounds_.lo[i]) * rng.uniform();
            return x;
        }
        case Kind::GaussianBox: {
            // Rejection against the box; cheap because the toolkit's boxes
            // carry almost all of the Gaussian mass.
            for (int attempt = 0; attempt < 100000; ++attempt) {
                Vector x(d);
                for (int i = 0; i < d; ++i)
                    x[i] = mean_[i] + sd_[i] * rng.normal();
                if (bounds_.contains(x)) return x;
            }
            throw Error(
                "gaussian prior sampling: box rejection budget exhausted "
                "(box carries negligible prior mass)");
        }
        case Kind::Callback:
            throw Error("callback prior does not support sampling");
    }
    throw Error("unreachable");
}

NoiseModel::NoiseModel(Matrix cov) : cov_(std::move(cov)) {
    llt_ = spd_factor(cov_, "noise covariance");
}

NoiseModel NoiseModel::iso(double sd, int m) {
    if (!(sd > 0.0)) throw ConfigError("noise sd must be > 0");
    return NoiseModel(Matrix::Identity(m, m) * sd * sd);
}

NoiseModel NoiseModel::diag(const Vector& sd) {
    Matrix c = Matrix::Zero(sd.size(), sd.size());
    for (int i = 0; i < sd.size(); ++i) {
        if (!(sd[i] > 0.0)) throw ConfigError("noise sd must be > 0");
        c(i, i) = sd[i] * sd[i];
    }
    return NoiseModel(std::move(c));
}

double NoiseModel::quad(const Vector& r) const {
    if (r.size() != cov_.rows())
        throw DimensionError("noise quad: residual length " +
                             std::to_string(r.size()) + ", expected " +
                             std::to_string(cov_.rows()));
    return quad_form(llt_, r);
}

double NoiseModel::log_likelihood(const Vector& model_out,
                                  const Vector& data) const {
    if (model_out.size() != dim() || data.size() != dim())
        throw DimensionError("log_likelihood: output/data length mismatch");
    if (!model_out.allFinite())
        throw ForwardModelError("log_likelihood: non-finite model output");
    if (!data.allFinite())
        throw Error("log_likelihood: non-finite data");
    return -0.5 * quad(model_out - data);
}

ForwardModelPair::ForwardModelPair(std::shared_ptr<const ForwardModel> fine,
                                   std::shared_ptr<const ForwardModel> coarse)
    : fine_(std::move(fine)), coarse_(std::move(coarse)) {
    if (!fine_ || !coarse_) throw Error("ForwardModelPair: null model");
    if (fine_->input_dim() != coarse_->input_dim())
        throw DimensionError("ForwardModelPair: input dims differ");
    if (fine_->output_dim() != coarse_->output_dim())
        throw DimensionError("ForwardModelPair: output dims differ");
}

namespace {
Vector timed_eval(const ForwardModel& m, const Vector& x,
                  std::atomic<std::uint64_t>& n,
                  std::atomic<std::int64_t>& ns) {
    auto t0 = std::chrono::steady_clock::now();
    Vector out = m.evaluate(x);
    auto t1 = std::chrono::steady_clock::now();
    n.fetch_add(1, std::memory_order_relaxed);
    ns.fetch_add(
        std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count(),
        std::memory_order_relaxed);
    if (out.size() != m.output_dim())
        throw ForwardModelError("forward model returned wrong output length");
    return out;
}
}  // namespace

Vector ForwardModelPair::eval_fine(const Vector& x) const {
    return timed_eval(*fine_, x, n_fine_, fine_ns_);
}

Vector ForwardModelPair::eval_coarse(const Vector& x) const {
    return timed_eval(*coarse_, x, n_coarse_, coarse_ns_);
}

EvalCounts ForwardModelPair::counts() const {
    EvalCounts c;
    c.n_fine = n_fine_.load(std::memory_order_relaxed);
    c.n_coarse = n_coarse_.load(std::memory_order_relaxed);
    c.fine_ns = fine_ns_.load(std::memory_order_relaxed);
    c.coarse_ns = coarse_ns_.load(std::memory_order_relaxed);
    return c;
}

void ForwardModelPair::reset_counts() const {
    n_fine_.store(0, std::memory_order_relaxed);
    n_coarse_.store(0, std::memory_order_relaxed);
    fine_ns_.store(0, std::memory_order_relaxed);
    coarse_ns_.store(0, std::memory_order_relaxed);
}

Posterior::Posterior(std::shared_ptr<const ForwardModelPair> pair,
                     NoiseModel noise, Prior prior, Vector data)
    : pair_(std::move(pair)),
      noise_(std::move(noise)),
      prior_(std::move(prior)),
      data_(std::move(data)) {
    if (!pair_) throw Error("Posterior: null model pair");
    if (pair_->input_dim() != prior_.dim())
        throw DimensionError("Posterior: model input dim != prior dim");
    if (pair_->output_dim() != noise_.dim())
        throw DimensionError("Posterior: model output dim != noise dim");
    if (data_.size() != noise_.dim())
        throw DimensionError("Posterior: data length != noise dim");
    if (!data_.allFinite()) throw Error("Posterior: non-finite data");
}

double Posterior::log_posterior(const Vector& x, Vector* fine_out) const {
    double lp = prior_.log_density(x);
    if (lp == kNegInf) return kNegInf;  // no forward evaluation out of support
    Vector out = pair_->eval_fine(x);
    if (fine_out) *fine_out = out;
    return lp + noise_.log_likelihood(out, data_);
}

}  // namespace damcmc
