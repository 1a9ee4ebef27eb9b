#include <doctest.h>

#include <cmath>
#include <memory>
#include <sstream>
#include <vector>

#include "damcmc/aem.hpp"
#include "damcmc/models.hpp"

using namespace damcmc;

namespace {

Vector v2(double a, double b) {
    Vector v(2);
    v << a, b;
    return v;
}

// Identity map that fails whenever the first coordinate exceeds a threshold.
struct FlakyModel : ForwardModel {
    double fail_above;
    explicit FlakyModel(double t) : fail_above(t) {}
    int input_dim() const override { return 2; }
    int output_dim() const override { return 2; }
    Vector evaluate(const Vector& x) const override {
        if (x[0] > fail_above)
            throw ForwardModelError("flaky model refused x");
        return x;
    }
};

struct ScaledModel : ForwardModel {
    double factor;
    explicit ScaledModel(double f) : factor(f) {}
    int input_dim() const override { return 2; }
    int output_dim() const override { return 2; }
    Vector evaluate(const Vector& x) const override { return factor * x; }
};

}  // namespace

TEST_CASE("scheme names round-trip") {
    for (Scheme s : {Scheme::Exact, Scheme::Approx1, Scheme::Approx2,
                     Scheme::Approx3, Scheme::Approx4, Scheme::Approx5})
        CHECK(scheme_from_name(scheme_name(s)) == s);
    CHECK_THROWS_AS(scheme_from_name("approx9"), ConfigError);

    CHECK(!scheme_uses_aem(Scheme::Approx4));
    CHECK(scheme_uses_aem(Scheme::Approx2));
    CHECK(scheme_adaptive(Scheme::Approx5));
    CHECK(!scheme_adaptive(Scheme::Approx2));
    CHECK(scheme_state_dependent(Scheme::Approx4));
    CHECK(!scheme_state_dependent(Scheme::Approx3));
}

TEST_CASE("fresh error model is jitter-only") {
    Matrix noise = Matrix::Identity(2, 2);
    noise(0, 0) = 3.0;  // trace 4, m = 2 -> jitter 2e-10
    AemState st(noise, MeanMode::Free);
    CHECK(st.jitter() == doctest::Approx(2e-10).epsilon(1e-12));
    CHECK(st.count() == 0);
    CHECK(st.mean() == Vector::Zero(2));
    CHECK((st.cov() - st.jitter() * Matrix::Identity(2, 2)).norm() == 0.0);

    // total_quad with zero updates is just (jitter I + noise)^{-1}.
    Matrix total = st.cov() + noise;
    Vector r = v2(0.4, -1.1);
    CHECK(st.total_quad(r) ==
          doctest::Approx(r.dot(total.inverse() * r)).epsilon(1e-12));
}

TEST_CASE("free mode matches batch mean and covariance") {
    Matrix noise = 0.25 * Matrix::Identity(2, 2);
    AemState st(noise, MeanMode::Free);
    Rng rng(31, 0);
    std::vector<Vector> bs;
    Vector sum = Vector::Zero(2);
    for (int i = 0; i < 500; ++i) {
        Vector b = v2(rng.normal() * 0.3 + 1.0, rng.normal() * 0.7 - 2.0);
        st.update(b);
        bs.push_back(b);
        sum += b;
    }
    Vector mean = sum / 500.0;
    Matrix cov = Matrix::Zero(2, 2);
    for (const auto& b : bs) cov += (b - mean) * (b - mean).transpose();
    cov /= 499.0;
    cov.diagonal().array() += st.jitter();
    CHECK((st.mean() - mean).norm() < 1e-12);
    CHECK((st.cov() - cov).norm() < 1e-9);

    // The cached factorization tracks the running covariance.
    Vector r = v2(1.0, 1.0);
    Matrix total = st.cov() + noise;
    CHECK(st.total_quad(r) ==
          doctest::Approx(r.dot(total.inverse() * r)).epsilon(1e-10));
}

TEST_CASE("identical error vectors collapse to the jitter diagonal") {
    AemState st(Matrix::Identity(2, 2), MeanMode::Free);
    Vector b = v2(0.7, -0.2);
    for (int i = 0; i < 20; ++i) st.update(b);
    CHECK(st.mean() == b);
    CHECK((st.cov() - st.jitter() * Matrix::Identity(2, 2)).norm() < 1e-16);
}

TEST_CASE("pinned mode keeps the mean at zero and averages b b^T") {
    AemState st(Matrix::Identity(2, 2), MeanMode::PinnedZero);
    Vector b1 = v2(1.0, 2.0);
    st.update(b1);
    CHECK(st.mean() == Vector::Zero(2));
    Matrix expect = b1 * b1.transpose();
    expect.diagonal().array() += st.jitter();
    CHECK((st.cov() - expect).norm() == 0.0);

    Rng rng(33, 0);
    Matrix s2 = b1 * b1.transpose();
    int k = 1;
    for (int i = 0; i < 50; ++i) {
        Vector b = v2(rng.normal(), rng.normal() * 2.0);
        st.update(b);
        s2 += b * b.transpose();
        ++k;
    }
    Matrix mean_outer = s2 / k;
    mean_outer.diagonal().array() += st.jitter();
    CHECK((st.cov() - mean_outer).norm() < 1e-12);
    CHECK(st.mean() == Vector::Zero(2));
}

TEST_CASE("update reports the drift it caused") {
    AemState st(Matrix::Identity(2, 2), MeanMode::Free);
    st.update(v2(1.0, 0.0));
    Vector mean_before = st.mean();
    Matrix cov_before = st.cov();
    auto drift = st.update(v2(0.0, 1.0));
    CHECK(drift.mean_delta ==
          doctest::Approx((st.mean() - mean_before).norm()).epsilon(1e-15));
    CHECK(drift.cov_delta ==
          doctest::Approx((st.cov() - cov_before).norm()).epsilon(1e-15));
    CHECK(drift.cov_delta > 0.0);
}

TEST_CASE("error-model state serialization round-trips") {
    Matrix noise(2, 2);
    noise << 0.3, 0.05, 0.05, 0.2;
    AemState st(noise, MeanMode::PinnedZero);
    Rng rng(35, 0);
    for (int i = 0; i < 9; ++i) st.update(v2(rng.normal(), rng.normal()));

    std::stringstream ss;
    st.save(ss);
    AemState back = AemState::load(ss);
    CHECK(back.state_equals(st));
    Vector r = v2(0.3, 0.9);
    CHECK(back.total_quad(r) == st.total_quad(r));

    std::stringstream bad("not-aem 1 0 0");
    CHECK_THROWS_AS(AemState::load(bad), Error);
}

TEST_CASE("prior error-model build skips failing draws with warnings") {
    Prior prior = Prior::box(Bounds::box(v2(0, 0), v2(1, 1)));
    Matrix noise = 0.01 * Matrix::Identity(2, 2);

    // Fine fails for roughly half of the prior draws.
    auto pair = std::make_shared<ForwardModelPair>(
        std::make_shared<FlakyModel>(0.5), std::make_shared<ScaledModel>(0.9));
    Rng rng(1, 1);
    PriorAemBuild build = build_prior_aem(*pair, prior, noise, 40, rng);
    CHECK(build.attempted == 40);
    CHECK(build.succeeded > 5);
    CHECK(build.succeeded < 40);
    CHECK(build.warnings.size() ==
          static_cast<size_t>(build.attempted - build.succeeded));
    CHECK(build.state.count() == static_cast<std::uint64_t>(build.succeeded));
    CHECK(build.state.mode() == MeanMode::Free);

    Rng r2(1, 1);
    CHECK_THROWS_AS(build_prior_aem(*pair, prior, noise, 1, r2), ConfigError);

    auto dead = std::make_shared<ForwardModelPair>(
        std::make_shared<FlakyModel>(-1.0), std::make_shared<ScaledModel>(0.9));
    Rng r3(1, 1);
    CHECK_THROWS_AS(build_prior_aem(*dead, prior, noise, 10, r3), Error);
}

TEST_CASE("reduced densities implement their residual formulas") {
    auto pair = std::make_shared<ForwardModelPair>(
        std::make_shared<ScaledModel>(1.0), std::make_shared<ScaledModel>(0.8));
    Prior prior = Prior::gaussian_box(Vector::Zero(2), Vector::Ones(2),
                                      Bounds::box(v2(-5, -5), v2(5, 5)));
    Vector data = v2(0.6, -0.3);
    NoiseModel noise = NoiseModel::iso(0.5, 2);
    Posterior post(pair, noise, prior, data);

    Vector x = v2(1.0, -0.5);
    Vector fine_x = pair->eval_fine(x);
    Vector coarse_x = pair->eval_coarse(x);
    AnchorCache anchor{&fine_x, &coarse_x};

    Vector y = v2(0.4, 0.2);
    Vector coarse_y = pair->eval_coarse(y);
    double lp = prior.log_density(y);

    AemState aem(noise.cov(), MeanMode::Free);
    Rng rng(37, 0);
    for (int i = 0; i < 30; ++i)
        aem.update(v2(0.1 + 0.02 * rng.normal(), -0.05 + 0.02 * rng.normal()));

    SUBCASE("approx1 is the coarse posterior") {
        double got = approx_log_density(Scheme::Approx1, post, nullptr,
                                        coarse_y, lp, nullptr);
        CHECK(got == lp + noise.log_likelihood(coarse_y, data));
    }

    SUBCASE("approx2/3 shift by the error mean and widen the covariance") {
        Vector r = coarse_y + aem.mean() - data;
        Matrix total = aem.cov() + noise.cov();
        double expect = lp - 0.5 * r.dot(total.inverse() * r);
        for (Scheme s : {Scheme::Approx2, Scheme::Approx3}) {
            double got = approx_log_density(s, post, &aem, coarse_y, lp, nullptr);
            CHECK(got == doctest::Approx(expect).epsilon(1e-12));
        }
        CHECK_THROWS_AS(approx_log_density(Scheme::Approx2, post, nullptr,
                                           coarse_y, lp, nullptr),
                        Error);
    }

    SUBCASE("approx4 shifts by the anchor error against the noise alone") {
        Vector r = coarse_y + (fine_x - coarse_x) - data;
        double expect = lp - 0.5 * noise.quad(r);
        double got = approx_log_density(Scheme::Approx4, post, nullptr,
                                        coarse_y, lp, &anchor);
        CHECK(got == doctest::Approx(expect).epsilon(1e-13));
        CHECK_THROWS_AS(approx_log_density(Scheme::Approx4, post, nullptr,
                                           coarse_y, lp, nullptr),
                        Error);
    }

    SUBCASE("approx5 combines the anchor shift with the increment covariance") {
        AemState pinned(noise.cov(), MeanMode::PinnedZero);
        pinned.update(v2(0.05, -0.02));
        pinned.update(v2(-0.01, 0.03));
        Vector r = coarse_y + (fine_x - coarse_x) - data;
        Matrix total = pinned.cov() + noise.cov();
        double expect = lp - 0.5 * r.dot(total.inverse() * r);
        double got = approx_log_density(Scheme::Approx5, post, &pinned,
                                        coarse_y, lp, &anchor);
        CHECK(got == doctest::Approx(expect).epsilon(1e-12));
        CHECK_THROWS_AS(approx_log_density(Scheme::Approx5, post, &pinned,
                                           coarse_y, lp, nullptr),
                        Error);
    }

    SUBCASE("out-of-support points never touch the residual algebra") {
        double got = approx_log_density(Scheme::Approx1, post, nullptr,
                                        coarse_y, kNegInf, nullptr);
        CHECK(got == kNegInf);
    }

    SUBCASE("the exact scheme has no reduced density") {
        CHECK_THROWS_AS(approx_log_density(Scheme::Exact, post, &aem, coarse_y,
                                           lp, &anchor),
                        Error);
    }
}
