#include <doctest.h>

#include <cmath>
#include <vector>

#include "damcmc/diagnostics.hpp"
#include "damcmc/rng.hpp"

using namespace damcmc;

namespace {

// Stationary AR(1): x_{t+1} = rho x_t + sqrt(1-rho^2) z, unit variance,
// integrated autocorrelation time (1+rho)/(1-rho).
std::vector<double> ar1(double rho, int n, Rng rng) {
    std::vector<double> x(n);
    x[0] = rng.normal();
    const double s = std::sqrt(1.0 - rho * rho);
    for (int t = 1; t < n; ++t) x[t] = rho * x[t - 1] + s * rng.normal();
    return x;
}

std::vector<double> reference_rho(const std::vector<double>& x, int max_lag) {
    const int n = static_cast<int>(x.size());
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= n;
    std::vector<double> c(max_lag + 1, 0.0);
    for (int k = 0; k <= max_lag; ++k) {
        for (int t = 0; t + k < n; ++t)
            c[k] += (x[t] - mean) * (x[t + k] - mean);
        c[k] /= n;
    }
    std::vector<double> rho(max_lag + 1);
    for (int k = 0; k <= max_lag; ++k) rho[k] = c[k] / c[0];
    rho[0] = 1.0;
    return rho;
}

}  // namespace

TEST_CASE("autocorrelation of white noise decays immediately") {
    std::vector<double> x = ar1(0.0, 20000, Rng(61, 0));
    auto rho = autocorrelation(x, 50);
    CHECK(rho[0] == 1.0);
    for (int k = 1; k <= 50; ++k) CHECK(std::abs(rho[k]) < 0.05);
}

TEST_CASE("autocorrelation matches an independent direct evaluation") {
    std::vector<double> x = ar1(0.6, 4000, Rng(63, 0));
    auto rho = autocorrelation(x, 80);
    auto ref = reference_rho(x, 80);
    REQUIRE(rho.size() == ref.size());
    for (size_t k = 0; k < rho.size(); ++k)
        CHECK(rho[k] == doctest::Approx(ref[k]).epsilon(1e-12));
    CHECK(rho[1] == doctest::Approx(0.6).epsilon(0.1));
}

TEST_CASE("fft path computes the same sums as the direct loop") {
    // 40000 * 4000 = 1.6e8 multiply-adds puts this over the direct budget.
    std::vector<double> x = ar1(0.8, 40000, Rng(65, 0));
    auto rho = autocorrelation(x, 4000);
    auto ref = reference_rho(x, 4000);
    for (size_t k = 0; k < rho.size(); ++k)
        CHECK(rho[k] == doctest::Approx(ref[k]).epsilon(1e-9));
}

TEST_CASE("degenerate series are rejected, not zeroed") {
    CHECK_THROWS_AS(autocorrelation({1.0}), DiagnosticsError);
    std::vector<double> flat(1000, 3.7);
    CHECK_THROWS_AS(autocorrelation(flat), DiagnosticsError);
    CHECK_THROWS_AS(iact(flat), DiagnosticsError);
    std::vector<double> nearly(1000, 1.0);
    nearly[0] = 1.0 + 1e-16;  // variance ~ 1e-35, below the relative floor
    CHECK_THROWS_AS(autocorrelation(nearly), DiagnosticsError);
}

TEST_CASE("iact recovers the ar(1) time scale") {
    SUBCASE("rho = 0.5") {
        auto r = iact(ar1(0.5, 1000000, Rng(67, 0)));
        CHECK(r.window_closed);
        CHECK(r.tau == doctest::Approx(3.0).epsilon(0.10));
        CHECK(r.ess == doctest::Approx(1e6 / r.tau).epsilon(1e-12));
    }
    SUBCASE("rho = 0.9") {
        auto r = iact(ar1(0.9, 1000000, Rng(69, 0)));
        CHECK(r.window_closed);
        CHECK(r.tau == doctest::Approx(19.0).epsilon(0.10));
    }
    SUBCASE("white noise has tau near one") {
        auto r = iact(ar1(0.0, 200000, Rng(71, 0)));
        CHECK(r.window_closed);
        CHECK(r.tau == doctest::Approx(1.0).epsilon(0.05));
    }
}

TEST_CASE("a window that cannot close is flagged") {
    // Strong correlation with a cap far below 5*tau: the self-consistent
    // window never satisfies m >= c*tau(m).
    auto r = iact(ar1(0.995, 4000, Rng(73, 0)), /*max_lag=*/20);
    CHECK(!r.window_closed);
    CHECK(r.window == 20);
}

TEST_CASE("speedup factor reproduces pinned reference values") {
    CHECK(speedup_factor(169.0, 208.0, 0.13, 0.058) ==
          doctest::Approx(4.3218085106382979).epsilon(1e-12));
    CHECK(speedup_factor(169.0, 153.0, 0.13, 0.058) ==
          doctest::Approx(5.8753998053121961).epsilon(1e-12));
    // Equal mixing with every iteration promoted and free coarse solves
    // leaves exactly a unit factor.
    CHECK(speedup_factor(10.0, 10.0, 1.0, 0.0) == 1.0);

    CHECK_THROWS_AS(speedup_factor(0.0, 1.0, 0.5, 0.1), DiagnosticsError);
    CHECK_THROWS_AS(speedup_factor(1.0, -1.0, 0.5, 0.1), DiagnosticsError);
    CHECK_THROWS_AS(speedup_factor(1.0, 1.0, 1.5, 0.1), DiagnosticsError);
    CHECK_THROWS_AS(speedup_factor(1.0, 1.0, 0.5, -0.1), DiagnosticsError);
    CHECK_THROWS_AS(speedup_factor(1.0, 1.0, 0.0, 0.0), DiagnosticsError);
}

TEST_CASE("acceptance summary separates the two stages") {
    std::vector<ChainRecord> recs;
    auto add = [&](std::uint64_t iter, int acc1, int acc2) {
        ChainRecord r;
        r.iter = iter;
        r.x = Vector::Zero(1);
        r.acc1 = acc1;
        r.acc2 = acc2;
        recs.push_back(r);
    };
    // Burn-in rows (ignored).
    add(1, 1, 1);
    add(2, 0, 0);
    // Post burn-in: 3 stage-one accepts out of 5, of which 2 pass stage two.
    add(3, 1, 1);
    add(4, 1, 0);
    add(5, 0, 0);
    add(6, 1, 1);
    add(7, 0, 0);
    AcceptanceSummary s = acceptance_summary(recs, 2);
    CHECK(s.n == 5);
    CHECK(s.acc1 == 3);
    CHECK(s.promoted == 3);
    CHECK(s.acc2 == 2);
    CHECK(s.rate1 == doctest::Approx(0.6));
    CHECK(s.beta_bar == doctest::Approx(2.0 / 3.0));

    // Single-stage rows carry the -1 sentinel and never count as promoted.
    std::vector<ChainRecord> mh;
    ChainRecord r;
    r.iter = 1;
    r.x = Vector::Zero(1);
    r.acc1 = 1;
    r.acc2 = -1;
    mh.push_back(r);
    AcceptanceSummary sm = acceptance_summary(mh, 0);
    CHECK(sm.promoted == 0);
    CHECK(sm.beta_bar == 0.0);
}

TEST_CASE("component series respects burn-in and bounds") {
    std::vector<ChainRecord> recs;
    for (int i = 1; i <= 10; ++i) {
        ChainRecord r;
        r.iter = static_cast<std::uint64_t>(i);
        r.x = Vector::Constant(2, static_cast<double>(i));
        recs.push_back(r);
    }
    auto s = component_series(recs, 0, 4);
    REQUIRE(s.size() == 6);
    CHECK(s.front() == 5.0);
    CHECK(s.back() == 10.0);
    CHECK_THROWS_AS(component_series(recs, 2, 0), DiagnosticsError);
}

TEST_CASE("component stats tie the pieces together") {
    std::vector<double> x = ar1(0.5, 100000, Rng(75, 0));
    ComponentStats st = component_stats(x);
    CHECK(st.mean == doctest::Approx(0.0).epsilon(0.05));
    CHECK(st.sd == doctest::Approx(1.0).epsilon(0.05));
    CHECK(st.tau == doctest::Approx(3.0).epsilon(0.15));
    CHECK(st.se ==
          doctest::Approx(st.sd * std::sqrt(st.tau / 100000.0)).epsilon(1e-12));
    CHECK(st.window_closed);
    CHECK_THROWS_AS(component_stats({1.0}), DiagnosticsError);
}
