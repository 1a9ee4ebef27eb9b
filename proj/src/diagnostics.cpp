#include "damcmc/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>

#include <unsupported/Eigen/FFT>

#include "damcmc/errors.hpp"

namespace damcmc {

namespace {

// Above this many multiply-adds the direct autocovariance loop loses to the
// padded FFT round trip.
constexpr double kDirectBudget = 1e8;

std::vector<double> autocov_direct(const std::vector<double>& x, double mean,
                                   int max_lag) {
    const int n = static_cast<int>(x.size());
    std::vector<double> c(static_cast<size_t>(max_lag) + 1, 0.0);
    for (int k = 0; k <= max_lag; ++k) {
        double s = 0.0;
        for (int t = 0; t + k < n; ++t) s += (x[t] - mean) * (x[t + k] - mean);
        c[k] = s / n;
    }
    return c;
}

std::vector<double> autocov_fft(const std::vector<double>& x, double mean,
                                int max_lag) {
    const int n = static_cast<int>(x.size());
    size_t m = 1;
    while (m < static_cast<size_t>(n) + static_cast<size_t>(max_lag) + 1) m <<= 1;
    std::vector<double> padded(m, 0.0);
    for (int t = 0; t < n; ++t) padded[t] = x[t] - mean;

    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> freq;
    fft.fwd(freq, padded);
    for (auto& f : freq) f = std::norm(f);
    std::vector<double> corr;
    fft.inv(corr, freq);

    std::vector<double> c(static_cast<size_t>(max_lag) + 1);
    for (int k = 0; k <= max_lag; ++k) c[k] = corr[k] / n;
    return c;
}

}  // namespace

std::vector<double> autocorrelation(const std::vector<double>& series,
                                    int max_lag) {
    const int n = static_cast<int>(series.size());
    if (n < 2)
        throw DiagnosticsError("autocorrelation: need at least two points");
    if (max_lag <= 0) max_lag = n / 4;
    max_lag = std::min(max_lag, n - 1);

    // Compensated mean: naive summation drift of order n*eps*|v| would lift
    // c0 of a constant series above the zero-variance floor below.
    double sum = 0.0, comp = 0.0;
    for (double v : series) {
        const double t = v - comp;
        const double u = sum + t;
        comp = (u - sum) - t;
        sum = u;
    }
    const double mean = sum / n;
    double c0 = 0.0;
    for (double v : series) c0 += (v - mean) * (v - mean);
    c0 /= n;
    // Relative-to-scale zero test: a constant series has no autocorrelation.
    if (c0 <= 1e-28 * (mean * mean + 1.0))
        throw DiagnosticsError(
            "autocorrelation: series is constant (variance ~ 0)");

    const bool direct =
        static_cast<double>(n) * static_cast<double>(max_lag) <= kDirectBudget;
    std::vector<double> c = direct ? autocov_direct(series, mean, max_lag)
                                   : autocov_fft(series, mean, max_lag);
    std::vector<double> rho(c.size());
    rho[0] = 1.0;
    for (size_t k = 1; k < c.size(); ++k) rho[k] = c[k] / c[0];
    return rho;
}

IactResult iact(const std::vector<double>& series, int max_lag, double c) {
    const std::vector<double> rho = autocorrelation(series, max_lag);
    const auto n = static_cast<double>(series.size());

    IactResult r;
    r.window_closed = false;
    double tau = 1.0;
    int m = 0;
    for (size_t k = 1; k < rho.size(); ++k) {
        tau += 2.0 * rho[k];
        m = static_cast<int>(k);
        if (static_cast<double>(m) >= c * tau) {
            r.window_closed = true;
            break;
        }
    }
    r.window = m;
    // A heavily antithetic window sum can dip nonpositive; that is not a
    // usable time scale, so flag it instead of dividing by it.
    if (tau <= 0.0) {
        tau = 1e-12;
        r.window_closed = false;
    }
    r.tau = tau;
    r.ess = n / tau;
    return r;
}

double speedup_factor(double tau_ref, double tau_da, double stage1_rate,
                      double cost_ratio) {
    if (!(tau_ref > 0.0) || !(tau_da > 0.0))
        throw DiagnosticsError("speedup_factor: autocorrelation times must be positive");
    if (!(stage1_rate >= 0.0) || !(stage1_rate <= 1.0))
        throw DiagnosticsError("speedup_factor: stage-one rate must lie in [0,1]");
    if (!(cost_ratio >= 0.0))
        throw DiagnosticsError("speedup_factor: cost ratio must be nonnegative");
    const double denom = stage1_rate + cost_ratio;
    if (denom <= 0.0)
        throw DiagnosticsError("speedup_factor: zero per-iteration cost");
    return (tau_ref / tau_da) / denom;
}

AcceptanceSummary acceptance_summary(const std::vector<ChainRecord>& records,
                                     std::uint64_t burnin) {
    AcceptanceSummary s;
    for (const ChainRecord& r : records) {
        if (r.iter <= burnin) continue;
        ++s.n;
        if (r.acc1) ++s.acc1;
        if (r.acc2 >= 0 && r.acc1) {
            ++s.promoted;
            if (r.acc2 > 0) ++s.acc2;
        }
    }
    if (s.n) s.rate1 = static_cast<double>(s.acc1) / static_cast<double>(s.n);
    if (s.promoted)
        s.beta_bar = static_cast<double>(s.acc2) / static_cast<double>(s.promoted);
    return s;
}

std::vector<double> component_series(const std::vector<ChainRecord>& records,
                                     int component, std::uint64_t burnin) {
    std::vector<double> out;
    out.reserve(records.size());
    for (const ChainRecord& r : records) {
        if (r.iter <= burnin) continue;
        if (component < 0 || component >= r.x.size())
            throw DiagnosticsError("component_series: component out of range");
        out.push_back(r.x[component]);
    }
    return out;
}

ComponentStats component_stats(const std::vector<double>& series) {
    const auto n = static_cast<double>(series.size());
    if (series.size() < 2)
        throw DiagnosticsError("component_stats: need at least two points");
    ComponentStats st;
    st.mean = std::accumulate(series.begin(), series.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : series) ss += (v - st.mean) * (v - st.mean);
    st.sd = std::sqrt(ss / (n - 1.0));

    const IactResult r = iact(series);
    st.tau = r.tau;
    st.ess = r.ess;
    st.window_closed = r.window_closed;
    st.se = st.sd * std::sqrt(r.tau / n);
    return st;
}

}  // namespace damcmc
