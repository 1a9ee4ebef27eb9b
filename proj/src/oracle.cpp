#include "damcmc/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "damcmc/errors.hpp"

namespace damcmc {

namespace {

void check_masses(const std::vector<double>& w, const char* what) {
    if (w.size() < 2) throw Error(std::string(what) + ": need at least two states");
    double total = 0.0;
    for (double v : w) {
        if (!std::isfinite(v) || v < 0.0)
            throw Error(std::string(what) + ": masses must be finite and nonnegative");
        total += v;
    }
    if (total <= 0.0) throw Error(std::string(what) + ": all masses are zero");
}

// min{1, w(y)/w(x)} with the zero-mass conventions spelled out in the header.
double mh_alpha(double wx, double wy) {
    if (wy <= 0.0) return 0.0;
    if (wx <= 0.0) return 1.0;
    return std::min(1.0, wy / wx);
}

// Fills the diagonal with the rejected mass of each row.
void absorb_diagonal(Matrix& k) {
    for (Eigen::Index i = 0; i < k.rows(); ++i) {
        double off = 0.0;
        for (Eigen::Index j = 0; j < k.cols(); ++j)
            if (j != i) off += k(i, j);
        k(i, i) = 1.0 - off;
    }
}

Vector normalized(const std::vector<double>& w) {
    Vector pi = Eigen::Map<const Vector>(w.data(), static_cast<Eigen::Index>(w.size()));
    return pi / pi.sum();
}

}  // namespace

Matrix enumerate_da_kernel(const DiscreteDaSpec& spec) {
    check_masses(spec.target, "da kernel target");
    check_masses(spec.surrogate, "da kernel surrogate");
    if (spec.target.size() != spec.surrogate.size())
        throw Error("da kernel: target and surrogate sizes differ");

    const int n = static_cast<int>(spec.target.size());
    Matrix k = Matrix::Zero(n, n);
    for (int x = 0; x < n; ++x) {
        for (int dir : {-1, 1}) {
            const int y = x + dir;
            if (y < 0 || y >= n) continue;
            const double a_fwd = mh_alpha(spec.surrogate[x], spec.surrogate[y]);
            if (a_fwd <= 0.0) continue;
            const double a_rev = mh_alpha(spec.surrogate[y], spec.surrogate[x]);
            const double num = spec.target[y] * a_rev;
            const double den = spec.target[x] * a_fwd;
            const double beta =
                den <= 0.0 ? (num > 0.0 ? 1.0 : 0.0) : std::min(1.0, num / den);
            k(x, y) = 0.5 * a_fwd * beta;
        }
    }
    absorb_diagonal(k);
    return k;
}

Matrix enumerate_mh_kernel(const std::vector<double>& target) {
    check_masses(target, "mh kernel");
    const int n = static_cast<int>(target.size());
    Matrix k = Matrix::Zero(n, n);
    for (int x = 0; x < n; ++x) {
        for (int dir : {-1, 1}) {
            const int y = x + dir;
            if (y < 0 || y >= n) continue;
            k(x, y) = 0.5 * mh_alpha(target[x], target[y]);
        }
    }
    absorb_diagonal(k);
    return k;
}

Matrix enumerate_stage1_only_kernel(const DiscreteDaSpec& spec) {
    check_masses(spec.target, "stage1 kernel target");
    Matrix k = enumerate_mh_kernel(spec.surrogate);
    return k;
}

double stationarity_residual(const Matrix& kernel,
                             const std::vector<double>& target) {
    check_masses(target, "stationarity");
    if (kernel.rows() != kernel.cols() ||
        kernel.rows() != static_cast<Eigen::Index>(target.size()))
        throw DimensionError("stationarity: kernel/target size mismatch");
    const Vector pi = normalized(target);
    const Vector after = kernel.transpose() * pi;
    return (after - pi).cwiseAbs().maxCoeff();
}

double detailed_balance_residual(const Matrix& kernel,
                                 const std::vector<double>& target) {
    check_masses(target, "detailed balance");
    if (kernel.rows() != kernel.cols() ||
        kernel.rows() != static_cast<Eigen::Index>(target.size()))
        throw DimensionError("detailed balance: kernel/target size mismatch");
    const Vector pi = normalized(target);
    double worst = 0.0;
    for (Eigen::Index x = 0; x < kernel.rows(); ++x)
        for (Eigen::Index y = x + 1; y < kernel.cols(); ++y)
            worst = std::max(worst,
                             std::abs(pi[x] * kernel(x, y) - pi[y] * kernel(y, x)));
    return worst;
}

}  // namespace damcmc
