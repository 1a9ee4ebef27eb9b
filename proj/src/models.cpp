#include "damcmc/models.hpp"

#include <cmath>
#include <string>

namespace damcmc {

// ----------------------------------------------------------------- analytic

AnalyticSpec AnalyticSpec::defaults() {
    AnalyticSpec s;
    s.a = Matrix(3, 2);
    s.a << 1.0, 0.0,
           0.0, 1.0,
           1.0, 1.0;
    s.epsilon = 0.1;
    return s;
}

Vector analytic_quadratic_terms(const Vector& x) {
    if (x.size() != 2)
        throw DimensionError("analytic model expects 2 parameters");
    Vector b(3);
    b << x[0] * x[0], x[0] * x[1], x[1] * x[1];
    return b;
}

namespace {

class AnalyticCoarse : public ForwardModel {
public:
    explicit AnalyticCoarse(Matrix a) : a_(std::move(a)) {}
    int input_dim() const override { return 2; }
    int output_dim() const override { return 3; }
    Vector evaluate(const Vector& x) const override { return a_ * x; }

private:
    Matrix a_;
};

class AnalyticFine : public ForwardModel {
public:
    AnalyticFine(Matrix a, double eps) : a_(std::move(a)), eps_(eps) {}
    int input_dim() const override { return 2; }
    int output_dim() const override { return 3; }
    Vector evaluate(const Vector& x) const override {
        return a_ * x + eps_ * analytic_quadratic_terms(x);
    }

private:
    Matrix a_;
    double eps_;
};

}  // namespace

std::shared_ptr<const ForwardModelPair> make_analytic_pair(
    const AnalyticSpec& spec) {
    if (spec.a.rows() != 3 || spec.a.cols() != 2)
        throw DimensionError("analytic spec: A must be 3x2");
    Eigen::FullPivLU<Matrix> lu(spec.a);
    if (lu.rank() != 2)
        throw ConfigError("analytic spec: A must have full column rank");
    return std::make_shared<ForwardModelPair>(
        std::make_shared<AnalyticFine>(spec.a, spec.epsilon),
        std::make_shared<AnalyticCoarse>(spec.a));
}

// ----------------------------------------------------------------------- fv

void FvSpec::validate() const {
    if (zones < 1) throw ConfigError("fv: zones must be >= 1");
    if (cells < zones || cells % zones != 0)
        throw ConfigError("fv: cells must be a positive multiple of zones");
    if (steps < 1) throw ConfigError("fv: steps must be >= 1");
    if (obs_count < 1) throw ConfigError("fv: obs_count must be >= 1");
    if (steps % obs_count != 0)
        throw ConfigError(
            "fv: steps must be a multiple of obs_count so observation times "
            "fall on step boundaries");
    if (!(length > 0.0) || !(horizon > 0.0))
        throw ConfigError("fv: length and horizon must be > 0");
    if (!(kappa_log_lo < kappa_log_hi))
        throw ConfigError("fv: conductivity bounds must satisfy lo < hi");
    if (sensor_fracs.empty()) throw ConfigError("fv: no sensors");
    double half_cell = 0.5 / cells;
    for (double f : sensor_fracs) {
        if (!(f >= half_cell && f <= 1.0 - half_cell))
            throw ConfigError(
                "fv: sensor positions must lie between the first and last "
                "cell centers");
    }
}

FvSpec FvSpec::fine_default() { return FvSpec{}; }

FvSpec FvSpec::coarse_default() {
    FvSpec s;
    s.cells = 16;
    s.steps = 20;
    return s;
}

namespace {

// One implicit Euler step: solve (I - dt*D) u_new = u_old + dt*src where D is
// the tridiagonal FV diffusion operator.  Thomas algorithm, O(cells).
struct Tridiag {
    Vector sub, diag, sup;  // sub[i] couples row i to i-1 (sub[0] unused)

    Vector solve(Vector rhs) const {
        const int n = static_cast<int>(diag.size());
        Vector c(n), d(n);
        c[0] = sup[0] / diag[0];
        d[0] = rhs[0] / diag[0];
        for (int i = 1; i < n; ++i) {
            double m = diag[i] - sub[i] * c[i - 1];
            c[i] = (i + 1 < n) ? sup[i] / m : 0.0;
            d[i] = (rhs[i] - sub[i] * d[i - 1]) / m;
        }
        Vector u(n);
        u[n - 1] = d[n - 1];
        for (int i = n - 2; i >= 0; --i) u[i] = d[i] - c[i] * u[i + 1];
        return u;
    }
};

}  // namespace

Vector fv_solve(const FvSpec& spec, const Vector& kappa_cells,
                const Vector& initial, double* total_mass_out) {
    spec.validate();
    const int n = spec.cells;
    if (kappa_cells.size() != n)
        throw DimensionError("fv_solve: kappa length != cells");
    for (int i = 0; i < n; ++i)
        if (!(kappa_cells[i] > 0.0) || !std::isfinite(kappa_cells[i]))
            throw ForwardModelError("fv_solve: non-positive conductivity");

    const double ds = spec.length / n;
    const double dt = spec.horizon / spec.steps;
    const double r = dt / (ds * ds);

    // Harmonic-mean interface conductivities (equal cell widths).
    Vector iface(n - 1);
    for (int i = 0; i + 1 < n; ++i)
        iface[i] = 2.0 * kappa_cells[i] * kappa_cells[i + 1] /
                   (kappa_cells[i] + kappa_cells[i + 1]);

    Tridiag m;
    m.sub = Vector::Zero(n);
    m.diag = Vector::Zero(n);
    m.sup = Vector::Zero(n);
    for (int i = 0; i < n; ++i) {
        double left = (i > 0) ? iface[i - 1] : 0.0;  // influx handled as source
        double right;
        if (i + 1 < n) {
            right = iface[i];
        } else if (spec.right_bc == FvSpec::RightBc::DirichletZero) {
            // Boundary value u=0 held at distance ds/2 from the last center.
            right = 2.0 * kappa_cells[n - 1];
        } else {
            right = 0.0;  // sealed
        }
        m.diag[i] = 1.0 + r * (left + right);
        if (i > 0) m.sub[i] = -r * left;
        if (i + 1 < n) m.sup[i] = -r * right;
    }

    Vector u;
    if (initial.size() == 0) {
        u = Vector::Zero(n);
    } else if (initial.size() == n) {
        u = initial;
    } else {
        throw DimensionError("fv_solve: initial profile length != cells");
    }

    const double src = spec.influx * dt / ds;  // flux into cell 0 each step
    for (int k = 0; k < spec.steps; ++k) {
        Vector rhs = u;
        rhs[0] += src;
        u = m.solve(rhs);
        if (!u.allFinite())
            throw ForwardModelError("fv_solve: non-finite state at step " +
                                    std::to_string(k + 1));
    }
    if (total_mass_out) *total_mass_out = u.sum() * ds;
    return u;
}

namespace {

// Sensor readings by linear interpolation between cell centers.
double interp_at(const Vector& u, double ds, double s) {
    const int n = static_cast<int>(u.size());
    double pos = s / ds - 0.5;  // index coordinate in cell centers
    int i = static_cast<int>(std::floor(pos));
    if (i < 0) return u[0];
    if (i >= n - 1) return u[n - 1];
    double w = pos - i;
    return (1.0 - w) * u[i] + w * u[i + 1];
}

Vector kappa_from_zones(const FvSpec& spec, const Vector& x_log10) {
    if (x_log10.size() != spec.zones)
        throw DimensionError("fv: parameter length != zones");
    const int per = spec.cells / spec.zones;
    Vector kappa(spec.cells);
    for (int i = 0; i < spec.cells; ++i) {
        double lg = x_log10[i / per];
        if (!std::isfinite(lg))
            throw ForwardModelError("fv: non-finite log-conductivity");
        kappa[i] = std::pow(10.0, lg);
    }
    return kappa;
}

}  // namespace

Vector fv_observe(const FvSpec& spec, const Vector& x_log10) {
    spec.validate();
    const int n = spec.cells;
    const double ds = spec.length / n;
    Vector kappa = kappa_from_zones(spec, x_log10);

    // Re-run the stepping here (rather than calling fv_solve repeatedly) so
    // sensors are sampled at intermediate observation times in one sweep.
    FvSpec one = spec;
    const int stride = spec.steps / spec.obs_count;
    one.steps = stride;
    one.obs_count = 1;  // the sub-solve spans exactly one observation period
    one.horizon = spec.horizon * stride / spec.steps;

    const int ns = static_cast<int>(spec.sensor_fracs.size());
    Vector out(spec.observation_dim());
    Vector u = Vector::Zero(n);
    for (int k = 0; k < spec.obs_count; ++k) {
        u = fv_solve(one, kappa, u);
        for (int j = 0; j < ns; ++j)
            out[k * ns + j] =
                interp_at(u, ds, spec.sensor_fracs[j] * spec.length);
    }
    return out;
}

namespace {

class FvModel : public ForwardModel {
public:
    explicit FvModel(FvSpec spec) : spec_(std::move(spec)) {
        spec_.validate();
    }
    int input_dim() const override { return spec_.zones; }
    int output_dim() const override { return spec_.observation_dim(); }
    Vector evaluate(const Vector& x) const override {
        return fv_observe(spec_, x);
    }

private:
    FvSpec spec_;
};

}  // namespace

std::shared_ptr<const ForwardModelPair> make_fv_pair(const FvSpec& fine,
                                                     const FvSpec& coarse) {
    if (fine.zones != coarse.zones)
        throw ConfigError("fv pair: zone counts differ");
    if (fine.observation_dim() != coarse.observation_dim())
        throw ConfigError("fv pair: observation layouts differ");
    return std::make_shared<ForwardModelPair>(
        std::make_shared<FvModel>(fine), std::make_shared<FvModel>(coarse));
}

Bounds fv_bounds(const FvSpec& spec) {
    return Bounds::box(Vector::Constant(spec.zones, spec.kappa_log_lo),
                       Vector::Constant(spec.zones, spec.kappa_log_hi));
}

// ------------------------------------------------------------ synthetic data

SyntheticData generate_synthetic_data(const ForwardModelPair& pair,
                                      const Vector& x_true,
                                      double sigma_frac_of_max,
                                      double sigma_abs, Rng rng) {
    SyntheticData d;
    d.x_true = x_true;
    d.noise_free = pair.eval_fine(x_true);  // fine model, always
    if (sigma_abs > 0.0) {
        d.sigma = sigma_abs;
    } else {
        if (!(sigma_frac_of_max > 0.0))
            throw ConfigError("synthetic data: need sigma_abs or sigma_frac");
        d.sigma = sigma_frac_of_max * d.noise_free.cwiseAbs().maxCoeff();
        if (!(d.sigma > 0.0))
            throw ConfigError(
                "synthetic data: noise-free signal is identically zero, "
                "cannot scale noise to it");
    }
    d.seed = rng.seed();
    d.stream = rng.stream();
    d.data = d.noise_free;
    for (int i = 0; i < d.data.size(); ++i) d.data[i] += d.sigma * rng.normal();
    return d;
}

// -------------------------------------------------------------- discrete toy

const std::array<double, DiscreteToy::kStates>& DiscreteToy::target() {
    static const std::array<double, kStates> t = {1, 2, 3, 4, 3, 2, 1};
    return t;
}

const std::array<double, DiscreteToy::kStates>& DiscreteToy::surrogate() {
    static const std::array<double, kStates> s = {2, 2, 3, 3, 3, 2, 2};
    return s;
}

}  // namespace damcmc
