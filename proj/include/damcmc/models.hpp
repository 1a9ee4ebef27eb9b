#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <vector>

#include "damcmc/target.hpp"

namespace damcmc {

// ---------------------------------------------------------------------------
// Analytic pair (2 parameters, 3 observables).
//
// coarse(x) = A x, fine(x) = A x + eps * b(x) with b(x) = (x1^2, x1 x2, x2^2).
// With eps = 0 the two models coincide and the posterior under a Gaussian
// prior is exactly Gaussian, which gives a closed-form reference; with
// eps > 0 the model error B(x) = eps * b(x) is a smooth low-order surface
// that posterior-sample error models can estimate.
// ---------------------------------------------------------------------------

struct AnalyticSpec {
    Matrix a;             // 3x2, full column rank
    double epsilon = 0.1;

    static AnalyticSpec defaults();
};

std::shared_ptr<const ForwardModelPair> make_analytic_pair(
    const AnalyticSpec& spec);

// b(x) for the analytic fine model, exposed for quadrature references.
Vector analytic_quadratic_terms(const Vector& x);

// ---------------------------------------------------------------------------
// 1-D transient diffusion, finite volumes, implicit Euler.
//
//   du/dt = d/ds ( kappa(s) du/ds )   on (0, length),
//   u(s, 0) = 0,
//   influx Neumann condition at s = 0 (prescribed flux into the domain),
//   u = 0 Dirichlet at s = length (or sealed, for conservation tests).
//
// kappa is piecewise constant on `zones` equal zones; the parameters are
// log10 conductivities per zone.  Interface conductivities are harmonic
// means.  Observations are u at sensor positions (linear interpolation
// between cell centers) at obs_count equally spaced times.
// ---------------------------------------------------------------------------

struct FvSpec {
    int zones = 8;
    double kappa_log_lo = -2.0;  // parameter bounds, log10 units
    double kappa_log_hi = 2.0;
    int cells = 256;
    int steps = 100;
    double length = 1.0;
    double horizon = 1.0;
    double influx = 1.0;
    enum class RightBc { DirichletZero, Sealed };
    RightBc right_bc = RightBc::DirichletZero;
    std::vector<double> sensor_fracs = {0.125, 0.375, 0.625, 0.875};
    int obs_count = 10;

    int observation_dim() const {
        return obs_count * static_cast<int>(sensor_fracs.size());
    }
    void validate() const;

    static FvSpec fine_default();    // 256 cells, 100 steps
    static FvSpec coarse_default();  // 16 cells, 20 steps
};

// Low-level solver: conductivity per cell, optional initial profile
// (empty means u = 0), returns the final cell profile after all steps.
// total_mass_out, when non-null, receives sum(u) * ds after the last step.
Vector fv_solve(const FvSpec& spec, const Vector& kappa_cells,
                const Vector& initial, double* total_mass_out = nullptr);

// Full observation operator: log10 zone conductivities -> sensor readings,
// ordered time-major (all sensors at t_1, then all sensors at t_2, ...).
Vector fv_observe(const FvSpec& spec, const Vector& x_log10);

std::shared_ptr<const ForwardModelPair> make_fv_pair(const FvSpec& fine,
                                                     const FvSpec& coarse);

// Parameter bounds implied by an FvSpec ([kappa_log_lo, kappa_log_hi] per
// zone).
Bounds fv_bounds(const FvSpec& spec);

// ---------------------------------------------------------------------------
// Synthetic data.  Data are always generated with the FINE model; committing
// the inverse crime (generating with the model later used for inversion's
// cheap stage) hides model error and is exercised only by a dedicated
// negative test that calls the coarse model directly.
// ---------------------------------------------------------------------------

struct SyntheticData {
    Vector data;        // noise-free fine output + noise
    Vector noise_free;  // fine(x_true)
    Vector x_true;
    double sigma = 0.0;       // observation noise sd actually applied
    std::uint64_t seed = 0;   // rng seed used
    std::uint64_t stream = 0; // rng stream used
};

// sigma_abs > 0 takes precedence; otherwise sigma = sigma_frac_of_max *
// max_i |noise-free_i|.
SyntheticData generate_synthetic_data(const ForwardModelPair& pair,
                                      const Vector& x_true,
                                      double sigma_frac_of_max,
                                      double sigma_abs, Rng rng);

// ---------------------------------------------------------------------------
// Discrete toy chain: 7 states, unnormalized target and first-stage table,
// nearest-neighbour proposal (left/right with probability 1/2 each;
// off-the-end proposals are out of support).
// ---------------------------------------------------------------------------

struct DiscreteToy {
    static constexpr int kStates = 7;
    static const std::array<double, kStates>& target();     // 1 2 3 4 3 2 1
    static const std::array<double, kStates>& surrogate();  // 2 2 3 3 3 2 2
};

}  // namespace damcmc
