#pragma once

#include "grpsis/recovery_dist.hpp"

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace grpsis {

/// Parameters of the classical (exponential-recovery) SIS mean-field ODE
/// d rho/dt = beta k rho (1 - rho) - mu rho.
struct ClassicalSISParams {
    double beta = 0.0;
    double mu = 0.0;
    double mean_k = 0.0;
    double rho_I0 = 0.0;

    void validate() const;
};

/// Closed-form logistic solution with rho(0) = rho_I0. Handles beta k == mu through the
/// hyperbolic limit 1 / (1/rho_I0 + beta k t).
double classical_sis_solution(const ClassicalSISParams& p, double t);

/// t -> infinity limit: max(0, 1 - mu / (beta k)).
double classical_sis_limit(const ClassicalSISParams& p);

struct PdeOptions {
    double dt = 0.01;                    // shared step of the t and tau axes
    std::optional<double> tau_max;       // default: T + upper 1e-6 quantile of W
    std::vector<double> slice_times;     // times at which to keep the full age profile
    std::size_t slice_stride = 0;        // additionally keep every n-th step (0 = off)
};

/// Age profile rho(t, tau_j) at one time step; tau_j = j * dt, rho(t, 0) = 0.
struct AgeSlice {
    std::size_t step = 0;
    double t = 0.0;
    std::vector<double> density;

    /// rho_I(t; tau): infected fraction with infection age <= tau.
    double cumulative(double tau, double dt) const;
};

/// Output of the age-structured solver. Only the marginals, the requested slices and the final
/// slice are kept; the full (t, tau) array is never materialised.
struct AgeDensityGrid {
    double dt = 0.0;
    std::size_t n_t = 0;     // time points 0..T
    std::size_t n_tau = 0;   // age nodes 0..tau_max
    std::vector<double> rho_I_t;
    std::vector<double> rho_S_t;
    std::vector<AgeSlice> slices; // in increasing time, the final step always last
    double leaked_mass = 0.0;     // infected mass pushed past tau_max over the whole run
    std::vector<std::string> warnings;

    double tau_max() const { return dt * static_cast<double>(n_tau - 1); }
    double time(std::size_t step) const { return dt * static_cast<double>(step); }
    const AgeSlice& final_slice() const { return slices.back(); }
    /// Slice stored for exactly this step; throws std::out_of_range if it was not kept.
    const AgeSlice& slice_at(std::size_t step) const;
};

/// Density over infection age at t = 0; an empty function means every initial infected is new.
using AgeDensityFn = std::function<double(double)>;

/// Solves the grp-SIS age-structured mean-field equation by the method of characteristics:
/// rho(t+dt, tau+dt) = rho(t, tau) F0(tau+dt) / F0(tau), newborn inflow beta k rho_S rho_I at the
/// first age node, marginals by trapezoid quadrature over tau.
AgeDensityGrid solve_grp_pde(const RecoveryDistribution& dist, double beta, double mean_k, double rho_I0,
                             const AgeDensityFn& initial_age_density, double horizon, const PdeOptions& options = {});

/// Cumulative initial profile tau -> rho_I(0; tau); empty means all mass at age 0.
using CumulativeFn = std::function<double(double)>;

/// Exponential-recovery age-resolved solution
/// rho_I(t; tau) = beta k int_0^min(t,tau) rho_S rho_I (t - xi) e^{-mu xi} dxi + rho_I(0; tau - t) e^{-mu t},
/// integrated numerically over the classical logistic solution.
double exp_case_convolution(double mu, double beta, double mean_k, double rho_I0,
                            const CumulativeFn& initial_cumulative, double t, double tau);

/// Binary dump: magic "GRPSISAG", u32 version, f64 dt, u64 n_t, u64 n_tau, u64 slice count,
/// f64 leaked mass, then rho_I_t (n_t values) and each slice as u64 step + n_tau densities.
/// All values little-endian as laid out in memory.
void write_age_grid(std::ostream& out, const AgeDensityGrid& grid);
AgeDensityGrid read_age_grid(std::istream& in);

} // namespace grpsis
