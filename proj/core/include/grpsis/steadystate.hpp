#pragma once

#include "grpsis/recovery_dist.hpp"

#include <optional>

namespace grpsis {

struct SteadyStateSummary {
    double effective_rate = 0.0;  // tau = beta E[W]
    double threshold = 0.0;       // tau_c = 1 / <k>
    double rho_I_inf = 0.0;
    double rho_S_inf = 1.0;
    std::optional<double> expected_age; // E[T(inf)], present when E[W^2] exists
    double gap = 0.0;             // tau - tau_c; small values flag absorption-prone regimes
};

/// Steady infection and susceptible densities on a homogeneous network:
/// rho_I = (tau - tau_c) / tau above threshold, 0 otherwise.
SteadyStateSummary steady_densities(const RecoveryDistribution& dist, double beta, double mean_k);

/// The beta at which beta E[W] equals 1 / <k>.
double critical_beta(const RecoveryDistribution& dist, double mean_k);

/// Steady-state infection-age density F0(tau) / E[W] (0 for tau < 0).
double steady_age_pdf(const RecoveryDistribution& dist, double tau);

/// E[T(inf)] = E[W^2] / (2 E[W]). Throws "moment diverges" without a finite second moment.
double steady_age_mean(const RecoveryDistribution& dist);

/// Residual of f(tau) + int_0^tau hazard(s) f(s) ds - beta <k> rho_S(inf) for f = steady_age_pdf.
double integral_equation_residual(const RecoveryDistribution& dist, double beta, double mean_k, double tau);

/// Distribution-specific closed forms, kept independent of the generic F0 / E[W] route so the
/// two can be checked against each other.
namespace table1 {

double exponential_age_pdf(double mu, double tau);
double exponential_age_mean(double mu);
double exponential_rho_S(double mu, double beta, double mean_k);

double powerlaw_age_pdf(double lambda, double t0, double tau);
double powerlaw_age_mean(double lambda, double t0);
double powerlaw_rho_S(double lambda, double t0, double beta, double mean_k);

double lognormal_age_pdf(double mu, double sigma, double tau);
double lognormal_age_mean(double mu, double sigma);
double lognormal_rho_S(double mu, double sigma, double beta, double mean_k);

} // namespace table1

} // namespace grpsis
