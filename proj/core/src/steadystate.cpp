#include "grpsis/steadystate.hpp"

#include "grpsis/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace grpsis {

namespace {

void require_positive(double value, const char* what) {
    if (!(value > 0.0)) throw std::invalid_argument(std::string(what) + " must be positive");
}

} // namespace

SteadyStateSummary steady_densities(const RecoveryDistribution& dist, double beta, double mean_k) {
    require_positive(beta, "beta");
    require_positive(mean_k, "mean_k");
    SteadyStateSummary s;
    s.effective_rate = beta * dist.mean();
    s.threshold = 1.0 / mean_k;
    s.gap = s.effective_rate - s.threshold;
    s.rho_I_inf = s.effective_rate > s.threshold ? (s.effective_rate - s.threshold) / s.effective_rate : 0.0;
    s.rho_S_inf = 1.0 - s.rho_I_inf;
    if (dist.has_second_moment()) s.expected_age = steady_age_mean(dist);
    return s;
}

double critical_beta(const RecoveryDistribution& dist, double mean_k) {
    require_positive(mean_k, "mean_k");
    return 1.0 / (mean_k * dist.mean());
}

double steady_age_pdf(const RecoveryDistribution& dist, double tau) {
    const double mean = dist.mean();
    return tau < 0.0 ? 0.0 : dist.survival(tau) / mean;
}

double steady_age_mean(const RecoveryDistribution& dist) {
    return dist.second_moment() / (2.0 * dist.mean());
}

double integral_equation_residual(const RecoveryDistribution& dist, double beta, double mean_k, double tau) {
    const SteadyStateSummary s = steady_densities(dist, beta, mean_k);
    auto loss = [&](double u) {
        const double f = steady_age_pdf(dist, u);
        return f > 0.0 ? dist.hazard(u) * f : 0.0;
    };
    const double integral = tau > 0.0 ? quad::integrate(loss, 0.0, tau, 1e-12) : 0.0;
    return steady_age_pdf(dist, tau) + integral - beta * mean_k * s.rho_S_inf;
}

namespace table1 {

double exponential_age_pdf(double mu, double tau) { return tau < 0.0 ? 0.0 : mu * std::exp(-mu * tau); }

double exponential_age_mean(double mu) { return 1.0 / mu; }

double exponential_rho_S(double mu, double beta, double mean_k) { return mu / (beta * mean_k); }

double powerlaw_age_pdf(double lambda, double t0, double tau) {
    if (tau < 0.0) return 0.0;
    const double plateau = (lambda - 2.0) / (lambda - 1.0) / t0;
    return tau <= t0 ? plateau : plateau * std::pow(tau / t0, 1.0 - lambda);
}

double powerlaw_age_mean(double lambda, double t0) {
    if (!(lambda > 3.0)) throw std::domain_error("moment diverges: power-law E[W^2] needs lambda > 3");
    return (lambda - 2.0) / (lambda - 3.0) * t0 / 2.0;
}

double powerlaw_rho_S(double lambda, double t0, double beta, double mean_k) {
    return (lambda - 2.0) / (lambda - 1.0) / t0 / (beta * mean_k);
}

double lognormal_age_pdf(double mu, double sigma, double tau) {
    if (tau < 0.0) return 0.0;
    const double scale = std::exp(mu + sigma * sigma / 2.0);
    if (tau == 0.0) return 1.0 / scale;
    return std::erfc((std::log(tau) - mu) / (std::sqrt(2.0) * sigma)) / (2.0 * scale);
}

double lognormal_age_mean(double mu, double sigma) { return 0.5 * std::exp(mu + 1.5 * sigma * sigma); }

double lognormal_rho_S(double mu, double sigma, double beta, double mean_k) {
    return std::exp(-mu - sigma * sigma / 2.0) / (beta * mean_k);
}

} // namespace table1

} // namespace grpsis
