#include "grpsis/meanfield.hpp"
#include "grpsis/steadystate.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

namespace {

using namespace grpsis;

const ClassicalSISParams kFig3a{0.26, 0.5, 10.0, 0.3};

double sup_error_against_classical(double dt) {
    const ExponentialRecovery dist(0.5);
    PdeOptions options;
    options.dt = dt;
    const auto grid = solve_grp_pde(dist, 0.26, 10.0, 0.3, {}, 50.0, options);
    double worst = 0.0;
    for (std::size_t n = 0; n < grid.n_t; ++n)
        worst = std::max(worst, std::abs(grid.rho_I_t[n] - classical_sis_solution(kFig3a, grid.time(n))));
    return worst;
}

TEST(ClassicalSis, Examples) {
    EXPECT_EQ(classical_sis_solution(kFig3a, 0.0), 0.3);
    EXPECT_NEAR(classical_sis_limit(kFig3a), 1.0 - 0.5 / 2.6, 1e-15);
    EXPECT_NEAR(classical_sis_solution(kFig3a, 500.0), 0.8076923, 1e-6);
    const ClassicalSISParams sub{0.04, 0.5, 10.0, 0.3};
    EXPECT_EQ(classical_sis_limit(sub), 0.0);
    EXPECT_LT(classical_sis_solution(sub, 200.0), 1e-8);
}

TEST(ClassicalSis, MatchesNumericalIntegrationOfTheLogisticOde) {
    for (const ClassicalSISParams& p : {kFig3a, ClassicalSISParams{0.05, 0.5, 10.0, 0.3},
                                        ClassicalSISParams{0.02, 0.5, 10.0, 0.6}, ClassicalSISParams{1.0, 2.0, 4.0, 0.01}}) {
        std::vector<double> times;
        for (int i = 0; i <= 200; ++i) times.push_back(0.25 * i);
        const auto ode = oracle::classical_sis_ode(p.beta, p.mu, p.mean_k, p.rho_I0, times);
        for (std::size_t i = 0; i < times.size(); ++i)
            EXPECT_NEAR(classical_sis_solution(p, times[i]), ode[i], 1e-9) << "beta=" << p.beta << " t=" << times[i];
    }
}

TEST(ClassicalSis, RejectsInvalidParameters) {
    EXPECT_THROW(classical_sis_solution(ClassicalSISParams{0.0, 0.5, 10.0, 0.3}, 1.0), std::invalid_argument);
    EXPECT_THROW(classical_sis_solution(ClassicalSISParams{0.1, 0.5, 10.0, 0.0}, 1.0), std::invalid_argument);
    EXPECT_THROW(classical_sis_solution(kFig3a, -1.0), std::invalid_argument);
}

TEST(GrpPde, ConstantHazardReducesToClassicalSis) {
    EXPECT_LT(sup_error_against_classical(0.01), 5e-3);
}

TEST(GrpPde, FirstOrderConvergence) {
    const double e1 = sup_error_against_classical(0.04);
    const double e2 = sup_error_against_classical(0.02);
    const double e3 = sup_error_against_classical(0.01);
    EXPECT_GE(e1 / e2, 1.7);
    EXPECT_LE(e1 / e2, 2.3);
    EXPECT_GE(e2 / e3, 1.7);
    EXPECT_LE(e2 / e3, 2.3);
}

TEST(GrpPde, AgeResolvedExponentialCaseMatchesConvolution) {
    const ExponentialRecovery dist(0.5);
    PdeOptions options;
    options.slice_times = {5.0, 20.0};
    const auto grid = solve_grp_pde(dist, 0.26, 10.0, 0.3, {}, 50.0, options);
    const double mid = grid.slice_at(500).cumulative(2.0, grid.dt);
    EXPECT_NEAR(mid, exp_case_convolution(0.5, 0.26, 10.0, 0.3, {}, 5.0, 2.0), 1e-3);
    for (double t : options.slice_times) {
        const auto& slice = grid.slice_at(static_cast<std::size_t>(std::llround(t / grid.dt)));
        for (double tau : {0.5, 2.0, 4.0, 10.0, 30.0}) {
            const double oracle = exp_case_convolution(0.5, 0.26, 10.0, 0.3, {}, t, tau);
            EXPECT_NEAR(slice.cumulative(tau, grid.dt), oracle, 1e-3) << "t=" << t << " tau=" << tau;
        }
    }
}

TEST(ExpCaseConvolution, Limits) {
    EXPECT_EQ(exp_case_convolution(0.5, 0.26, 10.0, 0.3, {}, 0.0, 2.0), 0.3);
    const auto initial = [](double tau) { return 0.3 * std::min(1.0, tau / 4.0); };
    EXPECT_EQ(exp_case_convolution(0.5, 0.26, 10.0, 0.3, initial, 0.0, 1.0), initial(1.0));
    for (double t : {0.5, 3.0, 10.0, 40.0})
        EXPECT_NEAR(exp_case_convolution(0.5, 0.26, 10.0, 0.3, {}, t, 1e6), classical_sis_solution(kFig3a, t), 1e-6)
            << "t=" << t;
}

TEST(GrpPde, ConservationAndMonotoneCumulative) {
    const LognormalRecovery dist(0.0, 1.0);
    PdeOptions options;
    options.slice_stride = 500;
    const auto grid = solve_grp_pde(dist, 0.33, 10.0, 0.3, {}, 50.0, options);
    for (std::size_t n = 0; n < grid.n_t; ++n) EXPECT_EQ(grid.rho_I_t[n] + grid.rho_S_t[n], 1.0);
    for (const auto& slice : grid.slices) {
        double previous = 0.0;
        for (double tau = 0.0; tau <= grid.tau_max(); tau += 0.37) {
            const double c = slice.cumulative(tau, grid.dt);
            EXPECT_GE(c, previous);
            previous = c;
        }
    }
}

TEST(GrpPde, PowerLawOscillatesIntoTheSteadyState) {
    const PowerLawRecovery dist(4.0, 1.0);
    const auto grid = solve_grp_pde(dist, 0.3, 10.0, 0.3, {}, 50.0);
    EXPECT_NEAR(grid.rho_I_t.back(), 0.778, 0.005);
    std::size_t direction_changes = 0;
    for (std::size_t n = 2; n < grid.n_t; ++n) {
        const double a = grid.rho_I_t[n - 1] - grid.rho_I_t[n - 2];
        const double b = grid.rho_I_t[n] - grid.rho_I_t[n - 1];
        if (a * b < 0.0) ++direction_changes;
    }
    EXPECT_GE(direction_changes, 2u);

    const auto& slice = grid.final_slice();
    const double rho = grid.rho_I_t.back();
    double l1 = 0.0;
    for (std::size_t j = 1; j < slice.density.size(); ++j) {
        const double tau = (static_cast<double>(j) - 0.5) * grid.dt;
        l1 += std::abs(slice.density[j] / rho - steady_age_pdf(dist, tau)) * grid.dt;
    }
    EXPECT_LT(l1, 0.02);
}

TEST(GrpPde, SubcriticalDecay) {
    const ExponentialRecovery dist(0.5);
    const auto grid = solve_grp_pde(dist, 0.03, 10.0, 0.3, {}, 50.0);
    for (std::size_t n = 1; n < grid.n_t; ++n) EXPECT_LE(grid.rho_I_t[n], grid.rho_I_t[n - 1] + 1e-15);
    EXPECT_LT(grid.rho_I_t.back(), 1e-3);
}

TEST(GrpPde, CustomInitialAgeDensity) {
    const ExponentialRecovery dist(0.5);
    const auto initial = [](double tau) { return tau <= 2.0 ? 0.15 : 0.0; };
    PdeOptions options;
    options.slice_times = {0.0};
    const auto grid = solve_grp_pde(dist, 0.26, 10.0, 0.3, initial, 20.0, options);
    EXPECT_NEAR(grid.rho_I_t.front(), 0.3, 1e-6);
    EXPECT_NEAR(grid.slice_at(0).cumulative(1.0, grid.dt), 0.15, 1e-9);
    // With exponential recovery the marginal forgets the initial age profile.
    for (std::size_t n = 0; n < grid.n_t; n += 100)
        EXPECT_NEAR(grid.rho_I_t[n], classical_sis_solution(kFig3a, grid.time(n)), 5e-3);
    const auto wrong_mass = [](double tau) { return tau <= 1.0 ? 0.5 : 0.0; };
    EXPECT_THROW(solve_grp_pde(dist, 0.26, 10.0, 0.3, wrong_mass, 20.0), std::invalid_argument);
}

TEST(GrpPde, ShortAgeGridWarnsAboutLeakedMass) {
    const PowerLawRecovery dist(4.0, 1.0);
    PdeOptions options;
    options.tau_max = 5.0;
    const auto grid = solve_grp_pde(dist, 0.3, 10.0, 0.3, {}, 20.0, options);
    EXPECT_GT(grid.leaked_mass, 1e-4);
    ASSERT_FALSE(grid.warnings.empty());
    EXPECT_NE(grid.warnings.front().find("tau_max truncation"), std::string::npos);
    const auto full = solve_grp_pde(dist, 0.3, 10.0, 0.3, {}, 20.0);
    EXPECT_TRUE(full.warnings.empty());
}

TEST(GrpPde, RejectsBadGrids) {
    const ExponentialRecovery dist(0.5);
    PdeOptions options;
    options.dt = 0.03;
    EXPECT_THROW(solve_grp_pde(dist, 0.26, 10.0, 0.3, {}, 1.0, options), std::invalid_argument);
    options.dt = 0.0;
    EXPECT_THROW(solve_grp_pde(dist, 0.26, 10.0, 0.3, {}, 1.0, options), std::invalid_argument);
}

TEST(AgeGridDump, RoundTrip) {
    const LognormalRecovery dist(0.0, 1.0);
    PdeOptions options;
    options.dt = 0.05;
    options.slice_times = {1.0, 2.5};
    const auto grid = solve_grp_pde(dist, 0.33, 10.0, 0.3, {}, 5.0, options);
    std::stringstream buffer;
    write_age_grid(buffer, grid);
    const auto back = read_age_grid(buffer);
    EXPECT_EQ(back.dt, grid.dt);
    EXPECT_EQ(back.n_t, grid.n_t);
    EXPECT_EQ(back.n_tau, grid.n_tau);
    EXPECT_EQ(back.rho_I_t, grid.rho_I_t);
    EXPECT_EQ(back.rho_S_t, grid.rho_S_t);
    EXPECT_EQ(back.leaked_mass, grid.leaked_mass);
    ASSERT_EQ(back.slices.size(), grid.slices.size());
    for (std::size_t i = 0; i < grid.slices.size(); ++i) {
        EXPECT_EQ(back.slices[i].step, grid.slices[i].step);
        EXPECT_EQ(back.slices[i].density, grid.slices[i].density);
    }
    std::stringstream garbage("not a dump at all");
    EXPECT_THROW(read_age_grid(garbage), std::runtime_error);
}

} // namespace
