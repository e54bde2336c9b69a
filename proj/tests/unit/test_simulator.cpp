#include "grpsis/simulator.hpp"
#include "grpsis/stats.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

namespace {

using namespace grpsis;

RegularNetwork small_graph(std::size_t n, std::size_t k, std::uint64_t seed = 3) {
    Rng rng(seed);
    return generate_regular(n, k, rng);
}

SimulationParams params(double beta, double horizon = 50.0) {
    SimulationParams p;
    p.beta = beta;
    p.horizon = horizon;
    p.check_invariants = false;
    return p;
}

TEST(Simulator, NoTransmissionMeansAbsorption) {
    const auto net = small_graph(200, 4);
    const ExponentialRecovery dist(1.0);
    const auto traj = simulate(net, dist, params(0.0), 1);
    EXPECT_TRUE(traj.absorbed);
    EXPECT_EQ(traj.rho_I.back(), 0.0);
    EXPECT_LT(traj.absorption_time, 50.0);
    EXPECT_TRUE(traj.final_ages.empty());
    for (std::size_t i = 0; i < traj.grid.size(); ++i) {
        if (traj.grid[i] >= traj.absorption_time) {
            EXPECT_EQ(traj.rho_I[i], 0.0);
        }
    }
}

TEST(Simulator, SingleNodeAbsorptionTimeFollowsTheRecoveryLaw) {
    const auto net = RegularNetwork::from_edges(1, {});
    const ExponentialRecovery dist(1.0);
    auto p = params(0.7);
    p.initial_infected = 1.0;
    std::vector<double> times;
    for (std::uint64_t s = 0; s < 5000; ++s) {
        const auto traj = simulate(net, dist, p, 1000 + s);
        ASSERT_TRUE(traj.absorbed);
        times.push_back(traj.absorption_time);
    }
    EXPECT_LT(ks_distance(times, [](double t) { return oracle::exponential_cdf(1.0, t); }), 0.03);
}

TEST(Simulator, TransmissionClockIsExponentialWithRateBeta) {
    const std::vector<Edge> pair{{0, 1}};
    const auto net = RegularNetwork::from_edges(2, pair);
    const oracle::NeverRecovers dist;
    const double beta = 0.8;
    auto p = params(beta, 1000.0);
    p.grid_dt = 1000.0;
    p.initial_infected = 0.5;
    std::vector<double> infection_times;
    for (std::uint64_t s = 0; s < 5000; ++s) {
        Simulation sim(net, dist, p, 77 + s);
        ASSERT_EQ(sim.infected_count(), 1u);
        const auto step = sim.step();
        ASSERT_TRUE(step.has_value());
        ASSERT_TRUE(step->applied);
        ASSERT_EQ(step->event.kind, EventKind::TransmissionAttempt);
        infection_times.push_back(step->event.time);
        EXPECT_EQ(sim.infected_count(), 2u);
        EXPECT_FALSE(sim.step().has_value());
    }
    EXPECT_LT(ks_distance(infection_times, [&](double t) { return oracle::exponential_cdf(beta, t); }), 0.03);
}

TEST(Simulator, SameSeedReproducesTheTrajectoryBitForBit) {
    const auto net = small_graph(400, 6);
    const LognormalRecovery dist(0.0, 1.0);
    const auto a = simulate(net, dist, params(0.33), 12345);
    const auto b = simulate(net, dist, params(0.33), 12345);
    EXPECT_EQ(a.rho_I, b.rho_I);
    EXPECT_EQ(a.rho_S, b.rho_S);
    EXPECT_EQ(a.final_ages, b.final_ages);
    EXPECT_EQ(a.events_processed, b.events_processed);
    const auto c = simulate(net, dist, params(0.33), 12346);
    EXPECT_NE(a.rho_I, c.rho_I);
}

TEST(Simulator, GridAndConservation) {
    const auto net = small_graph(500, 10);
    const PowerLawRecovery dist(4.0, 1.0);
    const auto traj = simulate(net, dist, params(0.3), 5);
    ASSERT_EQ(traj.grid.size(), 501u);
    EXPECT_EQ(traj.grid.front(), 0.0);
    EXPECT_NEAR(traj.grid.back(), 50.0, 1e-9);
    EXPECT_EQ(traj.rho_I.front(), 150.0 / 500.0);
    for (std::size_t i = 0; i < traj.grid.size(); ++i) EXPECT_NEAR(traj.rho_I[i] + traj.rho_S[i], 1.0, 1e-15);
    ASSERT_FALSE(traj.absorbed);
    EXPECT_EQ(traj.final_ages.size(), static_cast<std::size_t>(std::lround(traj.rho_I.back() * 500.0)));
    for (double age : traj.final_ages) {
        EXPECT_GE(age, 0.0);
        EXPECT_LE(age, 50.0);
    }
}

TEST(Simulator, EmptyInitialInfectionIsFlagged) {
    const auto net = small_graph(10, 4);
    const ExponentialRecovery dist(1.0);
    auto p = params(0.5);
    p.initial_infected = 0.05;
    const auto traj = simulate(net, dist, p, 1);
    EXPECT_TRUE(traj.absorbed);
    ASSERT_FALSE(traj.warnings.empty());
    EXPECT_NE(traj.warnings.front().find("empty initial infection"), std::string::npos);
}

void drive_with_checks(const RecoveryDistribution& dist, double beta, bool literal, std::uint64_t seed) {
    const auto net = small_graph(60, 4, seed);
    auto p = params(beta, 20.0);
    p.literal_alg1 = literal;
    Simulation sim(net, dist, p, seed);
    sim.check_consistency();
    double last = 0.0;
    std::size_t applied = 0;
    while (auto step = sim.step()) {
        ASSERT_GE(step->event.time, last);
        last = step->event.time;
        applied += step->applied ? 1 : 0;
        ASSERT_NO_THROW(sim.check_consistency());
    }
    EXPECT_GT(applied, 10u);
}

TEST(Simulator, QueueAndStateStayConsistentAfterEveryEvent) {
    const ExponentialRecovery exp(0.5);
    const PowerLawRecovery power(4.0, 1.0);
    const LognormalRecovery logn(0.0, 1.0);
    std::uint64_t seed = 1;
    for (bool literal : {false, true}) {
        drive_with_checks(exp, 0.4, literal, seed++);
        drive_with_checks(power, 0.5, literal, seed++);
        drive_with_checks(logn, 0.5, literal, seed++);
    }
}

TEST(Simulator, BuiltInInvariantCheckingRuns) {
    const auto net = small_graph(80, 4);
    const LognormalRecovery dist(0.0, 1.0);
    auto p = params(0.5, 10.0);
    p.check_invariants = true;
    EXPECT_NO_THROW(simulate(net, dist, p, 3));
}

TEST(Simulator, WellBelowThresholdEveryRunAbsorbs) {
    const auto net = small_graph(500, 10);
    const ExponentialRecovery dist(1.0);
    std::vector<std::uint64_t> seeds(10);
    std::iota(seeds.begin(), seeds.end(), 100);
    for (const auto& traj : run_ensemble(net, dist, params(0.02), seeds, 1)) {
        EXPECT_TRUE(traj.absorbed);
        EXPECT_EQ(traj.rho_I.back(), 0.0);
    }
}

TEST(Simulator, MarkovianCaseFollowsTheClassicalOde) {
    const auto net = small_graph(2500, 10, 21);
    const ExponentialRecovery dist(0.5);
    const auto seeds = derive_seeds(2024, 50);
    const auto runs = run_ensemble(net, dist, params(0.26), seeds);
    const auto summary = summarize_ensemble(runs);
    const auto ode = oracle::classical_sis_ode(0.26, 0.5, 10.0, 0.3, summary.grid);
    double worst = 0.0;
    for (std::size_t i = 0; i < summary.grid.size(); ++i)
        if (summary.grid[i] >= 5.0) worst = std::max(worst, std::abs(summary.mean[i] - ode[i]));
    EXPECT_LT(worst, 0.03);
}

TEST(Simulator, EnsembleDoesNotDependOnThreadCount) {
    const auto net = small_graph(300, 6);
    const PowerLawRecovery dist(4.0, 1.0);
    const auto seeds = derive_seeds(8, 6);
    const auto serial = run_ensemble(net, dist, params(0.3, 20.0), seeds, 1);
    const auto parallel = run_ensemble(net, dist, params(0.3, 20.0), seeds, 3);
    ASSERT_EQ(serial.size(), parallel.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
        EXPECT_EQ(serial[i].seed, seeds[i]);
        EXPECT_EQ(serial[i].rho_I, parallel[i].rho_I);
        EXPECT_EQ(serial[i].final_ages, parallel[i].final_ages);
    }
}

TEST(Simulator, DuplicateSeedsAreRejected) {
    const auto net = small_graph(50, 4);
    const ExponentialRecovery dist(1.0);
    const std::vector<std::uint64_t> seeds{1, 2, 1};
    EXPECT_THROW(run_ensemble(net, dist, params(0.3), seeds, 1), std::invalid_argument);
}

TEST(Simulator, ParameterValidation) {
    auto p = params(-0.1);
    EXPECT_THROW(p.validate(), std::invalid_argument);
    p = params(0.1);
    p.initial_infected = 1.5;
    EXPECT_THROW(p.validate(), std::invalid_argument);
    p = params(0.1);
    p.grid_dt = 0.3;
    EXPECT_THROW(p.validate(), std::invalid_argument);
    p = params(0.1, 0.0);
    EXPECT_THROW(p.validate(), std::invalid_argument);
}

TEST(Simulator, LiteralModeRunsAndStaysBelowOne) {
    const auto net = small_graph(500, 10);
    const ExponentialRecovery dist(0.5);
    auto p = params(0.26);
    p.literal_alg1 = true;
    const auto traj = simulate(net, dist, p, 4);
    for (double r : traj.rho_I) {
        EXPECT_GE(r, 0.0);
        EXPECT_LE(r, 1.0);
    }
}

TEST(ParallelFor, VisitsEveryIndexOnceAndPropagatesErrors) {
    std::vector<int> hits(100, 0);
    parallel_for(hits.size(), 4, [&](std::size_t i) { ++hits[i]; });
    for (int h : hits) EXPECT_EQ(h, 1);
    EXPECT_THROW(parallel_for(10, 2, [](std::size_t i) {
                     if (i == 7) throw std::runtime_error("boom");
                 }),
                 std::runtime_error);
}

} // namespace
