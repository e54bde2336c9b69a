#include "grpsis/experiments.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

namespace {

using namespace grpsis;

TEST(Protocol, FromConfigAndWindow) {
    ExperimentConfig cfg;
    cfg.n = 800;
    cfg.horizon = 20.0;
    const auto p = Protocol::from(cfg, 6);
    EXPECT_EQ(p.n, 800u);
    EXPECT_EQ(p.k, 6u);
    EXPECT_EQ(p.window_start(), 16.0);
    EXPECT_EQ(p.simulation(0.3).beta, 0.3);
    EXPECT_EQ(p.simulation(0.3).horizon, 20.0);
}

TEST(Protocol, NetworkDependsOnSeedDegreeAndSize) {
    Protocol p;
    p.n = 200;
    p.k = 4;
    const auto a = protocol_network(p).edges();
    EXPECT_EQ(a, protocol_network(p).edges());
    p.seed += 1;
    EXPECT_NE(a, protocol_network(p).edges());
}

TEST(RunProtocol, SummarizesTheEnsemble) {
    Protocol p;
    p.n = 300;
    p.k = 6;
    p.runs = 4;
    p.horizon = 10.0;
    const auto net = protocol_network(p);
    const ExponentialRecovery dist(0.5);
    const auto e = run_protocol(dist, 0.3, p, net, true);
    EXPECT_EQ(e.run_count, 4u);
    EXPECT_EQ(e.runs.size(), 4u);
    ASSERT_TRUE(e.summary.has_value());
    EXPECT_EQ(e.window.count, 4u);
    EXPECT_GT(e.window.mean, 0.5);
    EXPECT_FALSE(e.ages.empty());
    const auto again = run_protocol(dist, 0.3, p, net);
    EXPECT_EQ(again.window.mean, e.window.mean);
    EXPECT_EQ(again.ages, e.ages);
    EXPECT_TRUE(again.runs.empty());
}

TEST(Checks, RelationsAndReport) {
    Report r{"demo", {}, {}, {}};
    r.checks.push_back(check_at_most("small", 0.01, 0.02));
    r.checks.push_back(check_at_least("large", 5.0, 1.0));
    EXPECT_TRUE(r.passed());
    Report other{"other", {check_at_most("too big", 0.5, 0.1)}, {"a note"}, {"x.csv"}};
    r.merge(other);
    EXPECT_FALSE(r.passed());
    std::ostringstream out;
    print_report(out, r);
    const auto text = out.str();
    EXPECT_NE(text.find("[PASS] small"), std::string::npos);
    EXPECT_NE(text.find("[FAIL] too big"), std::string::npos);
    EXPECT_NE(text.find("FAILED"), std::string::npos);
}

TEST(Catalogue, PublishedParameterSets) {
    ASSERT_EQ(density_variants().size(), 3u);
    EXPECT_EQ(density_variant("exp").beta, 0.26);
    EXPECT_EQ(density_variant("lognormal").published_steady, 0.816);
    EXPECT_EQ(density_variant("powerlaw").published_steady, 0.778);
    EXPECT_THROW(density_variant("gamma"), std::invalid_argument);

    ASSERT_EQ(age_cases().size(), 9u);
    for (const auto& c : age_cases()) EXPECT_LT(c.published_kl, 0.005) << c.key;

    ASSERT_EQ(sweep_panels().size(), 3u);
    EXPECT_EQ(sweep_panels().front().betas.size(), 25u);
    EXPECT_DOUBLE_EQ(sweep_panels().front().betas.front(), 0.02);
    EXPECT_DOUBLE_EQ(sweep_panels().front().betas.back(), 0.5);

    const auto& sweeps = expected_age_sweeps();
    ASSERT_EQ(sweeps.size(), 2u);
    EXPECT_EQ(sweeps[0].params.size(), 20u);
    EXPECT_EQ(sweeps[1].params.size(), 25u);
    EXPECT_EQ(sweeps[1].dist_spec(2.0, 4.5), "dist=powerlaw lambda=4.5 t0=2");
}

TEST(PlateauFlatness, UniformAgesAreFlat) {
    std::vector<double> ages;
    for (int i = 0; i < 1000; ++i) ages.push_back((i + 0.5) / 1000.0 * 2.0);
    ages.push_back(7.0);
    EXPECT_NEAR(plateau_flatness(ages, 2.0), 0.0, 1e-12);
    std::vector<double> skewed = ages;
    for (int i = 0; i < 100; ++i) skewed.push_back(0.05);
    EXPECT_NEAR(plateau_flatness(skewed, 2.0), 90.0 / 110.0, 1e-12);
    EXPECT_THROW(plateau_flatness({5.0}, 2.0), std::invalid_argument);
}

TEST(HorizonAgeBias, PowerLawClosedForm) {
    for (double t0 : {1.0, 2.0, 5.0})
        for (double lambda : {4.0, 4.48, 4.96}) {
            const PowerLawRecovery dist(lambda, t0);
            const double closed = 2.0 * std::pow(t0 / 50.0, lambda - 3.0) / ((lambda - 1.0) * (lambda - 2.0));
            EXPECT_NEAR(horizon_age_bias(dist, 50.0), closed, 1e-8 * closed) << t0 << " " << lambda;
        }
    EXPECT_LT(horizon_age_bias(ExponentialRecovery(1.0), 50.0), 1e-20);
}

TEST(Reproduce, UnknownTargetIsRejected) {
    EXPECT_THROW(reproduce("fig9", ExperimentConfig{}), std::invalid_argument);
}

} // namespace
