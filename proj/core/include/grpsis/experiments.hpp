#pragma once

#include "grpsis/config.hpp"
#include "grpsis/meanfield.hpp"
#include "grpsis/network.hpp"
#include "grpsis/simulator.hpp"
#include "grpsis/stats.hpp"
#include "grpsis/steadystate.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace grpsis {

/// Simulation protocol of one parameter point.
struct Protocol {
    std::size_t n = 2500;
    std::size_t k = 10;
    double horizon = 50.0;
    double grid_dt = 0.1;
    double rho_I0 = 0.3;
    std::size_t runs = 50;
    std::uint64_t seed = 20240917;
    unsigned threads = 0;
    bool literal_alg1 = false;

    static Protocol from(const ExperimentConfig& cfg, std::size_t k);
    SimulationParams simulation(double beta) const;
    /// Late-time averaging window [0.8 T, T] used as the operational steady state.
    double window_start() const { return 0.8 * horizon; }
};

/// Random k-regular graph for the protocol, seeded from (seed, n, k).
RegularNetwork protocol_network(const Protocol& protocol);

struct EnsembleOutcome {
    std::vector<Trajectory> runs;      // kept only on request
    std::optional<EnsembleSummary> summary;
    SampleStats window;                // per-run late-window mean of rho_I, across runs
    std::vector<double> ages;          // final ages pooled over runs not absorbed at T
    std::size_t absorbed = 0;
    std::size_t run_count = 0;
    std::vector<std::string> warnings;
};

EnsembleOutcome run_protocol(const RecoveryDistribution& dist, double beta, const Protocol& protocol,
                             const RegularNetwork& net, bool keep_runs = false);

// ---------------------------------------------------------------------------------------------
// Pass/fail bookkeeping shared by the reproduction commands.

struct Check {
    std::string name;
    double value = 0.0;
    std::string relation;  // "<=" or ">="
    double bound = 0.0;
    bool passed = false;
};

Check check_at_most(std::string name, double value, double bound);
Check check_at_least(std::string name, double value, double bound);

struct Report {
    std::string title;
    std::vector<Check> checks;
    std::vector<std::string> notes;
    std::vector<std::string> files;

    bool passed() const;
    void merge(const Report& other);
};

void print_report(std::ostream& out, const Report& report);

// ---------------------------------------------------------------------------------------------
// Density evolution and ensemble dispersion.

struct DensityVariant {
    std::string key;    // exp | lognormal | powerlaw
    std::string dist;
    double beta = 0.0;
    double published_steady = 0.0;
};

const std::vector<DensityVariant>& density_variants();
const DensityVariant& density_variant(std::string_view key);

struct DensityResult {
    DensityVariant variant;
    SteadyStateSummary theory;
    EnsembleOutcome ensemble;
    AgeDensityGrid pde;
};

DensityResult run_density_evolution(const DensityVariant& variant, const Protocol& protocol, double pde_dt);

Report reproduce_fig3(const ExperimentConfig& cfg, std::ostream* progress = nullptr);
Report reproduce_fig4(const ExperimentConfig& cfg, std::ostream* progress = nullptr);

// ---------------------------------------------------------------------------------------------
// Steady density against beta.

struct SweepPoint {
    std::string family;
    std::size_t k = 0;
    double beta = 0.0;
    double theory = 0.0;
    double threshold_beta = 0.0;
    double mean = 0.0;       // across runs of the late-window mean
    double std = 0.0;
    double standard_error = 0.0;
    std::size_t absorbed = 0;
    std::size_t runs = 0;
};

std::vector<SweepPoint> run_beta_sweep(const RecoveryDistribution& dist, const std::string& family,
                                       const std::vector<double>& betas, const Protocol& protocol,
                                       std::ostream* progress = nullptr);

void write_sweep_csv(std::ostream& out, const ParamList& params, const std::vector<SweepPoint>& points);

struct SweepPanel {
    std::string key;
    std::string dist;
    std::vector<double> betas;
};

const std::vector<SweepPanel>& sweep_panels();

Report reproduce_fig5(const ExperimentConfig& cfg, std::ostream* progress = nullptr);

// ---------------------------------------------------------------------------------------------
// Steady infection-age density.

struct AgeCase {
    std::string key;
    std::string family;
    std::string dist;
    double beta = 0.0;
    double published_kl = 0.0;
};

const std::vector<AgeCase>& age_cases();

struct AgePdfResult {
    AgeCase age_case;
    std::vector<double> ages;
    BinnedDensity density;
    double kl = 0.0;
    std::optional<double> plateau_flatness; // power-law cases only
    std::size_t absorbed = 0;
    std::size_t runs = 0;
};

/// Largest relative deviation from the mean height of a `bins`-bin histogram of the ages on [0, t0].
double plateau_flatness(const std::vector<double>& ages, double t0, std::size_t bins = 10);

AgePdfResult run_age_pdf(const AgeCase& age_case, const Protocol& protocol, std::size_t bins);

Report reproduce_fig6(const ExperimentConfig& cfg, std::ostream* progress = nullptr);
Report reproduce_table2(const ExperimentConfig& cfg, std::ostream* progress = nullptr);

// ---------------------------------------------------------------------------------------------
// Expected infection age.

struct ExpectedAgePoint {
    std::string family;
    double fixed_param = 0.0;  // sigma (lognormal) or t0 (power law)
    double param = 0.0;        // mu (lognormal) or lambda (power law)
    double beta = 0.0;
    double theory = 0.0;
    double simulated = 0.0;
    double relative_error = 0.0;
    double effective_rate = 0.0;
    double threshold = 0.0;
    double horizon_bias = 0.0;  // relative shortfall expected from capping ages at T
    std::size_t absorbed = 0;
    std::size_t samples = 0;
};

/// Relative amount by which the mean infection age observed at T falls short of E[T(inf)] when every infection
/// clock started at t = 0: int_T^inf (tau - T) f(tau) dtau / E[T(inf)].
double horizon_age_bias(const RecoveryDistribution& dist, double horizon);

ExpectedAgePoint run_expected_age(const std::string& family, double fixed_param, double param,
                                  const RecoveryDistribution& dist, double beta, const Protocol& protocol,
                                  const RegularNetwork& net);

struct ExpectedAgeSweep {
    std::string family;
    std::vector<double> fixed_values;
    std::vector<double> params;
    double beta = 1.0;

    std::string dist_spec(double fixed_value, double param) const;
};

const std::vector<ExpectedAgeSweep>& expected_age_sweeps();

std::vector<ExpectedAgePoint> run_expected_age_sweep(const ExpectedAgeSweep& sweep, const Protocol& protocol,
                                                     std::ostream* progress = nullptr);

Report reproduce_fig7(const ExperimentConfig& cfg, std::ostream* progress = nullptr);

/// Dispatches "fig3" ... "fig7", "table2".
Report reproduce(const std::string& target, const ExperimentConfig& cfg, std::ostream* progress = nullptr);

} // namespace grpsis
