// grpsis: command-line driver for simulation, mean-field solution and reproduction runs.

#include "grpsis/config.hpp"
#include "grpsis/csv.hpp"
#include "grpsis/experiments.hpp"
#include "grpsis/format.hpp"
#include "grpsis/meanfield.hpp"
#include "grpsis/network.hpp"
#include "grpsis/recovery_dist.hpp"
#include "grpsis/simulator.hpp"
#include "grpsis/stats.hpp"
#include "grpsis/steadystate.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace {

using grpsis::ExperimentConfig;
using nlohmann::ordered_json;

std::string path_in(const std::string& dir, const std::string& name) {
    return dir.empty() || dir == "." ? name : dir + "/" + name;
}

grpsis::DistributionPtr require_dist(const ExperimentConfig& cfg) {
    if (cfg.dist.empty()) throw std::invalid_argument("--dist is required, e.g. --dist 'dist=exponential mu=0.5'");
    const std::string spec = cfg.dist.rfind("dist=", 0) == 0 ? cfg.dist : "dist=" + cfg.dist;
    return grpsis::parse_distribution(spec);
}

double require_beta(const ExperimentConfig& cfg) {
    if (!cfg.beta) throw std::invalid_argument("--beta is required");
    return *cfg.beta;
}

ordered_json optional_number(const std::optional<double>& value) {
    return value ? ordered_json(*value) : ordered_json(nullptr);
}

int run_simulate(const ExperimentConfig& raw, const std::string& edges_in, const std::string& edges_out,
                 bool check_invariants) {
    const ExperimentConfig cfg = raw.effective();
    const auto dist = require_dist(cfg);
    grpsis::Protocol protocol = grpsis::Protocol::from(cfg, cfg.degrees.back());

    std::optional<grpsis::RegularNetwork> net;
    if (!edges_in.empty()) {
        std::ifstream in(edges_in);
        if (!in) throw std::runtime_error("cannot open edge list '" + edges_in + "'");
        net = grpsis::read_edge_list(in);
        protocol.n = net->size();
        protocol.k = net->degree();
    } else {
        net = grpsis::protocol_network(protocol);
    }
    if (!edges_out.empty())
        grpsis::write_file(edges_out, [&](std::ostream& out) { grpsis::write_edge_list(out, *net, cfg.seed); });

    grpsis::SimulationParams params = protocol.simulation(require_beta(cfg));
    params.check_invariants = check_invariants;
    const auto seeds = grpsis::derive_seeds(cfg.seed, cfg.runs);
    const auto runs = grpsis::run_ensemble(*net, *dist, params, seeds, cfg.threads);

    ExperimentConfig described = cfg;
    described.dist = dist->spec();
    described.degrees = {protocol.k};
    described.n = protocol.n;
    const auto tags = described.params();
    std::vector<double> ages;
    std::size_t absorbed = 0;
    for (const auto& r : runs) {
        ages.insert(ages.end(), r.final_ages.begin(), r.final_ages.end());
        absorbed += r.absorbed ? 1 : 0;
        for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
    }
    if (runs.size() == 1) {
        const std::string file = path_in(cfg.out_dir, "trajectory.csv");
        grpsis::write_file(file, [&](std::ostream& out) { grpsis::write_trajectory_csv(out, tags, runs.front()); });
        std::cout << "wrote " << file << '\n';
    } else {
        const std::string file = path_in(cfg.out_dir, "ensemble.csv");
        grpsis::write_file(file, [&](std::ostream& out) { grpsis::write_ensemble_csv(out, tags, runs); });
        const std::string summary = path_in(cfg.out_dir, "summary.csv");
        grpsis::write_file(summary, [&](std::ostream& out) {
            grpsis::write_summary_csv(out, tags, grpsis::summarize_ensemble(runs));
        });
        std::cout << "wrote " << file << "\nwrote " << summary << '\n';
    }
    const std::string ages_file = path_in(cfg.out_dir, "final_ages.csv");
    grpsis::write_file(ages_file, [&](std::ostream& out) { grpsis::write_ages_csv(out, tags, ages); });
    std::cout << "wrote " << ages_file << '\n';

    std::vector<double> windows;
    for (const auto& r : runs)
        windows.push_back(grpsis::window_mean(r.grid, r.rho_I, protocol.window_start(), protocol.horizon));
    const auto late = grpsis::sample_stats(windows);
    std::cout << "runs " << runs.size() << ", absorbed " << absorbed << ", late-window rho_I "
              << grpsis::format_number(late.mean) << '\n';
    return 0;
}

int run_meanfield(const ExperimentConfig& cfg, std::optional<double> tau_max, const std::string& dump,
                  std::size_t stride) {
    const auto dist = require_dist(cfg);
    const double beta = require_beta(cfg);
    const double k = static_cast<double>(cfg.degrees.back());
    grpsis::PdeOptions options;
    options.dt = cfg.pde_dt;
    options.tau_max = tau_max;
    options.slice_stride = stride;
    const auto grid = grpsis::solve_grp_pde(*dist, beta, k, cfg.rho_I0, {}, cfg.horizon, options);
    for (const auto& w : grid.warnings) std::cerr << "warning: " << w << '\n';

    std::vector<double> t(grid.n_t);
    for (std::size_t i = 0; i < grid.n_t; ++i) t[i] = grid.time(i);
    grpsis::ParamList tags{{"dist", "'" + dist->spec() + "'"},
                           {"beta", grpsis::format_number(beta)},
                           {"k", grpsis::format_number(k)},
                           {"rho0", grpsis::format_number(cfg.rho_I0)},
                           {"T", grpsis::format_number(cfg.horizon)},
                           {"dt", grpsis::format_number(cfg.pde_dt)},
                           {"tau_max", grpsis::format_number(grid.tau_max())}};
    const std::string file = path_in(cfg.out_dir, "meanfield.csv");
    grpsis::write_file(file, [&](std::ostream& out) {
        grpsis::write_columns(out, tags, {"t", "rho_I", "rho_S"}, {t, grid.rho_I_t, grid.rho_S_t});
    });
    std::cout << "wrote " << file << '\n';
    if (!dump.empty()) {
        grpsis::write_file(dump, [&](std::ostream& out) { grpsis::write_age_grid(out, grid); });
        std::cout << "wrote " << dump << '\n';
    }
    std::cout << "rho_I(T) " << grpsis::format_number(grid.rho_I_t.back()) << ", leaked mass "
              << grpsis::format_number(grid.leaked_mass) << '\n';
    return 0;
}

int run_steady(const ExperimentConfig& cfg) {
    const auto dist = require_dist(cfg);
    const double k = static_cast<double>(cfg.degrees.back());
    const auto s = grpsis::steady_densities(*dist, require_beta(cfg), k);
    ordered_json j;
    j["dist"] = dist->spec();
    j["beta"] = *cfg.beta;
    j["mean_k"] = k;
    j["effective_rate"] = s.effective_rate;
    j["threshold"] = s.threshold;
    j["gap"] = s.gap;
    j["critical_beta"] = grpsis::critical_beta(*dist, k);
    j["rho_I_inf"] = s.rho_I_inf;
    j["rho_S_inf"] = s.rho_S_inf;
    j["expected_age"] = optional_number(s.expected_age);
    std::cout << j.dump(2) << '\n';
    return 0;
}

int run_sweep(const ExperimentConfig& raw, std::ostream& progress) {
    const ExperimentConfig cfg = raw.effective();
    const auto dist = require_dist(cfg);
    if (cfg.betas.empty()) throw std::invalid_argument("--betas is required, e.g. --betas 0.02:0.5:25");
    std::vector<grpsis::SweepPoint> all;
    for (std::size_t k : cfg.degrees) {
        const auto points =
            grpsis::run_beta_sweep(*dist, dist->spec(), cfg.betas, grpsis::Protocol::from(cfg, k), &progress);
        all.insert(all.end(), points.begin(), points.end());
    }
    const std::string file = path_in(cfg.out_dir, "sweep_beta.csv");
    ExperimentConfig described = cfg;
    described.dist = dist->spec();
    grpsis::write_file(file, [&](std::ostream& out) { grpsis::write_sweep_csv(out, described.params(), all); });
    std::cout << "wrote " << file << '\n';
    return 0;
}

int run_age_pdf(const ExperimentConfig& cfg, std::optional<double> tau_max, std::size_t points) {
    const auto dist = require_dist(cfg);
    const double upper = tau_max ? *tau_max : dist->upper_quantile(1e-4);
    const auto tau = grpsis::linspace(0.0, upper, std::max<std::size_t>(points, 2));
    std::vector<double> f;
    for (double t : tau) f.push_back(grpsis::steady_age_pdf(*dist, t));
    const std::string file = path_in(cfg.out_dir, "age_pdf.csv");
    grpsis::write_file(file, [&](std::ostream& out) {
        grpsis::write_columns(out, {{"dist", "'" + dist->spec() + "'"}}, {"tau", "f"}, {tau, f});
    });
    std::cout << "wrote " << file << '\n';
    return 0;
}

int run_expected_age(const ExperimentConfig& raw, bool simulate) {
    const ExperimentConfig cfg = raw.effective();
    const auto dist = require_dist(cfg);
    ordered_json j;
    j["dist"] = dist->spec();
    j["mean_W"] = dist->mean();
    j["second_moment_W"] = dist->second_moment();
    j["expected_age"] = grpsis::steady_age_mean(*dist);
    if (simulate) {
        const double beta = require_beta(cfg);
        const auto protocol = grpsis::Protocol::from(cfg, cfg.degrees.back());
        const auto net = grpsis::protocol_network(protocol);
        const auto p = grpsis::run_expected_age("custom", 0.0, 0.0, *dist, beta, protocol, net);
        j["beta"] = beta;
        j["simulated"] = p.simulated;
        j["relative_error"] = p.relative_error;
        j["horizon_bias"] = p.horizon_bias;
        j["absorbed_runs"] = p.absorbed;
        j["samples"] = p.samples;
    }
    std::cout << j.dump(2) << '\n';
    return 0;
}

int run_check_exponential(const ExperimentConfig& cfg, const std::string& waits_path) {
    std::ifstream in(waits_path);
    if (!in) throw std::runtime_error("cannot open waits file '" + waits_path + "'");
    const auto waits = grpsis::read_first_column(in);
    const double mu_hat = grpsis::mle_exponential(waits);
    const grpsis::ExponentialRecovery fitted(mu_hat);
    const auto density = grpsis::binned_density(waits, cfg.bins);
    ordered_json j;
    j["mu_hat"] = mu_hat;
    j["kl"] = grpsis::kl_divergence(density, [&](double t) { return fitted.pdf(t); });
    j["n"] = waits.size();
    j["bins"] = cfg.bins;
    std::cout << j.dump(2) << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"grpsis: SIS epidemics with general recovery-time distributions on regular networks"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Flat key=value configuration file; command-line flags override it");

    ExperimentConfig cfg;
    std::string betas_text;
    double beta_value = 0.0;
    app.add_option("--seed", cfg.seed, "Master 64-bit seed")->capture_default_str();
    app.add_option("--out", cfg.out_dir, "Output directory")->capture_default_str();
    app.add_flag("--fast", cfg.fast, "Scale down to n=1000 and 10 runs with doubled tolerances");
    app.add_option("--threads", cfg.threads, "Worker threads (0 = hardware concurrency)")->capture_default_str();
    app.add_option("--dist", cfg.dist, "Recovery law, e.g. 'dist=powerlaw lambda=4 t0=1'");
    auto* beta_opt = app.add_option("--beta", beta_value, "Transmission rate per contact");
    app.add_option("--betas", betas_text, "Beta sweep: comma list or lo:hi:count");
    app.add_option("--k", cfg.degrees, "Network degree(s), comma separated")->delimiter(',')->capture_default_str();
    app.add_option("--n", cfg.n, "Node count")->capture_default_str();
    app.add_option("--T", cfg.horizon, "Horizon")->capture_default_str();
    app.add_option("--grid-dt", cfg.grid_dt, "Trajectory sampling step")->capture_default_str();
    app.add_option("--rho0", cfg.rho_I0, "Initial infected fraction")->capture_default_str();
    app.add_option("--runs", cfg.runs, "Independent runs per parameter point")->capture_default_str();
    app.add_option("--bins", cfg.bins, "Histogram bins for age densities")->capture_default_str();
    app.add_option("--dt", cfg.pde_dt, "Mean-field solver step")->capture_default_str();
    app.add_flag("--literal-alg1", cfg.literal_alg1,
                 "Arm contacts only at infection time and never re-arm them (compatibility mode)");

    auto* simulate = app.add_subcommand("simulate", "Run stochastic realizations and write trajectories");
    std::string edges_in;
    std::string edges_out;
    bool check_invariants = false;
    simulate->add_option("--edges", edges_in, "Read the network from an edge list instead of generating it");
    simulate->add_option("--export-edges", edges_out, "Write the network used as an edge list");
    simulate->add_flag("--check-invariants", check_invariants, "Verify state/queue consistency after every event");

    auto* meanfield = app.add_subcommand("meanfield", "Solve the age-structured mean-field equation");
    std::optional<double> tau_max;
    std::string dump;
    std::size_t stride = 0;
    meanfield->add_option("--tau-max", tau_max, "Largest infection age on the grid");
    meanfield->add_option("--dump", dump, "Write the age-density grid as a binary dump");
    meanfield->add_option("--slice-stride", stride, "Keep every n-th age profile in the dump");

    auto* steady = app.add_subcommand("steady", "Print the steady-state summary as JSON");
    auto* sweep = app.add_subcommand("sweep-beta", "Simulated steady density over a beta sweep");

    auto* age_pdf = app.add_subcommand("age-pdf", "Tabulate the steady infection-age density");
    std::optional<double> age_tau_max;
    std::size_t points = 200;
    age_pdf->add_option("--tau-max", age_tau_max, "Upper end of the tau grid");
    age_pdf->add_option("--points", points, "Number of tau points")->capture_default_str();

    auto* expected_age = app.add_subcommand("expected-age", "Expected steady infection age, optionally simulated");
    bool simulate_age = false;
    expected_age->add_flag("--simulate", simulate_age, "Also estimate it from simulated final ages");

    auto* check_exp = app.add_subcommand("check-exponential", "Exponential fit and KL adequacy check of waiting times");
    std::string waits;
    check_exp->add_option("--waits", waits, "CSV of waiting times (first column)")->required();

    auto* reproduce = app.add_subcommand("reproduce", "Regenerate a published figure or table");
    std::string target;
    reproduce->add_option("target", target, "fig3 | fig4 | fig5 | fig6 | fig7 | table2")
        ->required()
        ->check(CLI::IsMember({"fig3", "fig4", "fig5", "fig6", "fig7", "table2"}));

    for (auto* sub : app.get_subcommands({})) sub->fallthrough();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*beta_opt) cfg.beta = beta_value;
        if (!betas_text.empty()) cfg.betas = grpsis::parse_list(betas_text);
        cfg.validate();

        if (*simulate) return run_simulate(cfg, edges_in, edges_out, check_invariants);
        if (*meanfield) return run_meanfield(cfg, tau_max, dump, stride);
        if (*steady) return run_steady(cfg);
        if (*sweep) return run_sweep(cfg, std::cerr);
        if (*age_pdf) return run_age_pdf(cfg, age_tau_max, points);
        if (*expected_age) return run_expected_age(cfg, simulate_age);
        if (*check_exp) return run_check_exponential(cfg, waits);
        if (*reproduce) {
            const grpsis::Report report = grpsis::reproduce(target, cfg, &std::cerr);
            grpsis::print_report(std::cout, report);
            return report.passed() ? 0 : 3;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
