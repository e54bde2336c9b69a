#include "grpsis/experiments.hpp"

#include "grpsis/csv.hpp"
#include "grpsis/format.hpp"
#include "grpsis/plot.hpp"
#include "grpsis/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace grpsis {

namespace {

std::string join_path(const std::string& dir, const std::string& name) {
    if (dir.empty()) return name;
    return dir.back() == '/' ? dir + name : dir + "/" + name;
}

void say(std::ostream* progress, const std::string& line) {
    if (progress) *progress << line << std::endl;
}

std::string fmt(double value, int precision = 4) {
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.*g", precision, value);
    return buffer;
}

ParamList point_params(const Protocol& p, const std::string& dist, double beta) {
    return {{"dist", "'" + dist + "'"},
            {"beta", format_number(beta)},
            {"k", std::to_string(p.k)},
            {"n", std::to_string(p.n)},
            {"T", format_number(p.horizon)},
            {"grid_dt", format_number(p.grid_dt)},
            {"rho0", format_number(p.rho_I0)},
            {"runs", std::to_string(p.runs)},
            {"seed", std::to_string(p.seed)},
            {"literal_alg1", p.literal_alg1 ? "1" : "0"}};
}

// Linear interpolation of a series sampled every `dt` from 0.
double sample_at(const std::vector<double>& values, double dt, double t) {
    const double position = t / dt;
    const auto i = static_cast<std::size_t>(std::floor(position + 1e-9));
    if (i + 1 >= values.size()) return values.back();
    const double w = std::max(0.0, position - static_cast<double>(i));
    return values[i] * (1.0 - w) + values[i + 1] * w;
}

} // namespace

// ---------------------------------------------------------------------------------------------

Protocol Protocol::from(const ExperimentConfig& cfg, std::size_t k) {
    Protocol p;
    p.n = cfg.n;
    p.k = k;
    p.horizon = cfg.horizon;
    p.grid_dt = cfg.grid_dt;
    p.rho_I0 = cfg.rho_I0;
    p.runs = cfg.runs;
    p.seed = cfg.seed;
    p.threads = cfg.threads;
    p.literal_alg1 = cfg.literal_alg1;
    return p;
}

SimulationParams Protocol::simulation(double beta) const {
    SimulationParams s;
    s.beta = beta;
    s.initial_infected = rho_I0;
    s.horizon = horizon;
    s.grid_dt = grid_dt;
    s.literal_alg1 = literal_alg1;
    s.check_invariants = false;
    return s;
}

RegularNetwork protocol_network(const Protocol& protocol) {
    std::uint64_t state = protocol.seed ^ (0x9E3779B97F4A7C15ull * (protocol.k + 1)) ^ (protocol.n << 20);
    Rng rng(splitmix64(state));
    return generate_regular(protocol.n, protocol.k, rng);
}

EnsembleOutcome run_protocol(const RecoveryDistribution& dist, double beta, const Protocol& protocol,
                             const RegularNetwork& net, bool keep_runs) {
    const SimulationParams params = protocol.simulation(beta);
    const auto seeds = derive_seeds(protocol.seed, protocol.runs);
    std::vector<Trajectory> runs = run_ensemble(net, dist, params, seeds, protocol.threads);

    EnsembleOutcome out;
    out.run_count = runs.size();
    std::vector<double> windows;
    windows.reserve(runs.size());
    for (const auto& run : runs) {
        windows.push_back(window_mean(run.grid, run.rho_I, protocol.window_start(), protocol.horizon));
        if (run.absorbed) ++out.absorbed;
        out.ages.insert(out.ages.end(), run.final_ages.begin(), run.final_ages.end());
        for (const auto& w : run.warnings)
            if (std::find(out.warnings.begin(), out.warnings.end(), w) == out.warnings.end()) out.warnings.push_back(w);
    }
    out.window = sample_stats(windows);
    if (runs.size() >= 2) out.summary = summarize_ensemble(runs);
    if (keep_runs) out.runs = std::move(runs);
    return out;
}

// ---------------------------------------------------------------------------------------------

Check check_at_most(std::string name, double value, double bound) {
    return Check{std::move(name), value, "<=", bound, value <= bound};
}

Check check_at_least(std::string name, double value, double bound) {
    return Check{std::move(name), value, ">=", bound, value >= bound};
}

bool Report::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

void Report::merge(const Report& other) {
    checks.insert(checks.end(), other.checks.begin(), other.checks.end());
    notes.insert(notes.end(), other.notes.begin(), other.notes.end());
    files.insert(files.end(), other.files.begin(), other.files.end());
}

void print_report(std::ostream& out, const Report& report) {
    out << "== " << report.title << " ==\n";
    for (const auto& c : report.checks)
        out << (c.passed ? "[PASS] " : "[FAIL] ") << c.name << ": " << fmt(c.value, 6) << ' ' << c.relation << ' '
            << fmt(c.bound, 6) << '\n';
    for (const auto& n : report.notes) out << "  note: " << n << '\n';
    for (const auto& f : report.files) out << "  wrote " << f << '\n';
    out << (report.passed() ? "OK" : "FAILED") << '\n';
}

// ---------------------------------------------------------------------------------------------

const std::vector<DensityVariant>& density_variants() {
    static const std::vector<DensityVariant> variants{
        {"exp", "dist=exponential mu=0.5", 0.26, 0.808},
        {"lognormal", "dist=lognormal mu=0 sigma=1", 0.33, 0.816},
        {"powerlaw", "dist=powerlaw lambda=4 t0=1", 0.3, 0.778},
    };
    return variants;
}

const DensityVariant& density_variant(std::string_view key) {
    for (const auto& v : density_variants())
        if (v.key == key) return v;
    throw std::invalid_argument("unknown variant '" + std::string(key) + "' (expected exp, lognormal or powerlaw)");
}

DensityResult run_density_evolution(const DensityVariant& variant, const Protocol& protocol, double pde_dt) {
    const DistributionPtr dist = parse_distribution(variant.dist);
    DensityResult result;
    result.variant = variant;
    result.theory = steady_densities(*dist, variant.beta, static_cast<double>(protocol.k));
    const RegularNetwork net = protocol_network(protocol);
    result.ensemble = run_protocol(*dist, variant.beta, protocol, net);
    PdeOptions options;
    options.dt = pde_dt;
    result.pde = solve_grp_pde(*dist, variant.beta, static_cast<double>(protocol.k), protocol.rho_I0, {},
                               protocol.horizon, options);
    return result;
}

namespace {

std::vector<DensityResult> density_results(const ExperimentConfig& cfg, std::ostream* progress) {
    const Protocol protocol = Protocol::from(cfg, cfg.degrees.back());
    std::vector<DensityResult> results;
    for (const auto& variant : density_variants()) {
        say(progress, "density evolution: " + variant.key + " (" + std::to_string(protocol.runs) + " runs, n=" +
                          std::to_string(protocol.n) + ")");
        results.push_back(run_density_evolution(variant, protocol, cfg.pde_dt));
    }
    return results;
}

} // namespace

Report reproduce_fig3(const ExperimentConfig& raw, std::ostream* progress) {
    const ExperimentConfig cfg = raw.effective();
    const double tol = 0.02 * cfg.tolerance_scale();
    Report report{"density evolution (three recovery laws)", {}, {}, {}};
    const std::string dir = join_path(cfg.out_dir, "fig3");
    const Protocol protocol = Protocol::from(cfg, cfg.degrees.back());

    for (const auto& r : density_results(cfg, progress)) {
        const auto& summary = *r.ensemble.summary;
        std::vector<double> rho_S(summary.mean.size());
        std::vector<double> pde_I(summary.grid.size());
        std::vector<double> pde_S(summary.grid.size());
        std::vector<double> theory_I(summary.grid.size(), r.theory.rho_I_inf);
        for (std::size_t i = 0; i < summary.grid.size(); ++i) {
            rho_S[i] = 1.0 - summary.mean[i];
            pde_I[i] = sample_at(r.pde.rho_I_t, r.pde.dt, summary.grid[i]);
            pde_S[i] = 1.0 - pde_I[i];
        }
        const ParamList params = point_params(protocol, r.variant.dist, r.variant.beta);
        const std::string csv = join_path(dir, "fig3_" + r.variant.key + ".csv");
        write_file(csv, [&](std::ostream& out) {
            write_columns(out, params, {"t", "rho_I", "rho_S", "pde_rho_I", "pde_rho_S", "theory_rho_I"},
                          {summary.grid, summary.mean, rho_S, pde_I, pde_S, theory_I});
        });

        plot::Chart chart;
        chart.title = r.variant.key + ": " + r.variant.dist + ", beta=" + fmt(r.variant.beta);
        chart.x_label = "t";
        chart.y_label = "density";
        chart.y_min = 0.0;
        chart.y_max = 1.0;
        auto band = [](const std::vector<double>& v, double d) {
            std::vector<double> out(v);
            for (auto& x : out) x += d;
            return out;
        };
        auto pde_I_series = plot::line_series("PDE rho_I", summary.grid, pde_I, "#1f77b4");
        pde_I_series.band_low = band(pde_I, -0.01);
        pde_I_series.band_high = band(pde_I, 0.01);
        auto pde_S_series = plot::line_series("PDE rho_S", summary.grid, pde_S, "#9467bd");
        pde_S_series.band_low = band(pde_S, -0.01);
        pde_S_series.band_high = band(pde_S, 0.01);
        chart.series.push_back(std::move(pde_I_series));
        chart.series.push_back(std::move(pde_S_series));
        chart.series.push_back(plot::line_series("simulated rho_I", summary.grid, summary.mean, "#d62728"));
        chart.series.push_back(plot::line_series("simulated rho_S", summary.grid, rho_S, "#2ca02c"));
        chart.references.push_back({r.theory.rho_I_inf, false, "#d62728", "steady rho_I"});
        chart.references.push_back({r.theory.rho_S_inf, false, "#2ca02c", "steady rho_S"});
        const std::string svg = join_path(dir, "fig3_" + r.variant.key + ".svg");
        plot::write_svg(svg, chart);
        report.files.push_back(csv);
        report.files.push_back(svg);

        report.checks.push_back(check_at_most(r.variant.key + " |late-window rho_I - steady theory|",
                                              std::abs(r.ensemble.window.mean - r.theory.rho_I_inf), tol));
        report.checks.push_back(check_at_most(r.variant.key + " |late-window rho_I - published value|",
                                              std::abs(r.ensemble.window.mean - r.variant.published_steady), tol));
        report.notes.push_back(r.variant.key + ": simulated " + fmt(r.ensemble.window.mean) + ", theory " +
                               fmt(r.theory.rho_I_inf) + ", PDE rho_I(T) " + fmt(r.pde.rho_I_t.back()) +
                               ", absorbed runs " + std::to_string(r.ensemble.absorbed));
        for (const auto& w : r.pde.warnings) report.notes.push_back(r.variant.key + " PDE: " + w);
    }
    return report;
}

Report reproduce_fig4(const ExperimentConfig& raw, std::ostream* progress) {
    const ExperimentConfig cfg = raw.effective();
    const double scale = cfg.tolerance_scale();
    Report report{"ensemble dispersion", {}, {}, {}};
    const std::string dir = join_path(cfg.out_dir, "fig4");
    const Protocol protocol = Protocol::from(cfg, cfg.degrees.back());

    for (const auto& r : density_results(cfg, progress)) {
        const auto& s = *r.ensemble.summary;
        const ParamList params = point_params(protocol, r.variant.dist, r.variant.beta);
        const std::string csv = join_path(dir, "fig4_" + r.variant.key + ".csv");
        write_file(csv, [&](std::ostream& out) { write_summary_csv(out, params, s); });

        plot::Chart band_chart;
        band_chart.title = r.variant.key + ": mean rho_I with 95% CI";
        band_chart.x_label = "t";
        band_chart.y_label = "rho_I";
        band_chart.log_y = true;
        auto mean_series = plot::line_series("mean rho_I", s.grid, s.mean, "#d62728");
        mean_series.band_low = s.ci_low;
        mean_series.band_high = s.ci_high;
        band_chart.series.push_back(std::move(mean_series));
        plot::Chart std_chart;
        std_chart.title = r.variant.key + ": std of rho_I across runs";
        std_chart.x_label = "t";
        std_chart.y_label = "std";
        std_chart.series.push_back(plot::line_series("std", s.grid, s.std, "#1f77b4"));
        std_chart.references.push_back({0.01, false, "#555555", "0.01"});
        const std::string svg = join_path(dir, "fig4_" + r.variant.key + ".svg");
        const std::string svg_std = join_path(dir, "fig4_" + r.variant.key + "_std.svg");
        plot::write_svg(svg, band_chart);
        plot::write_svg(svg_std, std_chart);
        report.files.insert(report.files.end(), {csv, svg, svg_std});

        double worst_std = 0.0;
        double worst_width = 0.0;
        for (std::size_t i = 0; i < s.grid.size(); ++i) {
            if (s.grid[i] > 5.0) worst_std = std::max(worst_std, s.std[i]);
            worst_width = std::max(worst_width, s.ci_high[i] - s.ci_low[i]);
        }
        report.checks.push_back(check_at_most(r.variant.key + " max std for t > 5", worst_std, 0.015 * scale));
        report.checks.push_back(check_at_most(r.variant.key + " max 95% CI width", worst_width, 0.07 * scale));
    }
    return report;
}

// ---------------------------------------------------------------------------------------------

std::vector<SweepPoint> run_beta_sweep(const RecoveryDistribution& dist, const std::string& family,
                                       const std::vector<double>& betas, const Protocol& protocol,
                                       std::ostream* progress) {
    const RegularNetwork net = protocol_network(protocol);
    const double mean_k = static_cast<double>(protocol.k);
    const double threshold = critical_beta(dist, mean_k);
    std::vector<SweepPoint> points;
    points.reserve(betas.size());
    for (double beta : betas) {
        const EnsembleOutcome e = run_protocol(dist, beta, protocol, net);
        SweepPoint p;
        p.family = family;
        p.k = protocol.k;
        p.beta = beta;
        p.theory = steady_densities(dist, beta, mean_k).rho_I_inf;
        p.threshold_beta = threshold;
        p.mean = e.window.mean;
        p.std = e.window.std;
        p.standard_error = e.window.standard_error();
        p.absorbed = e.absorbed;
        p.runs = e.run_count;
        points.push_back(p);
        say(progress, "  " + family + " k=" + std::to_string(protocol.k) + " beta=" + fmt(beta) + ": rho_I " +
                          fmt(p.mean) + " (theory " + fmt(p.theory) + ", absorbed " + std::to_string(p.absorbed) +
                          "/" + std::to_string(p.runs) + ")");
    }
    return points;
}

void write_sweep_csv(std::ostream& out, const ParamList& params, const std::vector<SweepPoint>& points) {
    out << params_comment(params) << '\n'
        << "family,k,beta,theory,threshold_beta,mean,std,stderr,absorbed,runs\n";
    for (const auto& p : points)
        out << p.family << ',' << p.k << ',' << format_number(p.beta) << ',' << format_number(p.theory) << ','
            << format_number(p.threshold_beta) << ',' << format_number(p.mean) << ',' << format_number(p.std) << ','
            << format_number(p.standard_error) << ',' << p.absorbed << ',' << p.runs << '\n';
}

const std::vector<SweepPanel>& sweep_panels() {
    static const std::vector<SweepPanel> panels{
        {"exp", "dist=exponential mu=0.5", linspace(0.02, 0.5, 25)},
        {"lognormal", "dist=lognormal mu=0 sigma=1", linspace(0.03, 0.6, 20)},
        {"powerlaw", "dist=powerlaw lambda=4 t0=1", linspace(0.03, 0.66, 22)},
    };
    return panels;
}

Report reproduce_fig5(const ExperimentConfig& raw, std::ostream* progress) {
    ExperimentConfig cfg = raw;
    if (cfg.degrees == std::vector<std::size_t>{10}) cfg.degrees = {4, 6, 10};
    cfg = cfg.effective();
    const double scale = cfg.tolerance_scale();
    Report report{"steady density against beta", {}, {}, {}};
    const std::string dir = join_path(cfg.out_dir, "fig5");

    plot::Chart summary_chart;
    summary_chart.title = "steady rho_I, k=" + std::to_string(cfg.degrees.back()) + ", 68% error bars";
    summary_chart.x_label = "beta";
    summary_chart.y_label = "rho_I";

    std::size_t panel_index = 0;
    for (const auto& panel : sweep_panels()) {
        const DistributionPtr dist = parse_distribution(panel.dist);
        const std::vector<double>& betas = cfg.betas.empty() ? panel.betas : cfg.betas;
        plot::Chart chart;
        chart.title = panel.key + ": " + panel.dist;
        chart.x_label = "beta";
        chart.y_label = "steady rho_I";
        std::vector<SweepPoint> all;
        std::size_t series_index = 0;
        for (std::size_t k : cfg.degrees) {
            say(progress, "beta sweep " + panel.key + " k=" + std::to_string(k));
            const Protocol protocol = Protocol::from(cfg, k);
            auto points = run_beta_sweep(*dist, panel.key, betas, protocol, progress);
            const double threshold = critical_beta(*dist, static_cast<double>(k));

            std::vector<double> x;
            std::vector<double> y;
            std::vector<double> theory;
            std::vector<double> bars;
            for (const auto& p : points) {
                x.push_back(p.beta);
                y.push_back(p.mean);
                theory.push_back(p.theory);
                bars.push_back(p.standard_error);
                if (p.beta >= 1.5 * threshold)
                    report.checks.push_back(check_at_most(panel.key + " k=" + std::to_string(k) + " beta=" +
                                                              fmt(p.beta) + " |sim - theory|",
                                                          std::abs(p.mean - p.theory), 0.05 * scale));
                if (p.beta <= 0.5 * threshold)
                    report.checks.push_back(check_at_most(panel.key + " k=" + std::to_string(k) + " beta=" +
                                                              fmt(p.beta) + " subcritical rho_I",
                                                          p.mean, 0.02 * scale));
                if (k == cfg.degrees.back())
                    report.checks.push_back(check_at_most(panel.key + " k=" + std::to_string(k) + " beta=" +
                                                              fmt(p.beta) + " 68% error bar length",
                                                          2.0 * p.standard_error, 0.04 * scale));
            }
            const std::string color = plot::palette(series_index++);
            chart.series.push_back(plot::marker_series("k=" + std::to_string(k) + " simulated", x, y, color, true));
            chart.series.push_back(plot::line_series("k=" + std::to_string(k) + " theory", x, theory, color, true));
            chart.references.push_back({threshold, true, color, ""});
            if (k == cfg.degrees.back()) {
                const std::string c = plot::palette(panel_index);
                auto with_bars = plot::marker_series(panel.key, x, y, c, true);
                with_bars.error = bars;
                summary_chart.series.push_back(std::move(with_bars));
                summary_chart.references.push_back({threshold, true, c, panel.key + " threshold"});
                report.notes.push_back(panel.key + " threshold beta (k=" + std::to_string(k) + ") = " + fmt(threshold, 6));
            }
            all.insert(all.end(), points.begin(), points.end());
        }
        ++panel_index;
        ExperimentConfig point_cfg = cfg;
        point_cfg.dist = panel.dist;
        const std::string csv = join_path(dir, "fig5_" + panel.key + ".csv");
        write_file(csv, [&](std::ostream& out) { write_sweep_csv(out, point_cfg.params(), all); });
        const std::string svg = join_path(dir, "fig5_" + panel.key + ".svg");
        plot::write_svg(svg, chart);
        report.files.insert(report.files.end(), {csv, svg});
    }
    const std::string svg = join_path(dir, "fig5_summary.svg");
    plot::write_svg(svg, summary_chart);
    report.files.push_back(svg);
    return report;
}

// ---------------------------------------------------------------------------------------------

const std::vector<AgeCase>& age_cases() {
    static const std::vector<AgeCase> cases{
        {"exp_mu0.5", "exponential", "dist=exponential mu=0.5", 0.1, 0.00053},
        {"exp_mu1", "exponential", "dist=exponential mu=1", 0.15, 0.00068},
        {"exp_mu2", "exponential", "dist=exponential mu=2", 0.25, 0.00193},
        {"lognormal_sigma0.5", "lognormal", "dist=lognormal mu=0.3 sigma=0.5", 1.0, 0.00022},
        {"lognormal_sigma0.75", "lognormal", "dist=lognormal mu=0.3 sigma=0.75", 1.0, 0.00091},
        {"lognormal_sigma1", "lognormal", "dist=lognormal mu=0.3 sigma=1", 1.0, 0.00044},
        {"powerlaw_t0_1", "powerlaw", "dist=powerlaw lambda=4.24 t0=1", 1.0, 0.00470},
        {"powerlaw_t0_2", "powerlaw", "dist=powerlaw lambda=4.24 t0=2", 1.0, 0.00083},
        {"powerlaw_t0_5", "powerlaw", "dist=powerlaw lambda=4.24 t0=5", 1.0, 0.00177},
    };
    return cases;
}

double plateau_flatness(const std::vector<double>& ages, double t0, std::size_t bins) {
    std::vector<double> counts(bins, 0.0);
    for (double a : ages) {
        if (a < 0.0 || a >= t0) continue;
        counts[std::min(bins - 1, static_cast<std::size_t>(a / t0 * static_cast<double>(bins)))] += 1.0;
    }
    const double mean = std::accumulate(counts.begin(), counts.end(), 0.0) / static_cast<double>(bins);
    if (mean <= 0.0) throw std::invalid_argument("no ages inside the plateau interval");
    double worst = 0.0;
    for (double c : counts) worst = std::max(worst, std::abs(c - mean) / mean);
    return worst;
}

AgePdfResult run_age_pdf(const AgeCase& age_case, const Protocol& protocol, std::size_t bins) {
    const DistributionPtr dist = parse_distribution(age_case.dist);
    const RegularNetwork net = protocol_network(protocol);
    EnsembleOutcome e = run_protocol(*dist, age_case.beta, protocol, net);
    AgePdfResult r;
    r.age_case = age_case;
    r.absorbed = e.absorbed;
    r.runs = e.run_count;
    r.ages = std::move(e.ages);
    if (r.ages.empty()) throw std::runtime_error(age_case.key + ": every run was absorbed; no final ages to bin");
    r.density = binned_density(r.ages, bins);
    r.kl = kl_divergence(r.density, [&](double tau) { return steady_age_pdf(*dist, tau); });
    if (const auto* pl = dynamic_cast<const PowerLawRecovery*>(dist.get())) r.plateau_flatness = plateau_flatness(r.ages, pl->minimum());
    return r;
}

namespace {

std::vector<AgePdfResult> age_results(const ExperimentConfig& cfg, std::ostream* progress) {
    const Protocol protocol = Protocol::from(cfg, cfg.degrees.back());
    std::vector<AgePdfResult> results;
    for (const auto& c : age_cases()) {
        say(progress, "final ages: " + c.key);
        results.push_back(run_age_pdf(c, protocol, cfg.bins));
    }
    return results;
}

void add_age_checks(Report& report, const std::vector<AgePdfResult>& results, double scale) {
    for (const auto& r : results) {
        report.checks.push_back(check_at_most(r.age_case.key + " KL", r.kl, 0.02 * scale));
        if (r.plateau_flatness)
            report.checks.push_back(
                check_at_most(r.age_case.key + " relative flatness on [0, t0]", *r.plateau_flatness, 0.10 * scale));
        report.notes.push_back(r.age_case.key + ": KL " + fmt(r.kl) + " (published " + fmt(r.age_case.published_kl) +
                               "), " + std::to_string(r.ages.size()) + " ages, absorbed runs " +
                               std::to_string(r.absorbed));
    }
}

void write_table2(const std::string& path, const ExperimentConfig& cfg, const std::vector<AgePdfResult>& results) {
    write_file(path, [&](std::ostream& out) {
        out << params_comment(cfg.params()) << '\n' << "case,dist,beta,kl,published_kl,ages,absorbed,runs\n";
        for (const auto& r : results)
            out << r.age_case.key << ",'" << r.age_case.dist << "'," << format_number(r.age_case.beta) << ','
                << format_number(r.kl) << ',' << format_number(r.age_case.published_kl) << ',' << r.ages.size() << ','
                << r.absorbed << ',' << r.runs << '\n';
    });
}

} // namespace

Report reproduce_fig6(const ExperimentConfig& raw, std::ostream* progress) {
    const ExperimentConfig cfg = raw.effective();
    Report report{"steady infection-age density", {}, {}, {}};
    const std::string dir = join_path(cfg.out_dir, "fig6");
    const auto results = age_results(cfg, progress);
    add_age_checks(report, results, cfg.tolerance_scale());

    std::map<std::string, plot::Chart> charts;
    std::map<std::string, std::size_t> counts;
    for (const auto& r : results) {
        const DistributionPtr dist = parse_distribution(r.age_case.dist);
        std::vector<double> mids;
        std::vector<double> theory;
        for (std::size_t i = 0; i < r.density.bins(); ++i) {
            mids.push_back(r.density.midpoint(i));
            theory.push_back(steady_age_pdf(*dist, mids.back()));
        }
        const Protocol protocol = Protocol::from(cfg, cfg.degrees.back());
        const std::string csv = join_path(dir, "fig6_" + r.age_case.key + ".csv");
        write_file(csv, [&](std::ostream& out) {
            write_columns(out, point_params(protocol, r.age_case.dist, r.age_case.beta), {"tau", "empirical", "theory"},
                          {mids, r.density.heights, theory});
        });
        report.files.push_back(csv);

        auto& chart = charts[r.age_case.family];
        chart.title = "steady infection-age PDF: " + r.age_case.family;
        chart.x_label = "tau";
        chart.y_label = "density";
        const std::string color = plot::palette(counts[r.age_case.family]++);
        std::vector<double> fine_x = linspace(0.0, r.density.edges.back(), 400);
        std::vector<double> fine_y;
        for (double t : fine_x) fine_y.push_back(steady_age_pdf(*dist, t));
        chart.series.push_back(plot::line_series(r.age_case.dist + " theory", fine_x, fine_y, color));
        chart.series.push_back(plot::marker_series("", mids, r.density.heights, color));
    }
    for (auto& [family, chart] : charts) {
        const std::string svg = join_path(dir, "fig6_" + family + ".svg");
        plot::write_svg(svg, chart);
        report.files.push_back(svg);
    }
    const std::string table = join_path(dir, "table2.csv");
    write_table2(table, cfg, results);
    report.files.push_back(table);
    return report;
}

Report reproduce_table2(const ExperimentConfig& raw, std::ostream* progress) {
    const ExperimentConfig cfg = raw.effective();
    Report report{"KL divergence table", {}, {}, {}};
    const auto results = age_results(cfg, progress);
    add_age_checks(report, results, cfg.tolerance_scale());
    const std::string table = join_path(join_path(cfg.out_dir, "table2"), "table2.csv");
    write_table2(table, cfg, results);
    report.files.push_back(table);
    return report;
}

// ---------------------------------------------------------------------------------------------

double horizon_age_bias(const RecoveryDistribution& dist, double horizon) {
    const double expected = steady_age_mean(dist);
    const double excess = quad::integrate_to_infinity(
        [&](double tau) { return (tau - horizon) * dist.survival(tau); }, horizon, 1e-10);
    return excess / dist.mean() / expected;
}

ExpectedAgePoint run_expected_age(const std::string& family, double fixed_param, double param,
                                  const RecoveryDistribution& dist, double beta, const Protocol& protocol,
                                  const RegularNetwork& net) {
    const SteadyStateSummary s = steady_densities(dist, beta, static_cast<double>(protocol.k));
    const EnsembleOutcome e = run_protocol(dist, beta, protocol, net);
    ExpectedAgePoint p;
    p.family = family;
    p.fixed_param = fixed_param;
    p.param = param;
    p.beta = beta;
    p.theory = steady_age_mean(dist);
    p.simulated = sample_stats(e.ages).mean;
    p.relative_error = e.ages.empty() ? 1.0 : (p.simulated - p.theory) / p.theory;
    p.effective_rate = s.effective_rate;
    p.threshold = s.threshold;
    p.horizon_bias = horizon_age_bias(dist, protocol.horizon);
    p.absorbed = e.absorbed;
    p.samples = e.ages.size();
    return p;
}

std::string ExpectedAgeSweep::dist_spec(double fixed_value, double param) const {
    if (family == "lognormal") return "dist=lognormal mu=" + format_number(param) + " sigma=" + format_number(fixed_value);
    return "dist=powerlaw lambda=" + format_number(param) + " t0=" + format_number(fixed_value);
}

const std::vector<ExpectedAgeSweep>& expected_age_sweeps() {
    static const std::vector<ExpectedAgeSweep> sweeps{
        {"lognormal", {0.5, 0.75, 1.0}, linspace(0.0, 0.95, 20), 1.0},
        {"powerlaw", {1.0, 2.0, 5.0}, linspace(4.0, 4.96, 25), 1.0},
    };
    return sweeps;
}

std::vector<ExpectedAgePoint> run_expected_age_sweep(const ExpectedAgeSweep& sweep, const Protocol& protocol,
                                                     std::ostream* progress) {
    const RegularNetwork net = protocol_network(protocol);
    std::vector<ExpectedAgePoint> points;
    for (double fixed : sweep.fixed_values) {
        for (double param : sweep.params) {
            const DistributionPtr dist = parse_distribution(sweep.dist_spec(fixed, param));
            points.push_back(run_expected_age(sweep.family, fixed, param, *dist, sweep.beta, protocol, net));
            const auto& p = points.back();
            say(progress, "  " + sweep.dist_spec(fixed, param) + ": mean age " + fmt(p.simulated) + " (theory " +
                              fmt(p.theory) + ", rel " + fmt(p.relative_error, 3) + ")");
        }
    }
    return points;
}

Report reproduce_fig7(const ExperimentConfig& raw, std::ostream* progress) {
    const ExperimentConfig cfg = raw.effective();
    const double scale = cfg.tolerance_scale();
    Report report{"expected infection age", {}, {}, {}};
    const std::string dir = join_path(cfg.out_dir, "fig7");
    const Protocol protocol = Protocol::from(cfg, cfg.degrees.back());

    for (const auto& sweep : expected_age_sweeps()) {
        say(progress, "expected age sweep: " + sweep.family);
        const auto points = run_expected_age_sweep(sweep, protocol, progress);
        plot::Chart chart;
        chart.title = "E[T(inf)] vs " + std::string(sweep.family == "lognormal" ? "mu" : "lambda");
        chart.x_label = sweep.family == "lognormal" ? "mu" : "lambda";
        chart.y_label = "expected infection age";
        std::size_t color_index = 0;
        for (double fixed : sweep.fixed_values) {
            std::vector<double> x;
            std::vector<double> sim;
            std::vector<double> theory;
            for (const auto& p : points) {
                if (p.fixed_param != fixed) continue;
                x.push_back(p.param);
                sim.push_back(p.simulated);
                theory.push_back(p.theory);
            }
            const std::string color = plot::palette(color_index++);
            const std::string label = (sweep.family == "lognormal" ? "sigma=" : "t0=") + fmt(fixed);
            chart.series.push_back(plot::line_series(label + " theory", x, theory, color, true));
            chart.series.push_back(plot::marker_series(label + " simulated", x, sim, color));
        }
        for (const auto& p : points) {
            const std::string name = sweep.dist_spec(p.fixed_param, p.param);
            if (p.effective_rate >= 2.0 * p.threshold)
                report.checks.push_back(check_at_most(name + " |relative error|", std::abs(p.relative_error), 0.05 * scale));
            if (p.effective_rate - p.threshold < p.threshold)
                report.notes.push_back(name + ": close to threshold, absorption may bias the mean downwards");
        }
        const std::string csv = join_path(dir, "fig7_" + sweep.family + ".csv");
        write_file(csv, [&](std::ostream& out) {
            ParamList params = cfg.params();
            params.emplace_back("beta", format_number(sweep.beta));
            out << params_comment(params) << '\n'
                << "family,fixed,param,theory,simulated,relative_error,effective_rate,threshold,horizon_bias,absorbed,"
                   "samples\n";
            for (const auto& p : points)
                out << p.family << ',' << format_number(p.fixed_param) << ',' << format_number(p.param) << ','
                    << format_number(p.theory) << ',' << format_number(p.simulated) << ','
                    << format_number(p.relative_error) << ',' << format_number(p.effective_rate) << ','
                    << format_number(p.threshold) << ',' << format_number(p.horizon_bias) << ',' << p.absorbed << ','
                    << p.samples << '\n';
        });
        const std::string svg = join_path(dir, "fig7_" + sweep.family + ".svg");
        plot::write_svg(svg, chart);
        report.files.insert(report.files.end(), {csv, svg});
    }
    return report;
}

Report reproduce(const std::string& target, const ExperimentConfig& cfg, std::ostream* progress) {
    if (target == "fig3") return reproduce_fig3(cfg, progress);
    if (target == "fig4") return reproduce_fig4(cfg, progress);
    if (target == "fig5") return reproduce_fig5(cfg, progress);
    if (target == "fig6") return reproduce_fig6(cfg, progress);
    if (target == "fig7") return reproduce_fig7(cfg, progress);
    if (target == "table2") return reproduce_table2(cfg, progress);
    throw std::invalid_argument("unknown reproduction target '" + target + "'");
}

} // namespace grpsis
