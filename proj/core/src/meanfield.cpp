#include "grpsis/meanfield.hpp"

#include "grpsis/format.hpp"
#include "grpsis/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <set>
#include <stdexcept>

namespace grpsis {

void ClassicalSISParams::validate() const {
    if (!(beta > 0.0) || !(mu > 0.0) || !(mean_k > 0.0))
        throw std::invalid_argument("classical SIS parameters beta, mu and mean_k must be positive");
    if (!(rho_I0 > 0.0 && rho_I0 <= 1.0)) throw std::invalid_argument("rho_I0 must lie in (0, 1]");
}

double classical_sis_solution(const ClassicalSISParams& p, double t) {
    p.validate();
    if (t < 0.0) throw std::invalid_argument("classical SIS solution needs t >= 0");
    const double growth = p.beta * p.mean_k - p.mu;
    // rho(t) = rho0 / (e^{-a t} + beta k rho0 (1 - e^{-a t}) / a), with (1 - e^{-a t}) / a -> t as a -> 0.
    const double at = growth * t;
    const double ramp = at == 0.0 ? t : -std::expm1(-at) / growth;
    return p.rho_I0 / (std::exp(-at) + p.beta * p.mean_k * p.rho_I0 * ramp);
}

double classical_sis_limit(const ClassicalSISParams& p) {
    p.validate();
    return std::max(0.0, 1.0 - p.mu / (p.beta * p.mean_k));
}

double AgeSlice::cumulative(double tau, double dt) const {
    if (tau <= 0.0 || density.size() < 2) return 0.0;
    const double position = tau / dt;
    const auto whole = static_cast<std::size_t>(std::floor(position + 1e-9));
    const std::size_t last = density.size() - 1;
    double mass = 0.0;
    for (std::size_t j = 1; j <= std::min(whole, last); ++j) mass += density[j];
    if (whole < last) {
        const double part = std::max(0.0, position - static_cast<double>(whole));
        mass += part * density[whole + 1];
    }
    return mass * dt;
}

const AgeSlice& AgeDensityGrid::slice_at(std::size_t step) const {
    for (const auto& slice : slices)
        if (slice.step == step) return slice;
    throw std::out_of_range("no age slice stored for step " + std::to_string(step));
}

namespace {

std::size_t whole_steps(double span, double dt, const char* what) {
    const double steps = span / dt;
    const double rounded = std::round(steps);
    if (std::abs(steps - rounded) > 1e-9 * std::max(1.0, steps))
        throw std::invalid_argument(std::string(what) + " must be an integer multiple of dt");
    return static_cast<std::size_t>(rounded);
}

double trapezoid(const std::vector<double>& rho, std::size_t highest, double dt) {
    const std::size_t last = rho.size() - 1;
    double sum = 0.0;
    for (std::size_t j = 1; j <= std::min(highest, last); ++j) sum += rho[j];
    if (highest >= last) sum -= 0.5 * rho[last];
    return sum * dt;
}

} // namespace

AgeDensityGrid solve_grp_pde(const RecoveryDistribution& dist, double beta, double mean_k, double rho_I0,
                             const AgeDensityFn& initial_age_density, double horizon, const PdeOptions& options) {
    const double dt = options.dt;
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
    if (!(beta >= 0.0) || !(mean_k > 0.0)) throw std::invalid_argument("beta must be >= 0 and mean_k > 0");
    if (!(rho_I0 >= 0.0 && rho_I0 <= 1.0)) throw std::invalid_argument("rho_I0 must lie in [0, 1]");
    if (!(horizon > 0.0)) throw std::invalid_argument("horizon T must be positive");
    const std::size_t steps = whole_steps(horizon, dt, "T");

    const double tau_max = options.tau_max ? *options.tau_max : horizon + dist.upper_quantile(1e-6);
    if (!(tau_max > dt)) throw std::invalid_argument("tau_max must exceed dt");
    const auto last = static_cast<std::size_t>(std::ceil(tau_max / dt - 1e-9));
    if (options.tau_max) whole_steps(tau_max, dt, "tau_max");

    // Survival ratio along each characteristic, from node j to node j+1.
    std::vector<double> ratio(last + 1, 0.0);
    for (std::size_t j = 1; j <= last; ++j) {
        const double from = dist.survival(static_cast<double>(j) * dt);
        const double to = dist.survival(static_cast<double>(j + 1) * dt);
        const double r = from > 0.0 ? to / from : 0.0;
        if (!(r >= 0.0) || r > 1.0 + 1e-12) throw std::domain_error("grid too coarse: survival ratio left [0, 1]");
        ratio[j] = std::min(r, 1.0);
    }

    std::vector<double> rho(last + 1, 0.0);
    std::size_t highest = 1;
    if (!initial_age_density) {
        rho[1] = rho_I0 / dt;
    } else {
        double mass = 0.0;
        for (std::size_t j = 1; j <= last; ++j) {
            const double cell = quad::integrate(initial_age_density, static_cast<double>(j - 1) * dt,
                                                static_cast<double>(j) * dt, 1e-10);
            if (cell < 0.0) throw std::invalid_argument("initial age density must be non-negative");
            rho[j] = cell / dt;
            mass += cell;
            if (cell > 0.0) highest = j;
        }
        if (std::abs(mass - rho_I0) > 1e-6)
            throw std::invalid_argument("initial age density integrates to " + format_number(mass) +
                                        ", expected rho_I0 = " + format_number(rho_I0));
    }

    std::set<std::size_t> keep;
    for (double t : options.slice_times) {
        if (t < 0.0 || t > horizon + 1e-9) throw std::invalid_argument("slice time outside [0, T]");
        keep.insert(static_cast<std::size_t>(std::llround(t / dt)));
    }
    if (options.slice_stride > 0)
        for (std::size_t s = 0; s <= steps; s += options.slice_stride) keep.insert(s);
    keep.insert(steps);

    AgeDensityGrid grid;
    grid.dt = dt;
    grid.n_t = steps + 1;
    grid.n_tau = last + 1;
    grid.rho_I_t.resize(steps + 1);
    grid.rho_S_t.resize(steps + 1);

    const double inflow_rate = beta * mean_k;
    double infected = trapezoid(rho, highest, dt);
    for (std::size_t n = 0;; ++n) {
        grid.rho_I_t[n] = infected;
        grid.rho_S_t[n] = 1.0 - infected;
        if (keep.count(n)) grid.slices.push_back(AgeSlice{n, grid.time(n), rho});
        if (n == steps) break;

        const double births = inflow_rate * (1.0 - infected) * infected;
        if (highest == last) grid.leaked_mass += rho[last] * ratio[last] * dt;
        const std::size_t top = std::min(highest, last - 1);
        for (std::size_t j = top; j >= 1; --j) rho[j + 1] = rho[j] * ratio[j];
        rho[1] = births;
        highest = std::min(highest + 1, last);
        infected = trapezoid(rho, highest, dt);
    }

    if (grid.leaked_mass > 1e-4)
        grid.warnings.push_back("tau_max truncation: " + format_number(grid.leaked_mass) +
                                " infected mass left the age grid; raise tau_max");
    return grid;
}

double exp_case_convolution(double mu, double beta, double mean_k, double rho_I0,
                            const CumulativeFn& initial_cumulative, double t, double tau) {
    if (t < 0.0) throw std::invalid_argument("convolution needs t >= 0");
    const ClassicalSISParams p{beta, mu, mean_k, rho_I0};
    p.validate();
    double value = 0.0;
    const double upper = std::min(t, tau);
    if (upper > 0.0) {
        auto integrand = [&](double xi) {
            const double r = classical_sis_solution(p, t - xi);
            return r * (1.0 - r) * std::exp(-mu * xi);
        };
        value += beta * mean_k * quad::integrate(integrand, 0.0, upper, 1e-13);
    }
    const double shifted = tau - t;
    if (shifted >= 0.0) {
        const double initial = initial_cumulative ? initial_cumulative(shifted) : rho_I0;
        value += initial * std::exp(-mu * t);
    }
    return value;
}

namespace {

constexpr char kMagic[8] = {'G', 'R', 'P', 'S', 'I', 'S', 'A', 'G'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put(std::ostream& out, const T& value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof value);
}

template <class T>
T get(std::istream& in) {
    T value{};
    if (!in.read(reinterpret_cast<char*>(&value), sizeof value)) throw std::runtime_error("truncated age grid dump");
    return value;
}

void get_doubles(std::istream& in, std::vector<double>& values) {
    if (!in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(values.size() * sizeof(double))))
        throw std::runtime_error("truncated age grid dump");
}

} // namespace

void write_age_grid(std::ostream& out, const AgeDensityGrid& grid) {
    out.write(kMagic, sizeof kMagic);
    put(out, kVersion);
    put(out, grid.dt);
    put(out, static_cast<std::uint64_t>(grid.n_t));
    put(out, static_cast<std::uint64_t>(grid.n_tau));
    put(out, static_cast<std::uint64_t>(grid.slices.size()));
    put(out, grid.leaked_mass);
    out.write(reinterpret_cast<const char*>(grid.rho_I_t.data()),
              static_cast<std::streamsize>(grid.rho_I_t.size() * sizeof(double)));
    for (const auto& slice : grid.slices) {
        put(out, static_cast<std::uint64_t>(slice.step));
        out.write(reinterpret_cast<const char*>(slice.density.data()),
                  static_cast<std::streamsize>(slice.density.size() * sizeof(double)));
    }
    if (!out) throw std::runtime_error("failed to write age grid dump");
}

AgeDensityGrid read_age_grid(std::istream& in) {
    char magic[sizeof kMagic];
    if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
        throw std::runtime_error("not an age grid dump (bad magic)");
    if (get<std::uint32_t>(in) != kVersion) throw std::runtime_error("unsupported age grid dump version");
    AgeDensityGrid grid;
    grid.dt = get<double>(in);
    grid.n_t = get<std::uint64_t>(in);
    grid.n_tau = get<std::uint64_t>(in);
    const auto count = get<std::uint64_t>(in);
    grid.leaked_mass = get<double>(in);
    grid.rho_I_t.resize(grid.n_t);
    get_doubles(in, grid.rho_I_t);
    grid.rho_S_t.resize(grid.n_t);
    std::transform(grid.rho_I_t.begin(), grid.rho_I_t.end(), grid.rho_S_t.begin(), [](double r) { return 1.0 - r; });
    for (std::uint64_t i = 0; i < count; ++i) {
        AgeSlice slice;
        slice.step = get<std::uint64_t>(in);
        slice.t = grid.time(slice.step);
        slice.density.resize(grid.n_tau);
        get_doubles(in, slice.density);
        grid.slices.push_back(std::move(slice));
    }
    return grid;
}

} // namespace grpsis
