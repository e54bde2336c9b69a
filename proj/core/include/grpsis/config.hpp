#pragma once

#include "grpsis/csv.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace grpsis {

/// Shared knobs of every experiment. Defaults reproduce the published protocol: n = 2500 nodes,
/// degree 10, horizon 50, initial infected fraction 0.3, 50 runs per parameter point.
struct ExperimentConfig {
    std::string dist;                 // distribution spec; empty means "subcommand default"
    std::optional<double> beta;
    std::vector<double> betas;        // sweep values, ascending
    std::vector<std::size_t> degrees{10};
    std::size_t n = 2500;
    double horizon = 50.0;
    double grid_dt = 0.1;
    double rho_I0 = 0.3;
    std::size_t runs = 50;
    std::uint64_t seed = 20240917;
    unsigned threads = 0;
    std::string out_dir = "out";
    bool fast = false;
    std::size_t bins = 50;
    double pde_dt = 0.01;
    bool literal_alg1 = false;

    /// Throws std::invalid_argument naming the first offending field.
    void validate() const;

    /// n = 1000 and 10 runs when `fast` is set (explicit values below those are kept).
    ExperimentConfig effective() const;

    /// Tolerance multiplier for built-in checks: 2 in fast mode, 1 otherwise.
    double tolerance_scale() const { return fast ? 2.0 : 1.0; }

    ParamList params() const;
};

/// Evenly spaced values lo, ..., hi (inclusive), `count` >= 2.
std::vector<double> linspace(double lo, double hi, std::size_t count);

/// Parses "0.1,0.2,0.3" or "lo:hi:count".
std::vector<double> parse_list(const std::string& text);

} // namespace grpsis
