#pragma once

#include "grpsis/simulator.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace grpsis {

/// Equal-width histogram normalised to a density: height_i = count_i / (width_i * n).
struct BinnedDensity {
    std::vector<double> edges;   // N + 1 ascending boundaries
    std::vector<double> heights; // N densities
    std::size_t sample_count = 0;

    std::size_t bins() const noexcept { return heights.size(); }
    double width(std::size_t i) const { return edges[i + 1] - edges[i]; }
    double midpoint(std::size_t i) const { return 0.5 * (edges[i] + edges[i + 1]); }
    /// Integral of the histogram: the fraction of samples that fell inside the range.
    double mass() const;
};

/// Per-grid-point statistics across ensemble runs.
struct EnsembleSummary {
    std::vector<double> grid;
    std::vector<double> mean;
    std::vector<double> std;     // sample standard deviation, n - 1 denominator
    std::vector<double> ci_low;  // mean -/+ 1.96 std / sqrt(runs)
    std::vector<double> ci_high;
    std::size_t runs = 0;
};

struct SampleStats {
    double mean = 0.0;
    double std = 0.0;   // n - 1 denominator; 0 for a single value
    std::size_t count = 0;

    double standard_error() const;
};

/// Maximiser of the exponential likelihood prod mu e^{-mu W}: n / sum(W).
double mle_exponential(std::span<const double> waits);

/// Histogram over [min, max] of the samples. Throws "degenerate range" when min == max.
BinnedDensity binned_density(std::span<const double> samples, std::size_t n_bins);

/// Histogram over the fixed range [lo, hi]; samples outside still count in the normalisation.
BinnedDensity binned_density(std::span<const double> samples, std::size_t n_bins, double lo, double hi);

/// sum_i f*_i ln(f*_i / g_i) width_i over occupied bins, g_i being the model density averaged over bin i.
/// Throws std::domain_error("model vanishes on occupied bin") where the model is 0 but f* > 0.
double kl_divergence(const BinnedDensity& empirical, const std::function<double(double)>& model);

/// Kolmogorov-Smirnov distance sup |F_n - F| between the samples and a continuous CDF.
double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf);

SampleStats sample_stats(std::span<const double> values);

/// Mean of the samples whose grid time lies in [from, to].
double window_mean(std::span<const double> grid, std::span<const double> values, double from, double to);

/// Requires >= 2 runs on identical grids; throws "grid mismatch" otherwise.
EnsembleSummary summarize_ensemble(std::span<const Trajectory> runs);

} // namespace grpsis
