#include "grpsis/stats.hpp"

#include "grpsis/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace grpsis {

double BinnedDensity::mass() const {
    double total = 0.0;
    for (std::size_t i = 0; i < bins(); ++i) total += heights[i] * width(i);
    return total;
}

double SampleStats::standard_error() const {
    return count > 0 ? std / std::sqrt(static_cast<double>(count)) : 0.0;
}

double mle_exponential(std::span<const double> waits) {
    if (waits.empty()) throw std::invalid_argument("empty sample");
    double total = 0.0;
    for (double w : waits) {
        if (!(w > 0.0)) throw std::invalid_argument("non-positive wait");
        total += w;
    }
    return static_cast<double>(waits.size()) / total;
}

BinnedDensity binned_density(std::span<const double> samples, std::size_t n_bins) {
    if (samples.empty()) throw std::invalid_argument("empty sample");
    const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
    if (!(*hi > *lo)) throw std::invalid_argument("degenerate range: all samples are equal");
    return binned_density(samples, n_bins, *lo, *hi);
}

BinnedDensity binned_density(std::span<const double> samples, std::size_t n_bins, double lo, double hi) {
    if (samples.empty()) throw std::invalid_argument("empty sample");
    if (n_bins == 0) throw std::invalid_argument("need at least one bin");
    if (!(hi > lo)) throw std::invalid_argument("degenerate range: hi must exceed lo");

    BinnedDensity out;
    out.sample_count = samples.size();
    out.edges.resize(n_bins + 1);
    const double width = (hi - lo) / static_cast<double>(n_bins);
    for (std::size_t i = 0; i <= n_bins; ++i) out.edges[i] = lo + width * static_cast<double>(i);
    out.edges.back() = hi;

    std::vector<std::size_t> counts(n_bins, 0);
    for (double x : samples) {
        if (x < lo || x > hi) continue;
        auto bin = static_cast<std::size_t>((x - lo) / width);
        bin = std::min(bin, n_bins - 1);
        // Guard against rounding putting a sample one bin off its edges.
        while (bin > 0 && x < out.edges[bin]) --bin;
        while (bin + 1 < n_bins && x >= out.edges[bin + 1]) ++bin;
        ++counts[bin];
    }
    out.heights.resize(n_bins);
    const double n = static_cast<double>(samples.size());
    for (std::size_t i = 0; i < n_bins; ++i)
        out.heights[i] = static_cast<double>(counts[i]) / (out.width(i) * n);
    return out;
}

double kl_divergence(const BinnedDensity& empirical, const std::function<double(double)>& model) {
    double total = 0.0;
    for (std::size_t i = 0; i < empirical.bins(); ++i) {
        const double f = empirical.heights[i];
        if (f <= 0.0) continue;
        const double g = quad::integrate(model, empirical.edges[i], empirical.edges[i + 1], 1e-10) / empirical.width(i);
        if (!(g > 0.0)) throw std::domain_error("model vanishes on occupied bin");
        total += f * std::log(f / g) * empirical.width(i);
    }
    return total;
}

double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf) {
    if (samples.empty()) throw std::invalid_argument("empty sample");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        worst = std::max({worst, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
    }
    return worst;
}

SampleStats sample_stats(std::span<const double> values) {
    SampleStats s;
    s.count = values.size();
    if (values.empty()) return s;
    const double pivot = values.front();
    const double n = static_cast<double>(s.count);
    double shift = 0.0;
    double squares = 0.0;
    for (double v : values) {
        shift += v - pivot;
        squares += (v - pivot) * (v - pivot);
    }
    s.mean = pivot + shift / n;
    if (s.count > 1) s.std = std::sqrt(std::max(0.0, (squares - shift * shift / n) / (n - 1.0)));
    return s;
}

double window_mean(std::span<const double> grid, std::span<const double> values, double from, double to) {
    if (grid.size() != values.size()) throw std::invalid_argument("grid and values differ in length");
    const double slack = 1e-9 * std::max(1.0, std::abs(to));
    double total = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] < from - slack || grid[i] > to + slack) continue;
        total += values[i];
        ++count;
    }
    if (count == 0) throw std::invalid_argument("averaging window contains no grid point");
    return total / static_cast<double>(count);
}

EnsembleSummary summarize_ensemble(std::span<const Trajectory> runs) {
    if (runs.size() < 2) throw std::invalid_argument("ensemble summary needs at least two runs");
    const auto& grid = runs.front().grid;
    for (const auto& run : runs)
        if (run.grid != grid || run.rho_I.size() != grid.size()) throw std::invalid_argument("grid mismatch");

    EnsembleSummary out;
    out.grid = grid;
    out.runs = runs.size();
    const std::size_t points = grid.size();
    out.mean.resize(points);
    out.std.resize(points);
    out.ci_low.resize(points);
    out.ci_high.resize(points);
    std::vector<double> column(runs.size());
    const double root_n = std::sqrt(static_cast<double>(runs.size()));
    for (std::size_t i = 0; i < points; ++i) {
        for (std::size_t r = 0; r < runs.size(); ++r) column[r] = runs[r].rho_I[i];
        const SampleStats s = sample_stats(column);
        out.mean[i] = s.mean;
        out.std[i] = s.std;
        out.ci_low[i] = s.mean - 1.96 * s.std / root_n;
        out.ci_high[i] = s.mean + 1.96 * s.std / root_n;
    }
    return out;
}

} // namespace grpsis
