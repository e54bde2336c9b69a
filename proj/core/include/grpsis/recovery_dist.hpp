#pragma once

#include "grpsis/random.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace grpsis {

/// Law of the recovery waiting time W: density, survival F0(t) = P{W > t}, hazard, sampler
/// and the first two moments.
///
/// Implementations are immutable after construction and may be shared between concurrently
/// running simulations. Moment existence is decided once, in the constructor; asking for a
/// moment that does not exist throws std::domain_error("moment diverges").
class RecoveryDistribution {
public:
    virtual ~RecoveryDistribution() = default;

    /// Density w(t); zero for t < 0.
    virtual double pdf(double t) const = 0;

    /// P{W > t}; equals 1 for t < 0.
    virtual double survival(double t) const = 0;

    /// w(t) / F0(t). Throws std::domain_error where F0(t) == 0.
    virtual double hazard(double t) const;

    /// One independent draw of W.
    virtual double sample(Rng& rng) const = 0;

    /// Canonical textual form, e.g. "dist=powerlaw lambda=4 t0=1".
    virtual std::string spec() const = 0;

    double mean() const;
    double second_moment() const;
    bool has_mean() const noexcept { return mean_.has_value(); }
    bool has_second_moment() const noexcept { return second_moment_.has_value(); }

    /// Smallest t with survival(t) <= tail, found by bracketing and bisection.
    virtual double upper_quantile(double tail) const;

protected:
    RecoveryDistribution() = default;

    /// Called once by each concrete constructor; nullopt marks a divergent moment.
    void cache_moments(std::optional<double> mean, std::optional<double> second_moment) {
        mean_ = mean;
        second_moment_ = second_moment;
    }

private:
    std::optional<double> mean_;
    std::optional<double> second_moment_;
};

using DistributionPtr = std::shared_ptr<const RecoveryDistribution>;

/// w(t) = mu exp(-mu t). Constant hazard: the Markovian special case.
class ExponentialRecovery final : public RecoveryDistribution {
public:
    explicit ExponentialRecovery(double mu);

    double pdf(double t) const override;
    double survival(double t) const override;
    double hazard(double t) const override;
    double sample(Rng& rng) const override;
    std::string spec() const override;
    double upper_quantile(double tail) const override;

    double rate() const noexcept { return mu_; }

private:
    double mu_;
};

/// Pareto-type law with support [t0, inf): F0(t) = (t / t0)^(1 - lambda).
/// The mean exists for lambda > 2, the second moment for lambda > 3.
class PowerLawRecovery final : public RecoveryDistribution {
public:
    PowerLawRecovery(double lambda, double t0);

    double pdf(double t) const override;
    double survival(double t) const override;
    double hazard(double t) const override;
    double sample(Rng& rng) const override;
    std::string spec() const override;
    double upper_quantile(double tail) const override;

    double exponent() const noexcept { return lambda_; }
    double minimum() const noexcept { return t0_; }

private:
    double lambda_;
    double t0_;
};

/// ln W ~ Normal(mu, sigma^2).
class LognormalRecovery final : public RecoveryDistribution {
public:
    LognormalRecovery(double mu, double sigma);

    double pdf(double t) const override;
    double survival(double t) const override;
    double sample(Rng& rng) const override;
    std::string spec() const override;

    double log_location() const noexcept { return mu_; }
    double log_scale() const noexcept { return sigma_; }

private:
    double mu_;
    double sigma_;
};

/// User-defined law given by a piecewise-linear hazard through (time, hazard) knots.
///
/// Knot times start at 0 and increase strictly; the hazard is held constant past the last
/// knot, which must be positive so that F0 -> 0. Sampling is by thinning against the maximum
/// knot hazard, which is exact because a piecewise-linear function attains its maximum at a knot.
class TabulatedHazardRecovery final : public RecoveryDistribution {
public:
    TabulatedHazardRecovery(std::vector<double> times, std::vector<double> hazards);

    double pdf(double t) const override;
    double survival(double t) const override;
    double hazard(double t) const override;
    double sample(Rng& rng) const override;
    std::string spec() const override;

    double cumulative_hazard(double t) const;

private:
    std::vector<double> times_;
    std::vector<double> hazards_;
    std::vector<double> cumulative_; // cumulative hazard at each knot
    double majorant_;
};

/// Parses "dist=exponential mu=0.5", "dist=powerlaw lambda=4 t0=1",
/// "dist=lognormal mu=0 sigma=1" or "dist=tabulated knots=0:0.2,1:0.8,3:0.5".
/// Throws std::invalid_argument on unknown laws, missing or malformed parameters.
DistributionPtr parse_distribution(std::string_view text);

/// Same as parse_distribution, from already split key/value pairs.
DistributionPtr make_distribution(const std::map<std::string, std::string>& params);

} // namespace grpsis
