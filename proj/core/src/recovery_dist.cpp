#include "grpsis/recovery_dist.hpp"

#include "grpsis/format.hpp"
#include "grpsis/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace grpsis {

namespace {

void require(bool ok, const char* message) {
    if (!ok) throw std::invalid_argument(message);
}

} // namespace

// ---------------------------------------------------------------------------------------------
// RecoveryDistribution

double RecoveryDistribution::hazard(double t) const {
    if (t < 0.0) return 0.0;
    const double s = survival(t);
    if (!(s > 0.0)) throw std::domain_error("hazard undefined: survival is zero at t=" + format_number(t));
    return pdf(t) / s;
}

double RecoveryDistribution::mean() const {
    if (!mean_) throw std::domain_error("moment diverges: mean of " + spec());
    return *mean_;
}

double RecoveryDistribution::second_moment() const {
    if (!second_moment_) throw std::domain_error("moment diverges: second moment of " + spec());
    return *second_moment_;
}

double RecoveryDistribution::upper_quantile(double tail) const {
    if (tail >= 1.0) return 0.0;
    if (!(tail > 0.0)) return std::numeric_limits<double>::infinity();
    double lo = 0.0;
    double hi = 1.0;
    while (survival(hi) > tail) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e300) return std::numeric_limits<double>::infinity();
    }
    for (int i = 0; i < 200 && hi - lo > 1e-14 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (survival(mid) > tail ? lo : hi) = mid;
    }
    return hi;
}

// ---------------------------------------------------------------------------------------------
// Exponential

ExponentialRecovery::ExponentialRecovery(double mu) : mu_(mu) {
    require(std::isfinite(mu) && mu > 0.0, "exponential recovery requires mu > 0");
    cache_moments(1.0 / mu, 2.0 / (mu * mu));
}

double ExponentialRecovery::pdf(double t) const { return t < 0.0 ? 0.0 : mu_ * std::exp(-mu_ * t); }

double ExponentialRecovery::survival(double t) const { return t < 0.0 ? 1.0 : std::exp(-mu_ * t); }

double ExponentialRecovery::hazard(double t) const { return t < 0.0 ? 0.0 : mu_; }

double ExponentialRecovery::sample(Rng& rng) const { return exponential_draw(rng, mu_); }

std::string ExponentialRecovery::spec() const { return "dist=exponential mu=" + format_number(mu_); }

double ExponentialRecovery::upper_quantile(double tail) const {
    if (tail >= 1.0) return 0.0;
    return -std::log(tail) / mu_;
}

// ---------------------------------------------------------------------------------------------
// Power law

PowerLawRecovery::PowerLawRecovery(double lambda, double t0) : lambda_(lambda), t0_(t0) {
    require(std::isfinite(lambda) && lambda > 1.0, "power-law recovery requires lambda > 1");
    require(std::isfinite(t0) && t0 > 0.0, "power-law recovery requires t0 > 0");
    std::optional<double> m1;
    std::optional<double> m2;
    if (lambda > 2.0) m1 = t0 * (lambda - 1.0) / (lambda - 2.0);
    if (lambda > 3.0) m2 = t0 * t0 * (lambda - 1.0) / (lambda - 3.0);
    cache_moments(m1, m2);
}

double PowerLawRecovery::pdf(double t) const {
    if (t < t0_) return 0.0;
    return (lambda_ - 1.0) / t0_ * std::pow(t / t0_, -lambda_);
}

double PowerLawRecovery::survival(double t) const {
    if (t < t0_) return 1.0;
    return std::pow(t / t0_, 1.0 - lambda_);
}

double PowerLawRecovery::hazard(double t) const {
    if (t < t0_) return 0.0;
    return (lambda_ - 1.0) / t;
}

double PowerLawRecovery::sample(Rng& rng) const {
    return t0_ * std::pow(uniform_open_closed(rng), 1.0 / (1.0 - lambda_));
}

std::string PowerLawRecovery::spec() const {
    return "dist=powerlaw lambda=" + format_number(lambda_) + " t0=" + format_number(t0_);
}

double PowerLawRecovery::upper_quantile(double tail) const {
    if (tail >= 1.0) return 0.0;
    return t0_ * std::pow(tail, 1.0 / (1.0 - lambda_));
}

// ---------------------------------------------------------------------------------------------
// Lognormal

LognormalRecovery::LognormalRecovery(double mu, double sigma) : mu_(mu), sigma_(sigma) {
    require(std::isfinite(mu), "lognormal recovery requires finite mu");
    require(std::isfinite(sigma) && sigma > 0.0, "lognormal recovery requires sigma > 0");
    cache_moments(std::exp(mu + 0.5 * sigma * sigma), std::exp(2.0 * mu + 2.0 * sigma * sigma));
}

double LognormalRecovery::pdf(double t) const {
    if (t <= 0.0) return 0.0;
    const double z = (std::log(t) - mu_) / sigma_;
    return std::exp(-0.5 * z * z) / (t * sigma_ * std::sqrt(2.0 * std::numbers::pi));
}

double LognormalRecovery::survival(double t) const {
    if (t <= 0.0) return 1.0;
    return 0.5 * std::erfc((std::log(t) - mu_) / (std::numbers::sqrt2 * sigma_));
}

double LognormalRecovery::sample(Rng& rng) const { return std::exp(mu_ + sigma_ * standard_normal(rng)); }

std::string LognormalRecovery::spec() const {
    return "dist=lognormal mu=" + format_number(mu_) + " sigma=" + format_number(sigma_);
}

// ---------------------------------------------------------------------------------------------
// Tabulated hazard

TabulatedHazardRecovery::TabulatedHazardRecovery(std::vector<double> times, std::vector<double> hazards)
    : times_(std::move(times)), hazards_(std::move(hazards)) {
    require(!times_.empty() && times_.size() == hazards_.size(),
            "tabulated hazard needs matching, non-empty knot lists");
    require(times_.front() == 0.0, "tabulated hazard knots must start at t=0");
    for (std::size_t i = 0; i < times_.size(); ++i) {
        require(std::isfinite(times_[i]) && std::isfinite(hazards_[i]) && hazards_[i] >= 0.0,
                "tabulated hazard values must be finite and non-negative");
        if (i > 0) require(times_[i] > times_[i - 1], "tabulated hazard knot times must increase");
    }
    require(hazards_.back() > 0.0, "tabulated hazard must be positive after the last knot");

    cumulative_.assign(times_.size(), 0.0);
    for (std::size_t i = 1; i < times_.size(); ++i)
        cumulative_[i] = cumulative_[i - 1] + 0.5 * (hazards_[i - 1] + hazards_[i]) * (times_[i] - times_[i - 1]);
    majorant_ = *std::max_element(hazards_.begin(), hazards_.end());

    // Quadrature over the knot segments plus the exponential tail past the last knot.
    double m1 = 0.0;
    double m2 = 0.0;
    for (std::size_t i = 1; i < times_.size(); ++i) {
        m1 += quad::integrate([this](double t) { return survival(t); }, times_[i - 1], times_[i]);
        m2 += quad::integrate([this](double t) { return 2.0 * t * survival(t); }, times_[i - 1], times_[i]);
    }
    const double last = times_.back();
    const double rate = hazards_.back();
    const double s_last = survival(last);
    m1 += s_last / rate;
    m2 += 2.0 * s_last * (last / rate + 1.0 / (rate * rate));
    cache_moments(m1, m2);
}

double TabulatedHazardRecovery::hazard(double t) const {
    if (t < 0.0) return 0.0;
    if (t >= times_.back()) return hazards_.back();
    const auto it = std::upper_bound(times_.begin(), times_.end(), t);
    const std::size_t i = static_cast<std::size_t>(it - times_.begin()) - 1;
    const double frac = (t - times_[i]) / (times_[i + 1] - times_[i]);
    return hazards_[i] + frac * (hazards_[i + 1] - hazards_[i]);
}

double TabulatedHazardRecovery::cumulative_hazard(double t) const {
    if (t <= 0.0) return 0.0;
    if (t >= times_.back()) return cumulative_.back() + hazards_.back() * (t - times_.back());
    const auto it = std::upper_bound(times_.begin(), times_.end(), t);
    const std::size_t i = static_cast<std::size_t>(it - times_.begin()) - 1;
    const double d = t - times_[i];
    const double slope = (hazards_[i + 1] - hazards_[i]) / (times_[i + 1] - times_[i]);
    return cumulative_[i] + hazards_[i] * d + 0.5 * slope * d * d;
}

double TabulatedHazardRecovery::survival(double t) const {
    return t < 0.0 ? 1.0 : std::exp(-cumulative_hazard(t));
}

double TabulatedHazardRecovery::pdf(double t) const {
    return t < 0.0 ? 0.0 : hazard(t) * survival(t);
}

double TabulatedHazardRecovery::sample(Rng& rng) const {
    double t = 0.0;
    for (;;) {
        t += exponential_draw(rng, majorant_);
        if (uniform_open_closed(rng) * majorant_ <= hazard(t)) return t;
    }
}

std::string TabulatedHazardRecovery::spec() const {
    std::string out = "dist=tabulated knots=";
    for (std::size_t i = 0; i < times_.size(); ++i) {
        if (i > 0) out += ',';
        out += format_number(times_[i]) + ':' + format_number(hazards_[i]);
    }
    return out;
}

// ---------------------------------------------------------------------------------------------
// Parsing

namespace {

double take(const std::map<std::string, std::string>& params, const std::string& key) {
    const auto it = params.find(key);
    if (it == params.end()) throw std::invalid_argument("distribution parameter '" + key + "' is missing");
    return parse_number(it->second, key);
}

void only_keys(const std::map<std::string, std::string>& params, std::initializer_list<std::string_view> allowed) {
    for (const auto& [key, value] : params) {
        if (key == "dist") continue;
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw std::invalid_argument("unexpected distribution parameter '" + key + "'");
    }
}

} // namespace

DistributionPtr make_distribution(const std::map<std::string, std::string>& params) {
    const auto it = params.find("dist");
    if (it == params.end()) throw std::invalid_argument("distribution spec needs dist=<law>");
    const std::string& law = it->second;
    if (law == "exponential") {
        only_keys(params, {"mu"});
        return std::make_shared<ExponentialRecovery>(take(params, "mu"));
    }
    if (law == "powerlaw") {
        only_keys(params, {"lambda", "t0"});
        return std::make_shared<PowerLawRecovery>(take(params, "lambda"), take(params, "t0"));
    }
    if (law == "lognormal") {
        only_keys(params, {"mu", "sigma"});
        return std::make_shared<LognormalRecovery>(take(params, "mu"), take(params, "sigma"));
    }
    if (law == "tabulated") {
        only_keys(params, {"knots"});
        const auto knots = params.find("knots");
        if (knots == params.end()) throw std::invalid_argument("distribution parameter 'knots' is missing");
        std::vector<double> times;
        std::vector<double> hazards;
        std::stringstream list(knots->second);
        std::string pair;
        while (std::getline(list, pair, ',')) {
            const auto colon = pair.find(':');
            if (colon == std::string::npos) throw std::invalid_argument("knot '" + pair + "' is not time:hazard");
            times.push_back(parse_number(std::string_view(pair).substr(0, colon), "knot time"));
            hazards.push_back(parse_number(std::string_view(pair).substr(colon + 1), "knot hazard"));
        }
        return std::make_shared<TabulatedHazardRecovery>(std::move(times), std::move(hazards));
    }
    throw std::invalid_argument("unknown recovery law '" + law + "'");
}

DistributionPtr parse_distribution(std::string_view text) {
    std::map<std::string, std::string> params;
    std::istringstream in{std::string(text)};
    std::string token;
    while (in >> token) {
        const auto eq = token.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == token.size())
            throw std::invalid_argument("expected key=value in distribution spec, got '" + token + "'");
        if (!params.emplace(token.substr(0, eq), token.substr(eq + 1)).second)
            throw std::invalid_argument("duplicate distribution parameter '" + token.substr(0, eq) + "'");
    }
    return make_distribution(params);
}

} // namespace grpsis
