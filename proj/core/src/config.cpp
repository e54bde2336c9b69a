#include "grpsis/config.hpp"

#include "grpsis/format.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace grpsis {

void ExperimentConfig::validate() const {
    auto fail = [](const std::string& what) { throw std::invalid_argument("config: " + what); };
    if (beta && !(*beta > 0.0)) fail("beta must be positive");
    for (std::size_t i = 0; i < betas.size(); ++i) {
        if (!(betas[i] > 0.0)) fail("beta sweep values must be positive");
        if (i > 0 && !(betas[i] > betas[i - 1])) fail("beta sweep must be strictly ascending");
    }
    if (degrees.empty()) fail("degree list must not be empty");
    for (std::size_t i = 0; i < degrees.size(); ++i) {
        if (degrees[i] == 0) fail("degrees must be positive");
        if (i > 0 && degrees[i] <= degrees[i - 1]) fail("degree list must be strictly ascending");
    }
    if (n == 0) fail("n must be positive");
    if (!(horizon > 0.0)) fail("T must be positive");
    if (!(grid_dt > 0.0)) fail("grid_dt must be positive");
    if (!(rho_I0 > 0.0 && rho_I0 <= 1.0)) fail("rho0 must lie in (0, 1]");
    if (runs == 0) fail("runs must be positive");
    if (bins == 0) fail("bins must be positive");
    if (!(pde_dt > 0.0)) fail("dt must be positive");
}

ExperimentConfig ExperimentConfig::effective() const {
    ExperimentConfig out = *this;
    if (fast) {
        out.n = std::min<std::size_t>(n, 1000);
        out.runs = std::min<std::size_t>(runs, 10);
    }
    out.validate();
    return out;
}

ParamList ExperimentConfig::params() const {
    ParamList p;
    if (!dist.empty()) p.emplace_back("dist", "'" + dist + "'");
    if (beta) p.emplace_back("beta", format_number(*beta));
    std::string ks;
    for (auto k : degrees) ks += (ks.empty() ? "" : ",") + std::to_string(k);
    p.emplace_back("k", ks);
    p.emplace_back("n", std::to_string(n));
    p.emplace_back("T", format_number(horizon));
    p.emplace_back("grid_dt", format_number(grid_dt));
    p.emplace_back("rho0", format_number(rho_I0));
    p.emplace_back("runs", std::to_string(runs));
    p.emplace_back("seed", std::to_string(seed));
    p.emplace_back("fast", fast ? "1" : "0");
    if (literal_alg1) p.emplace_back("literal_alg1", "1");
    return p;
}

std::vector<double> linspace(double lo, double hi, std::size_t count) {
    if (count < 2) throw std::invalid_argument("linspace needs at least two points");
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i)
        out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
    out.back() = hi;
    return out;
}

std::vector<double> parse_list(const std::string& text) {
    if (std::count(text.begin(), text.end(), ':') == 2) {
        const auto a = text.find(':');
        const auto b = text.find(':', a + 1);
        const double lo = parse_number(text.substr(0, a), "range start");
        const double hi = parse_number(text.substr(a + 1, b - a - 1), "range end");
        const double count = parse_number(text.substr(b + 1), "range count");
        if (count < 2 || count != static_cast<double>(static_cast<std::size_t>(count)))
            throw std::invalid_argument("range count must be an integer >= 2");
        return linspace(lo, hi, static_cast<std::size_t>(count));
    }
    std::vector<double> out;
    std::stringstream stream(text);
    std::string item;
    while (std::getline(stream, item, ',')) out.push_back(parse_number(item, "list item"));
    if (out.empty()) throw std::invalid_argument("empty list");
    return out;
}

} // namespace grpsis
