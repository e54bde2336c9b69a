#include "grpsis/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>
#include <unordered_set>

namespace grpsis {

void SimulationParams::validate() const {
    if (!(beta >= 0.0) || !std::isfinite(beta)) throw std::invalid_argument("beta must be finite and non-negative");
    if (!(initial_infected >= 0.0 && initial_infected <= 1.0))
        throw std::invalid_argument("initial infected fraction must lie in [0, 1]");
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw std::invalid_argument("horizon T must be positive");
    if (!(grid_dt > 0.0) || grid_dt > horizon) throw std::invalid_argument("grid_dt must lie in (0, T]");
    const double steps = horizon / grid_dt;
    if (std::abs(steps - std::round(steps)) > 1e-9 * std::max(1.0, steps))
        throw std::invalid_argument("T must be an integer multiple of grid_dt");
}

Simulation::Simulation(const RegularNetwork& net, const RecoveryDistribution& dist, const SimulationParams& params,
                       std::uint64_t seed)
    : net_(net), dist_(dist), params_(params), seed_(seed), rng_(seed), states_(net.size(), NodeState::Susceptible),
      epochs_(net.size(), 0), infected_since_(net.size(), 0.0),
      recovery_at_(net.size(), std::numeric_limits<double>::infinity()) {
    params_.validate();
    const std::size_t n = net.size();
    queue_.reserve(4 * n * std::max<std::size_t>(net.degree(), 1));

    const auto seeds = static_cast<std::size_t>(std::floor(params_.initial_infected * static_cast<double>(n) + 1e-9));
    if (seeds == 0) warnings_.emplace_back("empty initial infection: floor(rho_I0 * n) = 0");

    // Uniform random subset by a partial Fisher-Yates shuffle.
    std::vector<NodeId> order(n);
    std::iota(order.begin(), order.end(), NodeId{0});
    for (std::size_t i = 0; i < seeds; ++i) {
        const std::size_t j = i + uniform_index(rng_, n - i);
        std::swap(order[i], order[j]);
    }
    std::sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(seeds));

    // Flip all seeds first so that attempts are only armed towards nodes that stay susceptible.
    for (std::size_t i = 0; i < seeds; ++i) {
        const NodeId v = order[i];
        states_[v] = NodeState::Infected;
        ++epochs_[v];
        infected_since_[v] = 0.0;
        ++infected_;
    }
    for (std::size_t i = 0; i < seeds; ++i) {
        const NodeId v = order[i];
        const double w = dist_.sample(rng_);
        recovery_at_[v] = w;
        if (std::isfinite(w)) queue_.push(Event{w, 0, v, v, epochs_[v], 0, EventKind::Recovery});
    }
    for (std::size_t i = 0; i < seeds; ++i) {
        const NodeId v = order[i];
        for (NodeId u : net_.neighbors(v))
            if (states_[u] == NodeState::Susceptible) schedule_attempt(v, u, 0.0);
    }
    if (params_.check_invariants) check_consistency();
}

void Simulation::schedule_attempt(NodeId source, NodeId target, double now) {
    if (params_.beta <= 0.0) return;
    const double at = now + exponential_draw(rng_, params_.beta);
    queue_.push(Event{at, 0, source, target, epochs_[source], epochs_[target], EventKind::TransmissionAttempt});
}

bool Simulation::attempt_is_live(const Event& e) const {
    if (e.source_epoch != epochs_[e.source]) return false;
    if (params_.literal_alg1) return states_[e.target] == NodeState::Susceptible;
    return e.target_epoch == epochs_[e.target];
}

void Simulation::infect(NodeId v, double now) {
    states_[v] = NodeState::Infected;
    ++epochs_[v];
    infected_since_[v] = now;
    ++infected_;
    const double w = dist_.sample(rng_);
    recovery_at_[v] = now + w;
    if (std::isfinite(w)) queue_.push(Event{now + w, 0, v, v, epochs_[v], 0, EventKind::Recovery});
    for (NodeId u : net_.neighbors(v))
        if (states_[u] == NodeState::Susceptible) schedule_attempt(v, u, now);
}

void Simulation::recover(NodeId v, double now) {
    states_[v] = NodeState::Susceptible;
    ++epochs_[v];
    --infected_;
    recovery_at_[v] = std::numeric_limits<double>::infinity();
    if (params_.literal_alg1) return;
    for (NodeId u : net_.neighbors(v))
        if (states_[u] == NodeState::Infected) schedule_attempt(u, v, now);
}

std::optional<Simulation::Step> Simulation::step() {
    if (queue_.empty() || infected_ == 0 || queue_.top().time > params_.horizon) return std::nullopt;
    const Event e = queue_.pop();
    if (e.time < last_event_time_) throw std::logic_error("event causality violated: time went backwards");
    last_event_time_ = e.time;
    clock_ = e.time;

    Step result{e, false};
    if (e.kind == EventKind::Recovery) {
        if (e.source_epoch == epochs_[e.source]) {
            recover(e.source, e.time);
            result.applied = true;
        }
    } else if (attempt_is_live(e)) {
        infect(e.target, e.time);
        result.applied = true;
    }
    if (result.applied) ++events_processed_;
    if (params_.check_invariants) check_consistency();
    return result;
}

Trajectory Simulation::run() {
    const auto steps = static_cast<std::size_t>(std::llround(params_.horizon / params_.grid_dt));
    const double n = static_cast<double>(net_.size());

    Trajectory traj;
    traj.seed = seed_;
    traj.grid.resize(steps + 1);
    traj.rho_I.resize(steps + 1);
    traj.rho_S.resize(steps + 1);
    for (std::size_t i = 0; i <= steps; ++i) traj.grid[i] = static_cast<double>(i) * params_.grid_dt;
    traj.grid.back() = params_.horizon;

    std::size_t next = 0;
    auto fill_before = [&](double time, bool inclusive) {
        const double fraction = static_cast<double>(infected_) / n;
        while (next <= steps && (traj.grid[next] < time || (inclusive && traj.grid[next] <= time))) {
            traj.rho_I[next] = fraction;
            traj.rho_S[next] = 1.0 - fraction;
            ++next;
        }
    };

    if (infected_ == 0) {
        traj.absorbed = true;
        traj.absorption_time = 0.0;
    }
    while (infected_ > 0 && !queue_.empty() && queue_.top().time <= params_.horizon) {
        fill_before(queue_.top().time, false);
        step();
        if (infected_ == 0) {
            traj.absorbed = true;
            traj.absorption_time = clock_;
        }
    }
    fill_before(params_.horizon, true);

    if (!traj.absorbed) {
        traj.final_ages.reserve(infected_);
        for (NodeId v = 0; v < net_.size(); ++v)
            if (states_[v] == NodeState::Infected) traj.final_ages.push_back(params_.horizon - infected_since_[v]);
    }
    traj.events_processed = events_processed_;
    traj.warnings = warnings_;
    return traj;
}

void Simulation::check_consistency() const {
    const std::size_t n = net_.size();
    std::size_t infected = 0;
    for (NodeId v = 0; v < n; ++v) {
        if (states_[v] != NodeState::Infected) continue;
        ++infected;
        if (infected_since_[v] > clock_) throw std::logic_error("infected_since exceeds the clock");
    }
    if (infected != infected_) throw std::logic_error("state partition broken: infected count mismatch");

    std::vector<int> live_recoveries(n, 0);
    std::map<std::pair<NodeId, NodeId>, int> live_attempts;
    for (const Event& e : queue_.pending()) {
        if (e.time < clock_) throw std::logic_error("pending event scheduled before the clock");
        if (e.kind == EventKind::Recovery) {
            if (e.source_epoch != epochs_[e.source]) continue;
            if (states_[e.source] != NodeState::Infected) throw std::logic_error("live recovery for a susceptible node");
            if (e.time != recovery_at_[e.source]) throw std::logic_error("live recovery time disagrees with the node");
            ++live_recoveries[e.source];
        } else if (!params_.literal_alg1 && attempt_is_live(e)) {
            if (states_[e.source] != NodeState::Infected || states_[e.target] != NodeState::Susceptible)
                throw std::logic_error("live transmission attempt on an inactive pair");
            ++live_attempts[{e.source, e.target}];
        }
    }
    for (NodeId v = 0; v < n; ++v) {
        const int expected = states_[v] == NodeState::Infected && std::isfinite(recovery_at_[v]) ? 1 : 0;
        if (live_recoveries[v] != expected) throw std::logic_error("infected node without exactly one live recovery");
    }
    if (params_.literal_alg1 || params_.beta <= 0.0) return;
    std::size_t active_pairs = 0;
    for (NodeId v = 0; v < n; ++v) {
        if (states_[v] != NodeState::Infected) continue;
        for (NodeId u : net_.neighbors(v)) {
            if (states_[u] != NodeState::Susceptible) continue;
            ++active_pairs;
            const auto it = live_attempts.find({v, u});
            if (it == live_attempts.end() || it->second != 1)
                throw std::logic_error("active pair without exactly one live transmission attempt");
        }
    }
    if (active_pairs != live_attempts.size()) throw std::logic_error("live attempt on a pair that is not active");
}

Trajectory simulate(const RegularNetwork& net, const RecoveryDistribution& dist, const SimulationParams& params,
                    std::uint64_t seed) {
    return Simulation(net, dist, params, seed).run();
}

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& task) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) task(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                task(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& thread : pool) thread.join();
    if (failure) std::rethrow_exception(failure);
}

std::vector<Trajectory> run_ensemble(const RegularNetwork& net, const RecoveryDistribution& dist,
                                     const SimulationParams& params, std::span<const std::uint64_t> seeds,
                                     unsigned threads) {
    if (seeds.empty()) throw std::invalid_argument("ensemble needs at least one run");
    std::unordered_set<std::uint64_t> unique(seeds.begin(), seeds.end());
    if (unique.size() != seeds.size()) throw std::invalid_argument("ensemble seeds must be distinct");
    params.validate();

    std::vector<Trajectory> runs(seeds.size());
    parallel_for(seeds.size(), threads, [&](std::size_t i) { runs[i] = simulate(net, dist, params, seeds[i]); });
    return runs;
}

} // namespace grpsis
