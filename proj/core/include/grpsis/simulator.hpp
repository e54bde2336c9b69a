#pragma once

#include "grpsis/event_queue.hpp"
#include "grpsis/network.hpp"
#include "grpsis/random.hpp"
#include "grpsis/recovery_dist.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace grpsis {

#ifdef NDEBUG
inline constexpr bool kCheckInvariantsByDefault = false;
#else
inline constexpr bool kCheckInvariantsByDefault = true;
#endif

enum class NodeState : std::uint8_t { Susceptible, Infected };

struct SimulationParams {
    double beta = 0.0;               // per-contact transmission intensity
    double initial_infected = 0.3;   // fraction rho_I(0); floor(fraction * n) seeds
    double horizon = 50.0;           // T
    double grid_dt = 0.1;            // trajectory sampling step
    /// Follow the printed event loop literally: contacts are armed only when the source becomes
    /// infected and never re-armed when a neighbour returns to susceptible.
    bool literal_alg1 = false;
    bool check_invariants = kCheckInvariantsByDefault;

    void validate() const;
};

/// One realization sampled on the uniform grid 0, grid_dt, ..., T (step interpolation).
struct Trajectory {
    std::vector<double> grid;
    std::vector<double> rho_I;
    std::vector<double> rho_S;
    /// Infection ages at T of the nodes infected at T. Empty for absorbed runs.
    std::vector<double> final_ages;
    bool absorbed = false;
    double absorption_time = std::numeric_limits<double>::quiet_NaN();
    std::uint64_t seed = 0;
    std::size_t events_processed = 0;
    std::vector<std::string> warnings;
};

/// Mutable state of one run of the node-centric event-driven grp-SIS process.
///
/// Each infected->susceptible directed contact carries its own Poisson(beta) clock, realised as
/// a single pending TransmissionAttempt. Recovery of a node invalidates its outgoing attempts
/// (epoch bump) and re-arms one attempt from each infected neighbour towards it.
class Simulation {
public:
    Simulation(const RegularNetwork& net, const RecoveryDistribution& dist, const SimulationParams& params,
               std::uint64_t seed);

    struct Step {
        Event event;
        bool applied = false; // false when the popped event was stale
    };

    /// Pops and processes the earliest pending event if its time is <= horizon.
    std::optional<Step> step();

    /// Runs to the horizon and returns the sampled trajectory.
    Trajectory run();

    double clock() const noexcept { return clock_; }
    std::size_t infected_count() const noexcept { return infected_; }
    NodeState state(NodeId v) const noexcept { return states_[v]; }
    double infected_since(NodeId v) const noexcept { return infected_since_[v]; }
    const EventQueue& queue() const noexcept { return queue_; }

    /// Verifies the state/queue consistency invariants; throws std::logic_error on violation.
    void check_consistency() const;

private:
    void infect(NodeId v, double now);
    void recover(NodeId v, double now);
    void schedule_attempt(NodeId source, NodeId target, double now);
    bool attempt_is_live(const Event& e) const;

    const RegularNetwork& net_;
    const RecoveryDistribution& dist_;
    SimulationParams params_;
    std::uint64_t seed_;
    Rng rng_;
    EventQueue queue_;
    std::vector<NodeState> states_;
    std::vector<std::uint32_t> epochs_;
    std::vector<double> infected_since_;
    std::vector<double> recovery_at_;
    std::size_t infected_ = 0;
    double clock_ = 0.0;
    double last_event_time_ = 0.0;
    std::size_t events_processed_ = 0;
    std::vector<std::string> warnings_;
};

/// One statistically exact realization.
Trajectory simulate(const RegularNetwork& net, const RecoveryDistribution& dist, const SimulationParams& params,
                    std::uint64_t seed);

/// Independent runs, one per seed, executed on up to `threads` worker threads (0 = hardware
/// concurrency). Results are in seed order and do not depend on the thread count.
std::vector<Trajectory> run_ensemble(const RegularNetwork& net, const RecoveryDistribution& dist,
                                     const SimulationParams& params, std::span<const std::uint64_t> seeds,
                                     unsigned threads = 0);

/// Runs `count` independent tasks on a small thread pool; task(i) must be thread-safe.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& task);

} // namespace grpsis
